// Copyright 2026 The branchlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Finite lattice-fermion Hilbert space restricted to particle-number sectors.
//
// Every site carries four local states, indexed in this fixed order:
//
//   0: |0>   empty
//   1: |1>   spin up
//   2: |-1>  spin down
//   3: |2>   doubly occupied, equal to a^dag(x,-1) a^dag(x,+1) |0>
//
// Fermionic modes are numbered site-major, mode(x, +1) = 2x and
// mode(x, -1) = 2x + 1. A sector basis state with modes m_1 < ... < m_k is
// the canonical vector a^dag(m_k) ... a^dag(m_1) |vac>, i.e. modes are created
// in increasing order. With this choice a product of b^dag operators taken in
// increasing site order (smallest site created first) carries a + sign, and
// the occupation pattern can be read as a plain tensor product state. Local
// operators (see opspace.hpp) act on that tensor product without extra signs.
//
// 2-D lattices are flattened row by row: site index = z_y * nx + z_x, so a row
// of constant z_y is a contiguous block of sites.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace branchlab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class LocalState : std::uint8_t { kEmpty = 0, kUp = 1, kDown = 2, kDouble = 3 };

enum class Spin : int { kDown = -1, kUp = +1 };

/// Particle count of a local state (0, 1, 1, 2).
int particle_count(LocalState s);

/// Human-readable label: "0", "1", "-1", "2".
std::string label(LocalState s);

inline int mode_index(int site, Spin s) { return 2 * site + (s == Spin::kUp ? 0 : 1); }

class LatticeGeometry {
 public:
  /// 1-D chain of `sites` sites (site index 0 .. sites-1).
  static LatticeGeometry line(int sites, double spacing = 1.0);
  /// 1-D chain |x| <= x_max, i.e. 2 x_max + 1 sites.
  static LatticeGeometry symmetric_line(int x_max, double spacing = 1.0);
  /// Rectangular nx-by-ny grid.
  static LatticeGeometry grid(int nx, int ny, double spacing = 1.0);

  int dims() const { return dims_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double spacing() const { return spacing_; }
  int sites() const { return nx_ * ny_; }
  int modes() const { return 2 * sites(); }

  /// (z_x, z_y) of a flattened site index.
  std::pair<int, int> coordinates(int site) const;
  int site_at(int zx, int zy) const;

  bool are_neighbors(int a, int b) const;
  /// All nearest-neighbor pairs (a < b), both axis directions in 2-D.
  std::vector<std::pair<int, int>> neighbor_pairs() const;

  bool operator==(const LatticeGeometry& o) const {
    return dims_ == o.dims_ && nx_ == o.nx_ && ny_ == o.ny_;
  }
  bool operator!=(const LatticeGeometry& o) const { return !(*this == o); }

 private:
  LatticeGeometry(int dims, int nx, int ny, double spacing);

  int dims_;
  int nx_;
  int ny_;
  double spacing_;
};

/// One occupation pattern, stored as a bitmask over fermionic modes.
class FockBasisState {
 public:
  FockBasisState() = default;
  explicit FockBasisState(std::uint64_t mode_mask) : mask_(mode_mask) {}
  static FockBasisState from_occupations(const std::vector<LocalState>& occ);

  std::uint64_t mask() const { return mask_; }
  int particles() const;
  LocalState occupation(int site) const;
  bool has_mode(int mode) const { return (mask_ >> mode) & 1u; }
  std::vector<LocalState> occupations(int sites) const;

  bool operator==(const FockBasisState& o) const { return mask_ == o.mask_; }
  bool operator!=(const FockBasisState& o) const { return mask_ != o.mask_; }

 private:
  std::uint64_t mask_ = 0;
};

/// All basis states with a fixed particle number, ordered lexicographically by
/// their increasing mode tuples.
class SectorBasis {
 public:
  SectorBasis(LatticeGeometry geometry, int particles);

  const LatticeGeometry& geometry() const { return geometry_; }
  int particles() const { return particles_; }
  int dim() const { return static_cast<int>(states_.size()); }
  const FockBasisState& state(int i) const { return states_[i]; }
  const std::vector<FockBasisState>& states() const { return states_; }

  /// Index of a basis state, or nullopt if it is not in this sector.
  std::optional<int> index_of(const FockBasisState& s) const;
  int index_of_or_throw(const FockBasisState& s) const;

 private:
  LatticeGeometry geometry_;
  int particles_;
  std::vector<FockBasisState> states_;
  std::unordered_map<std::uint64_t, int> index_;
};

using SectorPtr = std::shared_ptr<const SectorBasis>;

/// Eagerly materialize the sector with `particles` fermions.
SectorPtr enumerate_sector(const LatticeGeometry& geometry, int particles);

/// Complex amplitudes over a sector basis. Immutable value type.
class StateVector {
 public:
  StateVector(SectorPtr sector, CVector amplitudes, bool product_certificate = false);

  static StateVector vacuum(const LatticeGeometry& geometry);
  static StateVector basis_state(SectorPtr sector, const FockBasisState& s);
  /// Tensor-product state from one local label per site.
  static StateVector from_occupations(const LatticeGeometry& geometry,
                                      const std::vector<LocalState>& occ);

  const SectorPtr& sector() const { return sector_; }
  const SectorBasis& basis() const { return *sector_; }
  const LatticeGeometry& geometry() const { return sector_->geometry(); }
  int particles() const { return sector_->particles(); }
  int dim() const { return sector_->dim(); }
  const CVector& amplitudes() const { return amplitudes_; }

  /// True only for states produced by build_product_state: these are members
  /// of the product-state set and carry complexity zero by definition.
  bool product_certificate() const { return product_certificate_; }

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;
  Complex inner(const StateVector& other) const;  // <this|other>
  /// |<this|other>| for normalized vectors, the phase-free overlap.
  double overlap_modulus(const StateVector& other) const;

  StateVector operator+(const StateVector& o) const;
  StateVector operator-(const StateVector& o) const;
  StateVector scaled(Complex c) const;

  /// <N_x> summed over sites; equals the particle number on normalized states.
  std::vector<double> site_densities() const;

 private:
  SectorPtr sector_;
  CVector amplitudes_;
  bool product_certificate_;
};

/// a^dag(site, spin) |state>, landing in the (n+1)-particle sector. The target
/// sector may be supplied to share one basis across many calls.
StateVector apply_creation(const StateVector& state, int site, Spin spin,
                           SectorPtr target = nullptr);

/// a(site, spin) |state>, landing in the (n-1)-particle sector.
StateVector apply_annihilation(const StateVector& state, int site, Spin spin,
                               SectorPtr target = nullptr);

/// Dense matrix of a^dag(mode) from sector n to sector n+1.
CMatrix creation_matrix(const SectorBasis& from, const SectorBasis& to, int mode);

/// Single-particle orbital p(x) s(i) used by extended creation operators.
struct Orbital {
  CVector position;        // p(x), one entry per site
  Eigen::Vector2cd spin;   // [s(+1), s(-1)]
};

/// c^dag(orbital) |state> = sum_{x,i} p(x) s(i) a^dag(x,i) |state>.
StateVector apply_orbital_creation(const StateVector& state, const Orbital& orbital,
                                   SectorPtr target = nullptr);

/// c^dag(p_{n-1},s_{n-1}) ... c^dag(p_0,s_0) |vac>, normalized. The result
/// carries the product certificate. Throws DegenerateInputError if the
/// orbitals collide and the vector vanishes.
StateVector build_product_state(const LatticeGeometry& geometry,
                                const std::vector<Orbital>& orbitals);

/// Orbital localized on one site with a definite spin.
Orbital point_orbital(const LatticeGeometry& geometry, int site, Spin spin);
/// Orbital with equal amplitude 1/sqrt(count) on sites first .. first+count-1.
Orbital uniform_orbital(const LatticeGeometry& geometry, int first, int count, Spin spin);

}  // namespace branchlab
