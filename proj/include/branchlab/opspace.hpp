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

// Control operator space: number-conserving traceless Hermitian operators on
// single sites (class F, 4x4) and nearest-neighbor pairs (class G, 16x16,
// orthogonal to both single-site subspaces), their inner product, and their
// restriction to particle-number sectors.
//
// Pair matrices use the local index 4*a + b, where a is the local state of
// the first site of the pair and b that of the second.
//
// Norm convention. A G term is normed by the 16-dim trace, Tr(g g'). An F
// term is normed in the pair space, i.e. as f (x) I_4, which gives
// <f, f'> = 4 Tr_4(f f'). With this choice
//
//   <k, k'> = 4^(2 - L) Tr(k k')
//
// on the full 4^L dimensional space of an L-site lattice.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "branchlab/fock.hpp"

namespace branchlab {

enum class OperatorClass { kF, kG };

struct LocalOperator {
  int site0 = 0;
  int site1 = -1;  // -1 for single-site operators
  OperatorClass cls = OperatorClass::kF;
  CMatrix matrix;
};

/// Orthonormal (Tr_4) basis of traceless Hermitian 4x4 matrices commuting
/// with the local number operator. Always 5 elements, cached.
const std::vector<CMatrix>& local_basis_F();

/// Orthonormal (Tr_16) basis of the pair operators that commute with
/// N_x + N_y, are traceless and are orthogonal to F (x) I and I (x) F.
/// 59 elements, cached.
const std::vector<CMatrix>& local_basis_G();

std::vector<LocalOperator> basis_F(const LatticeGeometry& geometry, int x);
/// Throws DomainError unless x, y are nearest neighbors.
std::vector<LocalOperator> basis_G(const LatticeGeometry& geometry, int x, int y);

/// Local number operator diag(0, 1, 1, 2).
CMatrix local_number_operator();
/// N_x + N_y on the 16-dim pair space.
CMatrix pair_number_operator();

/// Element k of K: a sum of F terms on distinct sites and G terms on distinct
/// neighbor pairs.
class ControlField {
 public:
  explicit ControlField(LatticeGeometry geometry) : geometry_(std::move(geometry)) {}

  /// Number of real coefficients of a general field: 5 per site, 59 per pair.
  static int parameter_count(const LatticeGeometry& geometry);

  /// Build from coefficients over the K-orthonormal basis: F terms use
  /// local_basis_F()/2 and G terms local_basis_G(), so that the Euclidean norm
  /// of `c` equals norm(). Layout: sites in order (5 each), then
  /// neighbor_pairs() in order (59 each).
  static ControlField from_coefficients(const LatticeGeometry& geometry,
                                        const Eigen::VectorXd& c);
  Eigen::VectorXd coefficients() const;

  /// Gaussian random coefficients with the given scale.
  static ControlField random(const LatticeGeometry& geometry, std::mt19937_64& rng,
                             double scale = 1.0);

  /// Replace the F term at x. Validates shape, hermiticity, trace and
  /// number conservation.
  ControlField& set_f(int x, const CMatrix& h);
  /// Replace the G term on the neighbor pair (x, y), x < y after reordering.
  /// Validates the class-G constraints.
  ControlField& set_g(int x, int y, const CMatrix& h);

  const LatticeGeometry& geometry() const { return geometry_; }
  const std::map<int, CMatrix>& f_terms() const { return f_terms_; }
  const std::map<std::pair<int, int>, CMatrix>& g_terms() const { return g_terms_; }
  bool has_g(int x, int y) const;

  ControlField operator+(const ControlField& o) const;
  ControlField scaled(double s) const;

  double norm() const;

 private:
  LatticeGeometry geometry_;
  std::map<int, CMatrix> f_terms_;
  std::map<std::pair<int, int>, CMatrix> g_terms_;
};

/// Sum of <f, f'> over shared sites plus <g, g'> over shared pairs.
double inner_product(const ControlField& k, const ControlField& kp);

/// Precomputed action of local operators on one sector: for every basis
/// state and every replacement of the local occupation of a site (or pair),
/// the index of the resulting basis state (or -1 if it leaves the sector).
class SectorEmbedding {
 public:
  explicit SectorEmbedding(SectorPtr sector);

  const SectorPtr& sector() const { return sector_; }
  int dim() const { return sector_->dim(); }

  /// Sector matrix of the full field (sum of all terms).
  CMatrix embed(const ControlField& k) const;
  /// Adds coeff * (h at site x) into `out`.
  void add_site(CMatrix& out, int x, const CMatrix& h, Complex coeff = 1.0) const;
  /// Adds coeff * (h on pair (x, y)) into `out`.
  void add_pair(CMatrix& out, int x, int y, const CMatrix& h, Complex coeff = 1.0) const;

  /// Sparse entries (row, col, value) of one local operator.
  struct Entry {
    int row;
    int col;
    Complex value;
  };
  std::vector<Entry> site_entries(int x, const CMatrix& h) const;
  std::vector<Entry> pair_entries(int x, int y, const CMatrix& h) const;

 private:
  int local_index(int state, int site) const;
  int replace_site(int state, int site, int local) const;
  int replace_pair(int state, int x, int y, int a, int b) const;

  SectorPtr sector_;
};

/// Convenience wrapper: the sector matrix of k.
CMatrix embed(const ControlField& k, const SectorBasis& sector);

/// Matrix of k on the full 4^L space (tensor product of local spaces, site 0
/// most significant). Only for small lattices; used by identity checks.
CMatrix embed_full(const ControlField& k);

/// Sparse, per-basis-element embeddings for one sector, in the coefficient
/// layout of ControlField::from_coefficients.
struct EmbeddedBasis {
  std::shared_ptr<const SectorEmbedding> embedding;
  std::vector<std::vector<SectorEmbedding::Entry>> elements;
};
EmbeddedBasis embed_basis(const SectorPtr& sector);

struct LieClosureReport {
  int generator_count = 0;
  int closure_dimension = 0;
  long expected_dimension = 0;
  std::vector<int> sector_particles;
  std::vector<int> sector_dimensions;
  int iterations = 0;
  bool pass = false;
};

struct LieClosureOptions {
  /// Upper bound on the real dimension of the matrix space being closed.
  long dimension_cap = 20000;
  /// Relative residual above which a commutator counts as new.
  double rank_tolerance = 1e-8;
  /// Use the OpenMP commutator kernel.
  bool parallel = true;
};

/// Dimension of the real Lie algebra generated by all F and G basis
/// operators restricted to the given sectors (traceless part per sector),
/// compared with sum (d_n^2 - 1). An empty `sectors` selects 1 .. 2L-1.
LieClosureReport lie_closure(const LatticeGeometry& geometry, std::vector<int> sectors = {},
                             const LieClosureOptions& options = {});

}  // namespace branchlab
