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

#include "branchlab/fock.hpp"

#include <bit>
#include <cmath>

#include "branchlab/errors.hpp"

namespace branchlab {

int particle_count(LocalState s) {
  switch (s) {
    case LocalState::kEmpty: return 0;
    case LocalState::kUp:
    case LocalState::kDown: return 1;
    case LocalState::kDouble: return 2;
  }
  return 0;
}

std::string label(LocalState s) {
  switch (s) {
    case LocalState::kEmpty: return "0";
    case LocalState::kUp: return "1";
    case LocalState::kDown: return "-1";
    case LocalState::kDouble: return "2";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LatticeGeometry

LatticeGeometry::LatticeGeometry(int dims, int nx, int ny, double spacing)
    : dims_(dims), nx_(nx), ny_(ny), spacing_(spacing) {
  if (nx * ny < 2) throw DomainError("lattice needs at least 2 sites");
  if (2 * nx * ny > 64) throw DomainError("lattice limited to 32 sites (64 modes)");
  if (!(spacing > 0.0)) throw DomainError("lattice spacing must be positive");
}

LatticeGeometry LatticeGeometry::line(int sites, double spacing) {
  return LatticeGeometry(1, sites, 1, spacing);
}

LatticeGeometry LatticeGeometry::symmetric_line(int x_max, double spacing) {
  if (x_max < 1) throw DomainError("x_max must be >= 1");
  return line(2 * x_max + 1, spacing);
}

LatticeGeometry LatticeGeometry::grid(int nx, int ny, double spacing) {
  if (nx < 1 || ny < 1) throw DomainError("grid extents must be positive");
  return LatticeGeometry(2, nx, ny, spacing);
}

std::pair<int, int> LatticeGeometry::coordinates(int site) const {
  return {site % nx_, site / nx_};
}

int LatticeGeometry::site_at(int zx, int zy) const {
  if (zx < 0 || zx >= nx_ || zy < 0 || zy >= ny_) throw DomainError("site outside lattice");
  return zy * nx_ + zx;
}

bool LatticeGeometry::are_neighbors(int a, int b) const {
  if (a < 0 || b < 0 || a >= sites() || b >= sites() || a == b) return false;
  auto [ax, ay] = coordinates(a);
  auto [bx, by] = coordinates(b);
  return std::abs(ax - bx) + std::abs(ay - by) == 1;
}

std::vector<std::pair<int, int>> LatticeGeometry::neighbor_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < sites(); ++a)
    for (int b = a + 1; b < sites(); ++b)
      if (are_neighbors(a, b)) out.emplace_back(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// FockBasisState

FockBasisState FockBasisState::from_occupations(const std::vector<LocalState>& occ) {
  std::uint64_t mask = 0;
  for (std::size_t x = 0; x < occ.size(); ++x) {
    const auto s = occ[x];
    if (s == LocalState::kUp || s == LocalState::kDouble) mask |= std::uint64_t{1} << (2 * x);
    if (s == LocalState::kDown || s == LocalState::kDouble)
      mask |= std::uint64_t{1} << (2 * x + 1);
  }
  return FockBasisState(mask);
}

int FockBasisState::particles() const { return std::popcount(mask_); }

LocalState FockBasisState::occupation(int site) const {
  const bool up = has_mode(2 * site);
  const bool down = has_mode(2 * site + 1);
  if (up && down) return LocalState::kDouble;
  if (up) return LocalState::kUp;
  if (down) return LocalState::kDown;
  return LocalState::kEmpty;
}

std::vector<LocalState> FockBasisState::occupations(int sites) const {
  std::vector<LocalState> out(sites);
  for (int x = 0; x < sites; ++x) out[x] = occupation(x);
  return out;
}

// ---------------------------------------------------------------------------
// SectorBasis

SectorBasis::SectorBasis(LatticeGeometry geometry, int particles)
    : geometry_(std::move(geometry)), particles_(particles) {
  const int modes = geometry_.modes();
  if (particles < 0 || particles > modes)
    throw DomainError("particle number " + std::to_string(particles) + " outside [0, " +
                      std::to_string(modes) + "]");
  // Lexicographic enumeration of increasing mode tuples.
  std::vector<int> combo(particles);
  for (int i = 0; i < particles; ++i) combo[i] = i;
  while (true) {
    std::uint64_t mask = 0;
    for (int m : combo) mask |= std::uint64_t{1} << m;
    index_.emplace(mask, static_cast<int>(states_.size()));
    states_.emplace_back(mask);
    int i = particles - 1;
    while (i >= 0 && combo[i] == modes - particles + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < particles; ++j) combo[j] = combo[j - 1] + 1;
  }
}

std::optional<int> SectorBasis::index_of(const FockBasisState& s) const {
  auto it = index_.find(s.mask());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int SectorBasis::index_of_or_throw(const FockBasisState& s) const {
  auto idx = index_of(s);
  if (!idx) throw DomainError("basis state not in sector");
  return *idx;
}

SectorPtr enumerate_sector(const LatticeGeometry& geometry, int particles) {
  return std::make_shared<const SectorBasis>(geometry, particles);
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SectorPtr sector, CVector amplitudes, bool product_certificate)
    : sector_(std::move(sector)),
      amplitudes_(std::move(amplitudes)),
      product_certificate_(product_certificate) {
  if (!sector_) throw DomainError("state vector needs a sector");
  if (amplitudes_.size() != sector_->dim())
    throw DomainError("amplitude count does not match sector dimension");
}

StateVector StateVector::vacuum(const LatticeGeometry& geometry) {
  CVector amp = CVector::Ones(1);
  return StateVector(enumerate_sector(geometry, 0), amp, true);
}

StateVector StateVector::basis_state(SectorPtr sector, const FockBasisState& s) {
  CVector amp = CVector::Zero(sector->dim());
  amp(sector->index_of_or_throw(s)) = 1.0;
  return StateVector(std::move(sector), std::move(amp));
}

StateVector StateVector::from_occupations(const LatticeGeometry& geometry,
                                          const std::vector<LocalState>& occ) {
  if (static_cast<int>(occ.size()) != geometry.sites())
    throw DomainError("occupation list length must equal site count");
  const auto s = FockBasisState::from_occupations(occ);
  return basis_state(enumerate_sector(geometry, s.particles()), s);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw DegenerateInputError("cannot normalize the zero vector");
  return StateVector(sector_, amplitudes_ / n, product_certificate_);
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.sector_->geometry() != sector_->geometry() ||
      other.particles() != particles())
    throw DomainError("inner product between different sectors");
  return amplitudes_.dot(other.amplitudes_);
}

double StateVector::overlap_modulus(const StateVector& other) const {
  return std::abs(inner(other));
}

StateVector StateVector::operator+(const StateVector& o) const {
  if (o.particles() != particles()) throw DomainError("adding states from different sectors");
  return StateVector(sector_, amplitudes_ + o.amplitudes_);
}

StateVector StateVector::operator-(const StateVector& o) const {
  if (o.particles() != particles())
    throw DomainError("subtracting states from different sectors");
  return StateVector(sector_, amplitudes_ - o.amplitudes_);
}

StateVector StateVector::scaled(Complex c) const {
  return StateVector(sector_, amplitudes_ * c,
                     product_certificate_ && std::abs(std::abs(c) - 1.0) < 1e-15);
}

std::vector<double> StateVector::site_densities() const {
  const int sites = geometry().sites();
  std::vector<double> out(sites, 0.0);
  for (int i = 0; i < dim(); ++i) {
    const double w = std::norm(amplitudes_(i));
    if (w == 0.0) continue;
    const auto& s = sector_->state(i);
    for (int x = 0; x < sites; ++x) out[x] += w * particle_count(s.occupation(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Creation / annihilation

namespace {

// Number of occupied modes strictly above `mode`.
int modes_above(std::uint64_t mask, int mode) {
  const std::uint64_t above = mode >= 63 ? 0 : (mask >> (mode + 1));
  return std::popcount(above);
}

SectorPtr resolve_target(const StateVector& state, int particles, SectorPtr target) {
  if (target) {
    if (target->particles() != particles || target->geometry() != state.geometry())
      throw DomainError("target sector does not match operator");
    return target;
  }
  return enumerate_sector(state.geometry(), particles);
}

void check_site(const LatticeGeometry& g, int site) {
  if (site < 0 || site >= g.sites()) throw DomainError("site index outside lattice");
}

}  // namespace

StateVector apply_creation(const StateVector& state, int site, Spin spin, SectorPtr target) {
  check_site(state.geometry(), site);
  if (state.particles() + 1 > state.geometry().modes())
    throw DomainError("creation target sector does not exist");
  auto to = resolve_target(state, state.particles() + 1, std::move(target));
  const int mode = mode_index(site, spin);
  CVector out = CVector::Zero(to->dim());
  const auto& from = state.basis();
  for (int i = 0; i < from.dim(); ++i) {
    const Complex a = state.amplitudes()(i);
    if (a == Complex(0.0)) continue;
    const std::uint64_t mask = from.state(i).mask();
    if ((mask >> mode) & 1u) continue;
    const double sign = (modes_above(mask, mode) % 2 == 0) ? 1.0 : -1.0;
    const int j = to->index_of_or_throw(FockBasisState(mask | (std::uint64_t{1} << mode)));
    out(j) += sign * a;
  }
  return StateVector(std::move(to), std::move(out));
}

StateVector apply_annihilation(const StateVector& state, int site, Spin spin, SectorPtr target) {
  check_site(state.geometry(), site);
  if (state.particles() == 0) throw DomainError("annihilation target sector does not exist");
  auto to = resolve_target(state, state.particles() - 1, std::move(target));
  const int mode = mode_index(site, spin);
  CVector out = CVector::Zero(to->dim());
  const auto& from = state.basis();
  for (int i = 0; i < from.dim(); ++i) {
    const Complex a = state.amplitudes()(i);
    if (a == Complex(0.0)) continue;
    const std::uint64_t mask = from.state(i).mask();
    if (!((mask >> mode) & 1u)) continue;
    const double sign = (modes_above(mask, mode) % 2 == 0) ? 1.0 : -1.0;
    const int j = to->index_of_or_throw(FockBasisState(mask & ~(std::uint64_t{1} << mode)));
    out(j) += sign * a;
  }
  return StateVector(std::move(to), std::move(out));
}

CMatrix creation_matrix(const SectorBasis& from, const SectorBasis& to, int mode) {
  if (to.particles() != from.particles() + 1 || to.geometry() != from.geometry())
    throw DomainError("creation matrix needs sectors n and n+1 of one lattice");
  CMatrix m = CMatrix::Zero(to.dim(), from.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const std::uint64_t mask = from.state(i).mask();
    if ((mask >> mode) & 1u) continue;
    const double sign = (modes_above(mask, mode) % 2 == 0) ? 1.0 : -1.0;
    m(to.index_of_or_throw(FockBasisState(mask | (std::uint64_t{1} << mode))), i) = sign;
  }
  return m;
}

StateVector apply_orbital_creation(const StateVector& state, const Orbital& orbital,
                                   SectorPtr target) {
  const auto& g = state.geometry();
  if (orbital.position.size() != g.sites())
    throw DomainError("orbital position wave function must have one entry per site");
  auto to = resolve_target(state, state.particles() + 1, std::move(target));
  CVector out = CVector::Zero(to->dim());
  for (int x = 0; x < g.sites(); ++x) {
    for (int k = 0; k < 2; ++k) {
      const Complex c = orbital.position(x) * orbital.spin(k);
      if (c == Complex(0.0)) continue;
      const Spin s = (k == 0) ? Spin::kUp : Spin::kDown;
      out += c * apply_creation(state, x, s, to).amplitudes();
    }
  }
  return StateVector(std::move(to), std::move(out));
}

StateVector build_product_state(const LatticeGeometry& geometry,
                                const std::vector<Orbital>& orbitals) {
  if (static_cast<int>(orbitals.size()) > geometry.modes())
    throw DomainError("more particles than modes");
  StateVector psi = StateVector::vacuum(geometry);
  for (const auto& orb : orbitals) psi = apply_orbital_creation(psi, orb);
  const double n = psi.norm();
  if (n < 1e-12) throw DegenerateInputError("product state vanishes (colliding modes)");
  return StateVector(psi.sector(), psi.amplitudes() / n, true);
}

Orbital point_orbital(const LatticeGeometry& geometry, int site, Spin spin) {
  check_site(geometry, site);
  Orbital o{CVector::Zero(geometry.sites()), Eigen::Vector2cd::Zero()};
  o.position(site) = 1.0;
  o.spin(spin == Spin::kUp ? 0 : 1) = 1.0;
  return o;
}

Orbital uniform_orbital(const LatticeGeometry& geometry, int first, int count, Spin spin) {
  if (count < 1 || first < 0 || first + count > geometry.sites())
    throw DomainError("uniform orbital does not fit on the lattice");
  Orbital o{CVector::Zero(geometry.sites()), Eigen::Vector2cd::Zero()};
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  for (int x = first; x < first + count; ++x) o.position(x) = amp;
  o.spin(spin == Spin::kUp ? 0 : 1) = 1.0;
  return o;
}

}  // namespace branchlab
