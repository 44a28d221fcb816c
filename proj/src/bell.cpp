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


#include <cmath>

#include "branchlab/branching.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/experiments.hpp"
#include "branchlab/opspace.hpp"

namespace branchlab {

namespace {

constexpr const char* kLabels[4] = {"uu", "ud", "du", "dd"};

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= M_PI)) throw DomainError("theta must lie in [0, pi]");
}

Eigen::Vector2d along(double angle) { return {std::cos(angle / 2.0), std::sin(angle / 2.0)}; }
Eigen::Vector2d across(double angle) { return {-std::sin(angle / 2.0), std::cos(angle / 2.0)}; }

// Spin index 0 is +1, index 1 is -1; component order (s0, s1, s2, s3).
Eigen::VectorXcd spin_product(const std::array<Eigen::Vector2d, 4>& s) {
  Eigen::VectorXcd v(16);
  for (int i = 0; i < 16; ++i)
    v(i) = s[0](i >> 3) * s[1]((i >> 2) & 1) * s[2]((i >> 1) & 1) * s[3](i & 1);
  return v;
}

std::array<double, 4> closed_form_weights(double theta) {
  const double s2 = 0.5 * std::pow(std::sin(theta / 2.0), 2);
  const double c2 = 0.5 * std::pow(std::cos(theta / 2.0), 2);
  return {s2, c2, c2, s2};
}

// Applies a local 4x4 operator on one site.
StateVector apply_local(const StateVector& psi, int site, const CMatrix& h) {
  SectorEmbedding emb(psi.sector());
  CMatrix m = CMatrix::Zero(psi.dim(), psi.dim());
  emb.add_site(m, site, h);
  return StateVector(psi.sector(), m * psi.amplitudes());
}

// Spin rotation taking `u` to spin +1 on a site (double occupancy picks up
// det = 1).
CMatrix spin_frame(const Eigen::Vector2d& u) {
  CMatrix h = CMatrix::Zero(4, 4);
  h(0, 0) = 1.0;
  h(1, 1) = u(0);
  h(1, 2) = u(1);
  h(2, 1) = -u(1);
  h(2, 2) = u(0);
  h(3, 3) = 1.0;
  return h;
}

// If `control` holds a single spin +1, swaps the occupation of `from` and
// `to` when exactly one of them holds a single particle. Unitary.
StateVector controlled_transfer(const StateVector& psi, int control, int from, int to) {
  const auto& basis = psi.basis();
  CVector keep = psi.amplitudes();
  CVector move = CVector::Zero(psi.dim());
  for (int i = 0; i < psi.dim(); ++i) {
    const auto& s = basis.state(i);
    const LocalState a = s.occupation(from);
    const LocalState b = s.occupation(to);
    const bool single = (particle_count(a) == 1 && b == LocalState::kEmpty) ||
                        (particle_count(b) == 1 && a == LocalState::kEmpty);
    if (s.occupation(control) == LocalState::kUp && single) {
      move(i) = keep(i);
      keep(i) = 0.0;
    }
  }
  StateVector moving(psi.sector(), move);
  CVector out = keep;
  auto lower = enumerate_sector(psi.geometry(), psi.particles() - 1);
  for (Spin sp : {Spin::kUp, Spin::kDown}) {
    for (auto [x, y] : {std::pair{from, to}, std::pair{to, from}}) {
      out += apply_creation(apply_annihilation(moving, x, sp, lower), y, sp, psi.sector())
                 .amplitudes();
    }
  }
  return StateVector(psi.sector(), out);
}

}  // namespace

BellSingle bell_single(double theta, const BellGeometry& g) {
  check_theta(theta);
  if (!(g.q > 0.0 && g.w > 0.0 && g.d > 0.0 && g.m > 0.0))
    throw DomainError("q, w, d and m must be positive");
  const std::array<double, 4> w = closed_form_weights(theta);
  const Eigen::Vector2d u0 = along(0.0), d0 = across(0.0);
  const Eigen::Vector2d u1 = along(theta), d1 = across(theta);
  const double t_c = g.m * g.w / g.q;
  const std::array<double, 4> pass = {g.q, -g.q, -g.q, g.q};
  const std::array<double, 4> meet = {2.0 * g.w, -2.0 * g.w, 2.0 * g.w, -2.0 * g.w};

  BellSingle out;
  for (int e = 0; e < 4; ++e) {
    const bool up0 = e < 2;
    const bool up1 = e % 2 == 0;
    BellBranch& br = out.branches[e];
    br.label = kLabels[e];
    br.weight = w[e];
    br.spins = {up0 ? u0 : d0, up1 ? u1 : d1, u0, u1};
    for (int p = 0; p < 4; ++p) {
      // Particles 0 and 2 follow e0, particles 1 and 3 follow e1; "u" reflects.
      const bool reflected = (p % 2 == 0) ? up0 : up1;
      const double k = reflected ? -pass[p] : pass[p];
      br.packets[p] = make_packet({k}, {meet[p] - k * t_c / g.m}, g.d, g.m);
    }
    br.spin_state = std::sqrt(w[e]) * spin_product(br.spins);
  }
  for (int i = 0; i < 4; ++i) {
    out.weight_sum += out.branches[i].spin_state.squaredNorm();
    for (int j = i + 1; j < 4; ++j)
      out.max_overlap = std::max(
          out.max_overlap,
          std::abs(out.branches[i].spin_state.dot(out.branches[j].spin_state)));
  }
  return out;
}

BellEnsemble bell_ensemble(const BellConfig& c) {
  check_theta(c.theta);
  if (c.replicas < 1) throw DomainError("need at least one replica");
  const std::array<double, 4> w = closed_form_weights(c.theta);
  const std::vector<double> weights(w.begin(), w.end());
  std::vector<BellOutcome> outcomes(c.replicas);
  const long n = c.replicas;
#pragma omp parallel for schedule(static) if (c.exec == Execution::kParallel)
  for (long i = 0; i < n; ++i)
    outcomes[i] = static_cast<BellOutcome>(
        sample_branch(weights, derive_seed(c.seed, static_cast<std::uint64_t>(i))));

  BellEnsemble e;
  e.replicas = n;
  for (BellOutcome o : outcomes) {
    if (o == BellOutcome::kUpUp || o == BellOutcome::kDownDown)
      ++e.agree;
    else
      ++e.disagree;
  }
  const double p = std::pow(std::sin(c.theta / 2.0), 2);
  e.correlation = static_cast<double>(e.agree - e.disagree) / static_cast<double>(n);
  e.standard_error = 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  e.expected = -std::cos(c.theta);
  if (c.keep_outcomes) e.outcomes = std::move(outcomes);
  return e;
}

BellExact bell_exhaustive(double theta, int replicas) {
  check_theta(theta);
  if (replicas < 1 || replicas > 8) throw DomainError("exhaustive enumeration needs 1 <= N <= 8");
  const std::array<double, 4> w = closed_form_weights(theta);
  BellExact out;
  double second = 0.0;
  const long branches = 1L << (2 * replicas);
  for (long code = 0; code < branches; ++code) {
    double weight = 1.0;
    int score = 0;
    for (int i = 0; i < replicas; ++i) {
      const int e = static_cast<int>((code >> (2 * i)) & 3);
      weight *= w[e];
      score += (e == 0 || e == 3) ? 1 : -1;
    }
    const double x = static_cast<double>(score) / replicas;
    out.total_weight += weight;
    out.mean += weight * x;
    second += weight * x * x;
  }
  out.variance = second - out.mean * out.mean;
  return out;
}

BellStateCheck bell_state_check(double theta, double alpha0) {
  check_theta(theta);
  const auto g = LatticeGeometry::line(6);
  const Eigen::Vector2d u0 = along(alpha0), d0 = across(alpha0);
  const Eigen::Vector2d u1 = along(alpha0 + theta), d1 = across(alpha0 + theta);
  // Sites: particle 3 at 1, particle 1 at 2, particle 0 at 3, particle 2 at 4.
  constexpr int kSite3 = 1, kSite1 = 2, kSite0 = 3, kSite2 = 4;
  auto sector = enumerate_sector(g, 4);

  auto spin_orbital = [&](int site, const Eigen::Vector2d& s) {
    Orbital o = point_orbital(g, site, Spin::kUp);
    o.spin = s.cast<Complex>();
    return o;
  };
  CVector amp = CVector::Zero(sector->dim());
  const double singlet[2][2] = {{0.0, M_SQRT1_2}, {-M_SQRT1_2, 0.0}};
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1) {
      if (singlet[s0][s1] == 0.0) continue;
      StateVector v = StateVector::vacuum(g);
      v = apply_orbital_creation(v, spin_orbital(kSite3, u1));
      v = apply_orbital_creation(v, spin_orbital(kSite1, s1 == 0 ? Eigen::Vector2d(1, 0)
                                                                   : Eigen::Vector2d(0, 1)));
      v = apply_orbital_creation(v, spin_orbital(kSite0, s0 == 0 ? Eigen::Vector2d(1, 0)
                                                                   : Eigen::Vector2d(0, 1)));
      v = apply_orbital_creation(v, spin_orbital(kSite2, u0), sector);
      amp += singlet[s0][s1] * v.amplitudes();
    }
  StateVector psi(sector, amp);

  // Collision 0-2: particle 2 moves 4 -> 5 if particle 0 lies along u0.
  const CMatrix f0 = spin_frame(u0);
  psi = apply_local(psi, kSite0, f0);
  psi = controlled_transfer(psi, kSite0, kSite2, 5);
  psi = apply_local(psi, kSite0, f0.adjoint());
  // Collision 1-3: particle 3 moves 1 -> 0 if particle 1 lies along u1.
  const CMatrix f1 = spin_frame(u1);
  psi = apply_local(psi, kSite1, f1);
  psi = controlled_transfer(psi, kSite1, kSite3, 0);
  psi = apply_local(psi, kSite1, f1.adjoint());

  BellStateCheck out;
  out.sites = g.sites();
  out.dim = sector->dim();
  out.norm_after = psi.norm();
  out.expected = closed_form_weights(theta);
  const std::array<Eigen::Vector2d, 2> first = {u0, d0};
  const std::array<Eigen::Vector2d, 2> second = {u1, d1};
  const auto spin_state = [](int i) { return i == 0 ? LocalState::kUp : LocalState::kDown; };
  for (int e = 0; e < 4; ++e) {
    const int e0 = e / 2, e1 = e % 2;
    const int rec2 = e0 == 0 ? 5 : kSite2;
    const int rec3 = e1 == 0 ? 0 : kSite3;
    // Spin amplitudes of this record pattern, order (s0, s1, s2, s3).
    Eigen::VectorXcd branch(16);
    for (int i = 0; i < 16; ++i) {
      std::vector<LocalState> occ(6, LocalState::kEmpty);
      occ[kSite0] = spin_state(i >> 3);
      occ[kSite1] = spin_state((i >> 2) & 1);
      occ[rec2] = spin_state((i >> 1) & 1);
      occ[rec3] = spin_state(i & 1);
      branch(i) = psi.amplitudes()(sector->index_of_or_throw(FockBasisState::from_occupations(occ)));
    }
    out.weights[e] = branch.squaredNorm();
    out.max_weight_error = std::max(out.max_weight_error, std::abs(out.weights[e] - out.expected[e]));
    const Eigen::VectorXcd ref = spin_product({first[e0], second[e1], u0, u1});
    const Eigen::VectorXcd residual = branch - ref * ref.dot(branch);
    out.max_spin_error = std::max(out.max_spin_error, residual.norm());
  }
  return out;
}

}  // namespace branchlab
