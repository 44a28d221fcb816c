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

#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"

namespace branchlab {

namespace {

constexpr double kTwoRootTwo = 2.0 * M_SQRT2;

// Pair-space local indices 4a + b.
constexpr int kDownDown = 4 * 2 + 2;
constexpr int kUpUp = 4 * 1 + 1;
constexpr int kEmptyUp = 4 * 0 + 1;
constexpr int kUpEmpty = 4 * 1 + 0;
constexpr int kEmptyDown = 4 * 0 + 2;
constexpr int kDownEmpty = 4 * 2 + 0;

// -i (|a><b| - |b><a|)
void add_rotation(CMatrix& m, int a, int b) {
  m(a, b) += Complex(0.0, -1.0);
  m(b, a) += Complex(0.0, 1.0);
}

void require_sites(const LatticeGeometry& g, int needed) {
  if (g.dims() != 1) throw DomainError("constructive trajectories are defined on 1-D lattices");
  if (g.sites() < needed)
    throw DomainError("lattice too small: need " + std::to_string(needed) + " sites, have " +
                      std::to_string(g.sites()));
}

void check_n(int n) {
  if (n < 2) throw DomainError("separation n must be >= 2");
}

void check_r(long r) {
  if (r < 2) throw DomainError("width r must be >= 2");
}

// Constant-speed schedule: durations proportional to angle * ||k||, summing
// to 1; each step applies exp(i angle k) = exp(-i dt F) with F = -(angle/dt) k.
ControlTrajectory constant_speed(const LatticeGeometry& g, const std::vector<ControlField>& ks,
                                 const std::vector<double>& angles) {
  double total = 0.0;
  std::vector<double> lengths;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    lengths.push_back(angles[j] * ks[j].norm());
    total += lengths.back();
  }
  ControlTrajectory traj(g);
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const double dt = lengths[j] / total;
    traj.add_step(dt, ks[j].scaled(-angles[j] / dt));
  }
  return traj;
}

}  // namespace

double lower_bound_point_pair(int n) {
  check_n(n);
  return n * M_PI / (8.0 * M_SQRT2);
}

double upper_bound_point_pair(int n) {
  check_n(n);
  return (n - 1) * M_PI + M_PI / kTwoRootTwo;
}

double kappa(long r) {
  check_r(r);
  double acc = 0.0;
  for (long s = 1; s < r; ++s) acc += std::asin(std::sqrt(static_cast<double>(s) / (2.0 * r)));
  return acc / static_cast<double>(r);
}

double kappa_limit() { return 0.5; }

double lambda(long r) {
  check_r(r);
  double acc = 0.0;
  for (long s = 1; s < r; ++s)
    acc += std::asin(std::sqrt(static_cast<double>(s) / static_cast<double>(s + 1)));
  return acc / static_cast<double>(r);
}

double lower_bound_extended(int n, long r) {
  return lower_bound_point_pair(n) + r * kappa(r) / kTwoRootTwo;
}

double upper_bound_extended(int n, long r) {
  return upper_bound_point_pair(n) + 2.0 * lambda(r) * r;
}

StateVector point_pair_start_state(const LatticeGeometry& geometry) {
  std::vector<LocalState> occ(geometry.sites(), LocalState::kEmpty);
  occ[0] = LocalState::kUp;
  occ[1] = LocalState::kUp;
  auto s = StateVector::from_occupations(geometry, occ);
  return StateVector(s.sector(), s.amplitudes(), true);
}

StateVector omega_state(const LatticeGeometry& geometry, int n) {
  check_n(n);
  if (n >= geometry.sites()) throw DomainError("lattice too small for the separated pair");
  auto sector = enumerate_sector(geometry, 2);
  CVector amp = CVector::Zero(sector->dim());
  for (LocalState s : {LocalState::kDown, LocalState::kUp}) {
    std::vector<LocalState> occ(geometry.sites(), LocalState::kEmpty);
    occ[0] = s;
    occ[n] = s;
    amp(sector->index_of_or_throw(FockBasisState::from_occupations(occ))) = M_SQRT1_2;
  }
  return StateVector(sector, amp);
}

StateVector omega_prime_state(const LatticeGeometry& geometry, int n, int r) {
  check_n(n);
  check_r(r);
  if (n + r > geometry.sites()) throw DomainError("lattice too small for the extended pair");
  auto sector = enumerate_sector(geometry, 2);
  CVector amp = CVector::Zero(sector->dim());
  const double a = M_SQRT1_2 / std::sqrt(static_cast<double>(r));
  for (LocalState s : {LocalState::kDown, LocalState::kUp}) {
    for (int x = n; x < n + r; ++x) {
      std::vector<LocalState> occ(geometry.sites(), LocalState::kEmpty);
      occ[0] = s;
      occ[x] = s;
      amp(sector->index_of_or_throw(FockBasisState::from_occupations(occ))) = a;
    }
  }
  return StateVector(sector, amp);
}

ControlField point_pair_k0(const LatticeGeometry& geometry) {
  require_sites(geometry, 2);
  CMatrix g = CMatrix::Zero(16, 16);
  add_rotation(g, kDownDown, kUpUp);
  ControlField k(geometry);
  k.set_g(0, 1, g);
  return k;
}

ControlField point_pair_ki(const LatticeGeometry& geometry, int i) {
  require_sites(geometry, i + 2);
  CMatrix g = CMatrix::Zero(16, 16);
  add_rotation(g, kEmptyUp, kUpEmpty);
  add_rotation(g, kEmptyDown, kDownEmpty);
  ControlField k(geometry);
  k.set_g(i, i + 1, g);
  return k;
}

ControlTrajectory build_point_pair_trajectory(const LatticeGeometry& geometry, int n) {
  check_n(n);
  require_sites(geometry, n + 1);
  std::vector<ControlField> ks = {point_pair_k0(geometry)};
  std::vector<double> angles = {M_PI / 4.0};
  for (int i = 1; i < n; ++i) {
    ks.push_back(point_pair_ki(geometry, i));
    angles.push_back(M_PI / 2.0);
  }
  return constant_speed(geometry, ks, angles);
}

ControlTrajectory build_extended_trajectory(const LatticeGeometry& geometry, int n, int r) {
  check_n(n);
  check_r(r);
  require_sites(geometry, n + r);
  std::vector<ControlField> ks = {point_pair_k0(geometry)};
  std::vector<double> angles = {M_PI / 4.0};
  for (int i = 1; i < n; ++i) {
    ks.push_back(point_pair_ki(geometry, i));
    angles.push_back(M_PI / 2.0);
  }
  for (int i = n; i < n + r - 1; ++i) {
    ks.push_back(point_pair_ki(geometry, i));
    const double ratio = static_cast<double>(n + r - i - 1) / static_cast<double>(n + r - i);
    angles.push_back(std::asin(std::sqrt(ratio)));
  }
  return constant_speed(geometry, ks, angles);
}

}  // namespace branchlab
