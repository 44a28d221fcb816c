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


#include <gtest/gtest.h>

#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"

namespace branchlab {
namespace {

StateVector down_pair_start(const LatticeGeometry& g) {
  std::vector<LocalState> occ(g.sites(), LocalState::kEmpty);
  occ[0] = occ[1] = LocalState::kDown;
  const auto s = StateVector::from_occupations(g, occ);
  return StateVector(s.sector(), s.amplitudes(), true);
}

OptimizerConfig quick(int restarts = 4) {
  OptimizerConfig c;
  c.restarts = restarts;
  c.seed = 11;
  return c;
}

TEST(Optimizer, SandwichForSeparatedPair) {
  const auto g = LatticeGeometry::line(3);
  const auto target = omega_state(g, 2);
  const auto start = point_pair_start_state(g);
  const auto est = optimize_complexity(target, start, quick());
  EXPECT_EQ(est.lower_method, "spectral-arc");
  EXPECT_GE(est.lower, lower_bound_point_pair(2) - 1e-12);
  EXPECT_LE(est.lower, est.upper);
  EXPECT_LE(est.upper, upper_bound_point_pair(2) + 1e-6);
  ASSERT_TRUE(est.witness);
  EXPECT_NEAR(cost(*est.witness), est.upper, 1e-12);
  EXPECT_GE(target.overlap_modulus(evolve(*est.witness, start)), 1.0 - 1e-9);
  EXPECT_GE(est.feasible_restarts, 1);
  if (!std::isnan(est.audit_lower)) {
    EXPECT_LE(est.audit_lower, est.upper + 1e-9);
  }
}

TEST(Optimizer, SameSeedSameResult) {
  const auto g = LatticeGeometry::line(3);
  const auto a = optimize_complexity(omega_state(g, 2), point_pair_start_state(g), quick(2));
  const auto b = optimize_complexity(omega_state(g, 2), point_pair_start_state(g), quick(2));
  EXPECT_EQ(a.upper, b.upper);
}

TEST(Optimizer, SpinRelabelInvariance) {
  // Flipping every spin maps omega to itself and |1 1> to |-1 -1>.
  const auto g = LatticeGeometry::line(3);
  const auto target = omega_state(g, 2);
  const auto up = optimize_complexity(target, point_pair_start_state(g), quick(6));
  const auto down = optimize_complexity(target, down_pair_start(g), quick(6));
  EXPECT_NEAR(up.lower, down.lower, 1e-12);
  EXPECT_NEAR(up.upper, down.upper, 0.02 * up.upper);
}

TEST(Optimizer, IdenticalStatesCostNothing) {
  const auto g = LatticeGeometry::line(3);
  const auto s = point_pair_start_state(g);
  const auto est = optimize_complexity(s, s.scaled(Complex(0.0, 1.0)), quick());
  EXPECT_EQ(est.upper, 0.0);
  EXPECT_EQ(est.upper_method, "identity");
}

TEST(Optimizer, ErrorsAreTyped) {
  const auto g = LatticeGeometry::line(3);
  const auto target = omega_state(g, 2);
  EXPECT_THROW(optimize_complexity(target, StateVector::from_occupations(
                                               g, {LocalState::kUp, LocalState::kEmpty,
                                                   LocalState::kEmpty})),
               DomainError);
  OptimizerConfig capped = quick();
  capped.sector_cap = 10;
  EXPECT_THROW(optimize_complexity(target, point_pair_start_state(g), capped), CapExceededError);
  OptimizerConfig none = quick(0);
  EXPECT_THROW(optimize_complexity(target, point_pair_start_state(g), none), NonConvergenceError);
}

TEST(StateComplexity, ProductStatesAreFree) {
  const auto g = LatticeGeometry::line(3);
  const auto est = complexity_of_state(point_pair_start_state(g));
  EXPECT_EQ(est.upper, 0.0);
  EXPECT_EQ(est.lower, 0.0);
}

TEST(StateComplexity, SeparatedPairIsBracketed) {
  const auto g = LatticeGeometry::line(3);
  const auto psi = omega_state(g, 2);
  StateComplexityConfig cfg;
  cfg.optimizer = quick();
  const auto est = complexity_of_state(psi, cfg);
  EXPECT_EQ(est.lower_method, "schmidt-premise");
  EXPECT_NEAR(est.lower, schmidt_surrogate_complexity(psi), 1e-14);
  EXPECT_LE(est.lower, est.upper);
  ASSERT_TRUE(est.witness && est.start);
  EXPECT_TRUE(is_product_state(*est.start));
  EXPECT_GE(psi.overlap_modulus(evolve(*est.witness, *est.start)), 1.0 - 1e-9);
  // never worse than the fixed-start estimate from |1>_0 |1>_1
  EXPECT_LE(est.upper, optimize_complexity(psi, point_pair_start_state(g), quick()).upper + 1e-9);
}

}  // namespace
}  // namespace branchlab
