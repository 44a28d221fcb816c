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

#include <cmath>

#include "branchlab/branching.hpp"
#include "branchlab/errors.hpp"

namespace branchlab {
namespace {

// Two particles on sites 2, 3 with equal spins, (|1 1> + |-1 -1>) / sqrt 2.
StateVector aligned_pair(const LatticeGeometry& g) {
  auto sec = enumerate_sector(g, 2);
  CVector a = CVector::Zero(sec->dim());
  for (auto s : {LocalState::kUp, LocalState::kDown}) {
    std::vector<LocalState> occ(g.sites(), LocalState::kEmpty);
    occ[2] = occ[3] = s;
    a(sec->index_of_or_throw(FockBasisState::from_occupations(occ))) = M_SQRT1_2;
  }
  return StateVector(sec, a);
}

// Spin-independent nearest-neighbor hopping on every bond.
CMatrix hopping(const SectorPtr& sec) {
  const auto& g = sec->geometry();
  ControlField k(g);
  for (auto [x, y] : g.neighbor_pairs()) {
    CMatrix h = CMatrix::Zero(16, 16);
    for (int s : {1, 2}) h(s, 4 * s) = h(4 * s, s) = 1.0;
    k.set_g(x, y, h);
  }
  return embed(k, *sec);
}

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

TEST(SplitGain, ThresholdPeaksAtEqualWeights) {
  const double b = 0.37;
  EXPECT_NEAR(split_gain(1.0, 0.0, 0.0, 0.5, b).threshold, b * std::log(2.0), 1e-12);
  for (int i = 1; i < 100; ++i) {
    const double rho = i / 100.0;
    const auto s = split_gain(1.0, 0.2, 0.4, rho, b);
    EXPECT_NEAR(s.threshold, b * binary_entropy(rho), 1e-14);
    EXPECT_LE(s.threshold, b * std::log(2.0) + 1e-15);
    EXPECT_NEAR(s.gain, 1.0 - rho * 0.2 - (1 - rho) * 0.4, 1e-15);
    EXPECT_EQ(s.splits, s.gain > s.threshold);
  }
  EXPECT_THROW(split_gain(1.0, 0.0, 0.0, 0.0, b), DomainError);
  EXPECT_THROW(split_gain(1.0, 0.0, 0.0, 1.0, b), DomainError);
}

TEST(Decomposition, QValueBookkeeping) {
  const auto g = LatticeGeometry::line(4);
  const auto psi = omega_state(g, 2);
  const auto oracle = surrogate_oracle();
  const auto whole = make_decomposition({psi}, 0.3, oracle);
  EXPECT_NEAR(whole.q, oracle(psi), 1e-14);
  EXPECT_NEAR(whole.entropy, 0.0, 1e-15);
  const auto a = psi.scaled(0.6), b = psi.scaled(0.8);
  const auto split = make_decomposition({a, b}, 0.3, oracle);
  const double w0 = 0.36, w1 = 0.64;
  EXPECT_NEAR(split.entropy, -w0 * std::log(w0) - w1 * std::log(w1), 1e-14);
  EXPECT_NEAR(split.q, q_value(split), 1e-14);
  EXPECT_NEAR(split.q, oracle(psi) + 0.3 * split.entropy, 1e-12);
}

TEST(Branching, ProductStateNeverSplits) {
  const auto g = LatticeGeometry::line(5);
  const auto psi = point_pair_start_state(g);
  for (double b : {0.0, 1e-6, 0.1, 10.0}) {
    const auto d = optimize_branches(psi, b, surrogate_oracle());
    EXPECT_EQ(d.branches.size(), 1u) << "b = " << b;
  }
}

TEST(Branching, SmallThresholdSplitsIntoProductHalves) {
  const auto g = LatticeGeometry::line(5);
  const auto psi = omega_state(g, 4);
  const auto d = optimize_branches(psi, 1e-6, surrogate_oracle());
  ASSERT_EQ(d.branches.size(), 2u);
  StateVector sum = d.branches[0];
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(d.weights[i], 0.5, 1e-12);
    EXPECT_TRUE(is_product_state(d.branches[i].normalized()));
    EXPECT_EQ(d.complexities[i], 0.0);
  }
  EXPECT_LT(std::abs(d.branches[0].inner(d.branches[1])), 1e-12);
  sum = sum + d.branches[1];
  EXPECT_LT((sum.amplitudes() - psi.amplitudes()).norm(), 1e-12);
}

TEST(Branching, LargeThresholdKeepsOneBranch) {
  const auto g = LatticeGeometry::line(5);
  const auto psi = omega_state(g, 4);
  const double c = schmidt_surrogate_complexity(psi);
  const auto d = optimize_branches(psi, 2.0 * c, surrogate_oracle());
  EXPECT_EQ(d.branches.size(), 1u);
  EXPECT_NEAR(d.q, c, 1e-12);
}

TEST(Branching, FirstEqualSplitSavesLittleMoreThanThreshold) {
  // Along omega(2), omega(3), omega(4) the equal split always yields product
  // halves. If omega(n-1) stays whole at some b, its complexity is at most
  // b ln 2, so the saving at omega(n) exceeds b ln 2 by at most the step in C.
  const auto g = LatticeGeometry::line(5);
  const auto oracle = surrogate_oracle();
  int checked = 0;
  for (int i = 2; i <= 20; ++i) {
    const double b = 0.1 * i;
    for (int n = 3; n <= 4; ++n) {
      const auto prev = optimize_branches(omega_state(g, n - 1), b, oracle);
      const auto cur = optimize_branches(omega_state(g, n), b, oracle);
      if (prev.branches.size() != 1 || cur.accepted_splits.empty()) continue;
      const auto& first = cur.accepted_splits.front();
      if (std::abs(first.rho - 0.5) > 1e-12) continue;
      const double step = oracle(omega_state(g, n)) - oracle(omega_state(g, n - 1));
      EXPECT_LE(first.gain - b * std::log(2.0), step + 1e-12) << "b = " << b << ", n = " << n;
      ++checked;
    }
  }
  EXPECT_GE(checked, 2);
}

TEST(Branching, SearchIsDeterministic) {
  const auto g = LatticeGeometry::line(5);
  const auto psi = omega_state(g, 3);
  BranchSearchConfig serial;
  serial.exec = Execution::kSerial;
  const auto a = optimize_branches(psi, 0.05, surrogate_oracle(), serial);
  const auto b = optimize_branches(psi, 0.05, surrogate_oracle());
  ASSERT_EQ(a.branches.size(), b.branches.size());
  EXPECT_EQ(a.q, b.q);
}

TEST(LateTime, PullbackStabilizes) {
  const auto g = LatticeGeometry::line(6);
  const auto psi = aligned_pair(g);
  const CMatrix h = hopping(psi.sector());
  std::vector<double> schedule;
  for (int i = 3; i <= 8; ++i) schedule.push_back(0.1 * i);
  const auto hist = late_time_branch(psi, h, 0.0, schedule, 0.5, surrogate_oracle());
  ASSERT_EQ(hist.at_out.size(), schedule.size());
  EXPECT_TRUE(hist.stabilized);
  EXPECT_EQ(hist.status, "stabilized");
  EXPECT_EQ(hist.stable_index, 0);
  const auto& last = hist.pulled_back.back();
  ASSERT_EQ(last.size(), 2u);
  // pulled-back branches are orthogonal and sum to the input state
  EXPECT_LT(std::abs(last[0].inner(last[1])), 1e-10);
  EXPECT_LT(((last[0] + last[1]).amplitudes() - psi.amplitudes()).norm(), 1e-10);
  for (const auto& br : last) EXPECT_NEAR(br.norm() * br.norm(), 0.5, 1e-10);
}

TEST(LateTime, RejectsBadInput) {
  const auto g = LatticeGeometry::line(6);
  const auto psi = aligned_pair(g);
  CMatrix h = hopping(psi.sector());
  EXPECT_THROW(late_time_branch(psi, h, 0.0, {0.5, 0.4}, 0.5, surrogate_oracle()), DomainError);
  h(0, 1) += 1.0;
  EXPECT_THROW(late_time_branch(psi, h, 0.0, {0.5}, 0.5, surrogate_oracle()), DomainError);
}

TEST(Sampling, FrequenciesFollowWeights) {
  const std::vector<double> w = {0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(4, 0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[sample_branch(w, derive_seed(5, i))];
  EXPECT_EQ(counts[1], 0);
  for (int i : {0, 2, 3}) {
    const double se = std::sqrt(w[i] * (1 - w[i]) / n);
    EXPECT_NEAR(counts[i] / static_cast<double>(n), w[i], 5 * se);
  }
  EXPECT_EQ(sample_branch(w, 99), sample_branch(w, 99));
  EXPECT_THROW(sample_branch(std::vector<double>{0.5, -0.1}, 1), DomainError);
  EXPECT_THROW(sample_branch(std::vector<double>{0.0, 0.0}, 1), DomainError);
}

}  // namespace
}  // namespace branchlab
