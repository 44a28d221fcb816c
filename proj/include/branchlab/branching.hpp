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


// Branch decompositions: the Q functional (weighted mean complexity plus b
// times the branch-weight entropy), the two-way split test, a structured
// search for Q-minimizing orthogonal decompositions, the late-time
// branch-and-pull-back construction, and Born-rule sampling.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "branchlab/complexity.hpp"
#include "branchlab/fock.hpp"
#include "branchlab/kernels.hpp"

namespace branchlab {

/// Complexity of a normalized state. Called concurrently from several
/// threads when the search runs in parallel.
using ComplexityOracle = std::function<double(const StateVector&)>;

/// schmidt_surrogate_complexity (two particles on a line).
ComplexityOracle surrogate_oracle();
/// Upper value of complexity_of_state with the given settings.
ComplexityOracle optimizer_oracle(StateComplexityConfig config);

struct SplitRecord {
  double parent_complexity = 0.0;
  double child_complexity[2] = {0.0, 0.0};
  double rho = 0.0;           // weight fraction of child 0 within the parent
  double gain = 0.0;          // parent - weighted children
  double threshold = 0.0;     // b times the binary entropy of rho
  std::string candidate;      // which family produced the split
};

struct BranchDecomposition {
  double b = 0.0;
  std::vector<StateVector> branches;   // unnormalized, summing to the parent
  std::vector<double> weights;         // <psi_i|psi_i>
  std::vector<double> complexities;    // of the normalized branches
  double mean_complexity = 0.0;        // sum w_i C_i
  double entropy = 0.0;                // -sum w_i ln w_i
  double q = 0.0;
  std::vector<SplitRecord> accepted_splits;
  int merges = 0;
};

/// Weights, complexities and Q for the given branches. Branches with zero
/// weight contribute nothing (w ln w -> 0).
BranchDecomposition make_decomposition(std::vector<StateVector> branches, double b,
                                       const ComplexityOracle& oracle);

/// sum w_i C_i - b sum w_i ln w_i over the decomposition's fields.
double q_value(const BranchDecomposition& d);

struct SplitGain {
  double gain = 0.0;
  double threshold = 0.0;
  bool splits = false;
};

/// gain = C - rho C0 - (1 - rho) C1, threshold = -b rho ln rho -
/// b (1 - rho) ln(1 - rho); splits iff gain > threshold. Requires 0 < rho < 1.
SplitGain split_gain(double parent, double child0, double child1, double rho, double b);

struct BranchSearchConfig {
  std::uint64_t seed = 1;
  int rotation_angles = 8;          // alpha grid on [0, pi/2] for pair rotations
  int rotation_pairs = 6;           // largest-amplitude basis states used for pairs
  int random_candidates = 0;        // seeded random rank-1 projections
  int product_candidates = 0;       // projections onto nearby product states
  bool exhaustive = false;          // all coordinate subsets of the support
  int exhaustive_support = 16;      // largest support for exhaustive mode
  int max_branches = 64;
  long sector_cap = 5000;
  double weight_floor = 1e-10;      // children lighter than this fraction are ignored
  /// Smallest drop of Q (weights normalized to the parent state) for which
  /// a split or merge is accepted.
  double q_tolerance = 1e-9;
  Execution exec = Execution::kParallel;
};

/// Recursive two-way splitting followed by merge re-tests; returns the
/// decomposition with the smallest Q found.
BranchDecomposition optimize_branches(const StateVector& psi, double b,
                                      const ComplexityOracle& oracle,
                                      const BranchSearchConfig& config = {});

struct BranchHistory {
  double t_in = 0.0;
  std::vector<double> schedule;                       // t_out values
  std::vector<BranchDecomposition> at_out;            // decomposition at each t_out
  std::vector<std::vector<StateVector>> pulled_back;  // branches mapped back to t_in
  bool stabilized = false;
  int stable_index = -1;                              // first index of the stable run
  std::string status;
};

/// For each t_out: evolve psi_in with exp(-i (t_out - t_in) H), decompose,
/// and pull every branch back with exp(+i (t_out - t_in) H). Stabilized
/// once two consecutive schedule points give the same branch count and
/// matched pulled-back branches differing by less than `tolerance`.
BranchHistory late_time_branch(const StateVector& psi_in, const CMatrix& h, double t_in,
                               const std::vector<double>& schedule, double b,
                               const ComplexityOracle& oracle,
                               const BranchSearchConfig& config = {}, double tolerance = 1e-6);

/// Index i drawn with probability w_i from a counter-based stream of `seed`.
/// Weights off unity by more than 1e-6 are renormalized with a warning on
/// stderr.
int sample_branch(const std::vector<double>& weights, std::uint64_t seed);
int sample_branch(const BranchDecomposition& d, std::uint64_t seed);

}  // namespace branchlab
