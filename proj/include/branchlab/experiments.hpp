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


// The two worked models: a Stern-Gerlach deflection of one member of an
// entangled pair, tracked on analytic Gaussian packet parameters, and a
// four-particle Bell experiment with replica ensembles.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "branchlab/fock.hpp"
#include "branchlab/kernels.hpp"

namespace branchlab {

// ---------------------------------------------------------------------------
// Free Gaussian packets (hbar = 1)

/// Free Gaussian packet in one or two dimensions: position density with
/// standard deviation d at t = 0 and mean z_in, momentum k.
struct GaussianPacket {
  Eigen::VectorXd k;
  Eigen::VectorXd z_in;
  double d = 1.0;
  double m = 1.0;

  int dims() const { return static_cast<int>(k.size()); }
  /// k t / m + z_in.
  Eigen::VectorXd mean(double t) const;
  /// Per-axis standard deviation sqrt(t^2 / (4 d^2 m^2) + d^2).
  double dispersion(double t) const;
  /// Wave function at position z and time t (normalized on R^dims).
  Complex amplitude(const Eigen::VectorXd& z, double t) const;
};

GaussianPacket make_packet(std::vector<double> k, std::vector<double> z_in, double d, double m);

// ---------------------------------------------------------------------------
// Stern-Gerlach

struct SternGerlachConfig {
  double q = 1.0;        // initial x momentum magnitude
  double w = 10.0;       // initial x offset
  double d = 1.0;        // initial dispersion
  double m = 1.0;
  double r = 1.0;        // y impulse delivered at t1
  double t1 = 1.0;
  double t_in = 0.0;
  double b = 1.0;        // branching threshold, complexity units
  double a = 0.1;        // lattice spacing for the complexity surrogate
  std::vector<double> schedule;  // t_out values; empty: 64 points spaced m / (2 r) after t1
};

/// One term of the two-term state: a spin configuration of the pair and the
/// packet of each particle.
struct PacketBranch {
  double amplitude = 0.0;        // +-1/sqrt(2)
  double weight = 0.0;
  std::array<int, 2> spins{};    // +1 / -1 for particles 0 and 1
  std::array<GaussianPacket, 2> packets;
};

struct SternGerlachSample {
  double t = 0.0;
  double separation = 0.0;             // y distance of the two components of particle 0
  double separation_dispersion = 0.0;  // sqrt(2) d(t)
  double effective_separation = 0.0;   // max(0, separation - separation_dispersion)
  double surrogate = 0.0;              // (effective / a) pi / (8 sqrt 2)
  bool exceeds_b = false;              // surrogate > b
  bool q_split = false;                // surrogate > b ln 2 (Q drops on splitting)
};

struct SternGerlachReport {
  bool separates = false;              // separation_condition(r, d)
  std::vector<SternGerlachSample> samples;
  std::optional<double> branching_time;  // first t_out with surrogate > b
  std::string outcome;                 // "two branches" or "no branching"
  std::vector<PacketBranch> final_branches;     // at the last t_out
  std::vector<PacketBranch> pulled_back;        // at t_in
};

/// r > 1 / (2 sqrt 2 d).
bool separation_condition(double r, double d);

/// The entangled pair after the impulse, as two packet branches.
std::vector<PacketBranch> stern_gerlach_terms(const SternGerlachConfig& config);

SternGerlachReport stern_gerlach_run(const SternGerlachConfig& config);

// ---------------------------------------------------------------------------
// Bell experiment

enum class BellOutcome { kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3 };

struct BellBranch {
  std::string label;                       // "uu", "ud", "du", "dd"
  double weight = 0.0;
  std::array<Eigen::Vector2d, 4> spins;    // spin wave function per particle
  std::array<GaussianPacket, 4> packets;
  Eigen::VectorXcd spin_state;             // 16 components, eta * psi_{e0 e1}
};

struct BellGeometry {
  double q = 1.0;
  double w = 10.0;
  double d = 1.0;
  double m = 1.0;
};

struct BellSingle {
  std::array<BellBranch, 4> branches;      // order uu, ud, du, dd
  double weight_sum = 0.0;
  double max_overlap = 0.0;                // max |<i|j>| over i != j
};

/// Four weighted branches (1/2 sin^2, 1/2 cos^2, 1/2 cos^2, 1/2 sin^2 of
/// theta/2). Throws DomainError unless 0 <= theta <= pi.
BellSingle bell_single(double theta, const BellGeometry& geometry = {});

struct BellConfig {
  double theta = 0.0;
  long replicas = 10000;
  std::uint64_t seed = 1;
  Execution exec = Execution::kParallel;
  bool keep_outcomes = false;
};

struct BellEnsemble {
  long replicas = 0;
  long agree = 0;
  long disagree = 0;
  double correlation = 0.0;                // (1/N) sum (a_i - d_i)
  double standard_error = 0.0;             // 2 sqrt(p (1 - p) / N)
  double expected = 0.0;                   // -cos theta
  std::vector<BellOutcome> outcomes;       // per replica if requested
};

/// Replica i draws its outcome from the stream derive_seed(seed, i), so the
/// result does not depend on the thread count.
BellEnsemble bell_ensemble(const BellConfig& config);

struct BellExact {
  double total_weight = 0.0;
  double mean = 0.0;       // exact E[(1/N) sum (a_i - d_i)]
  double variance = 0.0;
};

/// Enumerates all 4^N branches of N replicas (N <= 8).
BellExact bell_exhaustive(double theta, int replicas);

struct BellStateCheck {
  int sites = 0;
  int dim = 0;
  std::array<double, 4> weights{};         // uu, ud, du, dd from the lattice state
  std::array<double, 4> expected{};        // from bell_single
  double max_weight_error = 0.0;
  double norm_after = 0.0;
  double max_spin_error = 0.0;             // branch spin states vs. psi_{e0 e1}
};

/// Lattice realization on 6 sites: particles 3, 1, 0, 2 on sites 1..4. The
/// collisions are unitary record transfers controlled by the analyzer spin
/// components (particle 2 moves 4 -> 5 if particle 0 is along analyzer 0,
/// particle 3 moves 1 -> 0 if particle 1 is along analyzer 1). Analyzer 0
/// points at angle alpha0, analyzer 1 at alpha0 + theta.
BellStateCheck bell_state_check(double theta, double alpha0 = 0.0);

}  // namespace branchlab
