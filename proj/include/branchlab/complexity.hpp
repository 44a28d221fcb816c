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

// State complexity: piecewise-constant control trajectories, their cost,
// Schmidt-spectrum audits across lattice cuts, closed-form bounds for the
// separated-pair states, constructive trajectories and a numerical geodesic
// optimizer.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchlab/kernels.hpp"
#include "branchlab/opspace.hpp"

namespace branchlab {

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryStep {
  double dt;
  ControlField k;
};

/// Piecewise-constant k(t). Builders in this library normalize the total
/// duration to 1; the cost is invariant under time reparametrization.
class ControlTrajectory {
 public:
  explicit ControlTrajectory(LatticeGeometry geometry) : geometry_(std::move(geometry)) {}

  ControlTrajectory& add_step(double dt, ControlField k);

  const LatticeGeometry& geometry() const { return geometry_; }
  const std::vector<TrajectoryStep>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }
  double total_duration() const;

  /// Same path traversed `factor` times faster: fields scaled by factor,
  /// durations divided by it.
  ControlTrajectory reparametrized(double factor) const;
  /// Rescale time so that the durations sum to 1.
  ControlTrajectory normalized_duration() const;

 private:
  LatticeGeometry geometry_;
  std::vector<TrajectoryStep> steps_;
};

/// exp(-i dt H) for a fixed Hermitian H via its eigendecomposition.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const CMatrix& h);
  CVector apply(const CVector& psi, double dt) const;
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const CMatrix& eigenvectors() const { return evecs_; }

 private:
  Eigen::VectorXd evals_;
  CMatrix evecs_;
};

/// Applies exp(-i dt_j embed(k_j)) step by step.
StateVector evolve(const ControlTrajectory& traj, const StateVector& psi0);

/// sum_j dt_j ||k_j||.
double cost(const ControlTrajectory& traj);

// ---------------------------------------------------------------------------
// Schmidt spectra of two-particle states

/// Singular values across the cut between sites p and p+1 (left = sites <= p
/// in flattened order). Index 0 holds the (N_left, N_right) = (0, 2) block
/// norm, index 1 the (2, 0) block norm, indices >= 2 the (1, 1) singular
/// values in decreasing order.
struct SchmidtSpectrum {
  int cut = 0;
  Eigen::VectorXd values;
  std::vector<std::pair<int, int>> sectors;  // (N_left, N_right) per index
};

SchmidtSpectrum schmidt_spectrum(const StateVector& psi, int cut);

/// Geodesic angle between two spectra on the unit sphere (shorter vector is
/// zero padded).
double arc_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// First-order rates u_i = ds_i/dt of the spectrum at `cut` under
/// psi(t) = exp(-i t embed(k)) psi.
struct RotationRates {
  int cut = 0;
  Eigen::VectorXd spectrum;
  Eigen::VectorXd rates;
  double theta = 0.0;          // ||u||_2
  bool degenerate = false;     // some positive Schmidt values coincide
};

RotationRates rotation_rates(const StateVector& psi, const ControlField& k, int cut,
                             double degeneracy_tol = 1e-9);
/// Same rates for an already embedded sector Hamiltonian.
RotationRates rotation_rates(const StateVector& psi, const CMatrix& h, int cut,
                             double degeneracy_tol = 1e-9);

/// Rotation matrix r_ij = Im <phi_i chi_i| K |phi_j chi_j> in the Schmidt
/// product basis, so that u = r s when the spectrum is non-degenerate.
/// Positions follow SchmidtSpectrum indexing; entries for zero singular
/// values use the vectors returned by the SVD.
Eigen::MatrixXd rotation_matrix(const StateVector& psi, const ControlField& k, int cut);

struct RotationAudit {
  Eigen::VectorXd per_cut_integrals;   // int |theta_p| dt
  Eigen::VectorXd endpoint_arcs;       // arc(spectrum(0), spectrum(T)) per cut
  double total_angle = 0.0;            // sum_p int |theta_p| dt
  double lower_bound = 0.0;            // total_angle / (2 sqrt 2)
  double cost = 0.0;
  double max_bound_ratio = 0.0;        // max_t sum_p|theta_p| / (2 sqrt 2 ||k||)
  int evaluations = 0;
};

struct AuditOptions {
  int subintervals = 64;               // Simpson panels per step (even)
  double tolerance = 1e-6;             // endpoint consistency slack
};

/// Integrates |theta_p(t)| along the trajectory (1-D, two particles).
/// Throws ToleranceError if some cut integrates to less than its endpoint
/// arc, which signals too coarse a quadrature.
RotationAudit angle_audit(const ControlTrajectory& traj, const StateVector& psi0,
                          const AuditOptions& options = {});

// ---------------------------------------------------------------------------
// Closed-form bounds and constructive trajectories

double lower_bound_point_pair(int n);
/// (n - 1) pi + pi / (2 sqrt 2), the cost of the constructive trajectory.
double upper_bound_point_pair(int n);
/// (1/r) sum_{0<s<r} arcsin(sqrt(s / 2r)).
double kappa(long r);
/// int_0^1 arcsin(sqrt(x/2)) dx = 1/2.
double kappa_limit();
/// (1/r) sum_{0<s<r} arcsin(sqrt(s / (s+1))).
double lambda(long r);
double lower_bound_extended(int n, long r);
double upper_bound_extended(int n, long r);

/// |1>_0 |1>_1, the product start state of the constructive trajectories.
StateVector point_pair_start_state(const LatticeGeometry& geometry);
/// (|-1>_0|-1>_n + |1>_0|1>_n) / sqrt 2.
StateVector omega_state(const LatticeGeometry& geometry, int n);
/// Particle at 0 entangled with a particle spread uniformly over n .. n+r-1.
StateVector omega_prime_state(const LatticeGeometry& geometry, int n, int r);

/// Pair rotation k_0 on sites (0,1) between |-1,-1> and |1,1>.
ControlField point_pair_k0(const LatticeGeometry& geometry);
/// Hop generator k_i on sites (i, i+1) moving either spin from i to i+1.
ControlField point_pair_ki(const LatticeGeometry& geometry, int i);

ControlTrajectory build_point_pair_trajectory(const LatticeGeometry& geometry, int n);
ControlTrajectory build_extended_trajectory(const LatticeGeometry& geometry, int n, int r);

// ---------------------------------------------------------------------------
// Numerical estimates

struct OptimizerConfig {
  int steps = 0;                        // 0: 4 (L - 1)
  int restarts = 8;
  std::uint64_t seed = 1;
  int max_iterations = 200;             // per penalty stage
  /// Penalty weights on 1 - fidelity, in units of the path cost once the
  /// path first reaches the target.
  std::vector<double> penalty_schedule = {1.0, 10.0, 100.0, 1e3, 1e4};
  double smoothing = 1e-6;              // sqrt(|k|^2 + eps^2) in the cost
  double feasibility_tol = 1e-9;        // 1 - |<target|U|start>|
  double init_scale = 2.0;              // typical per-step field norm at start
  long sector_cap = 2000;
  /// Feasible (or nearly feasible) trajectories used as extra starts.
  std::vector<ControlTrajectory> warm_starts;
  Execution exec = Execution::kParallel;
};

struct ComplexityEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::optional<ControlTrajectory> witness;
  std::optional<StateVector> start;     // product state the witness starts from
  std::string lower_method;
  std::string upper_method;
  double audit_lower = std::numeric_limits<double>::quiet_NaN();
  double infidelity = std::numeric_limits<double>::quiet_NaN();
  int feasible_restarts = 0;
};

/// Sum over cuts of the endpoint spectrum arcs divided by 2 sqrt 2: a lower
/// bound on the cost of any trajectory joining the two states.
double spectral_arc_lower_bound(const StateVector& target, const StateVector& start);

/// Minimizes sum dt ||k|| over fixed-step trajectories joining start to
/// target up to phase. Throws DomainError on unequal particle number,
/// CapExceededError on oversized sectors and NonConvergenceError (with the
/// best infeasible result in the message) if no restart becomes feasible.
ComplexityEstimate optimize_complexity(const StateVector& target, const StateVector& start,
                                       const OptimizerConfig& config = {});

/// True if psi is (numerically) c^dag(p1 s1) ... c^dag(pn sn)|vac> with
/// position-spin product orbitals. Decided exactly for n <= 2; for n > 2 only
/// the product certificate is consulted.
bool is_product_state(const StateVector& psi, double tol = 1e-8);

/// Product states with large overlap with psi (natural orbitals, projected to
/// position-spin products), best first.
std::vector<StateVector> nearby_product_states(const StateVector& psi, int count);

/// Schmidt-premise surrogate: 0 on product states, otherwise
/// sum_p arccos(sqrt(s0^2 + s1^2 + s2^2)) / (2 sqrt 2) (two particles, 1-D).
double schmidt_surrogate_complexity(const StateVector& psi);

struct StateComplexityConfig {
  OptimizerConfig optimizer;
  int product_candidates = 3;
  /// Extra (product start, trajectory) pairs tried first.
  std::vector<std::pair<StateVector, ControlTrajectory>> warm_starts;
};

/// Distance from psi to the nearest product state: 0 for product states,
/// otherwise the best optimize_complexity over candidate product starts.
ComplexityEstimate complexity_of_state(const StateVector& psi,
                                       const StateComplexityConfig& config = {});

}  // namespace branchlab
