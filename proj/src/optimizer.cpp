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

// Geodesic search over piecewise-constant trajectories. Durations are fixed
// per run; the coefficients of every step (and optionally the product start
// orbitals) are optimized with L-BFGS on cost + mu (1 - F), followed by a
// pure fidelity polish and a direct feasibility check.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <ceres/ceres.h>

#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/product.hpp"

namespace branchlab {

namespace {

constexpr double kTwoRootTwo = 2.0 * M_SQRT2;

struct Problem {
  LatticeGeometry geometry;
  SectorPtr sector;
  EmbeddedBasis basis;
  CVector target;
  int params_per_step = 0;
  std::vector<double> dt;
  Execution exec = Execution::kParallel;
  // Fixed start, or orbital-parametrized start when `orbital_particles` > 0.
  CVector start;
  int orbital_particles = 0;

  int steps() const { return static_cast<int>(dt.size()); }
  int field_params() const { return steps() * params_per_step; }
  int orbital_params_per_particle() const { return 2 * geometry.sites() + 4; }
  int total_params() const {
    return field_params() + orbital_particles * orbital_params_per_particle();
  }
};

CMatrix assemble(const Problem& p, const double* c) {
  const int d = p.sector->dim();
  CMatrix h = CMatrix::Zero(d, d);
  for (int m = 0; m < p.params_per_step; ++m) {
    if (c[m] == 0.0) continue;
    for (const auto& e : p.basis.elements[m]) h(e.row, e.col) += c[m] * e.value;
  }
  return h;
}

// Orbital layout per particle: Re p (L), Im p (L), Re s (2), Im s (2).
std::vector<Orbital> unpack_orbitals(const Problem& p, const double* q) {
  const int sites = p.geometry.sites();
  std::vector<Orbital> orbs(p.orbital_particles);
  for (int k = 0; k < p.orbital_particles; ++k) {
    const double* o = q + k * p.orbital_params_per_particle();
    orbs[k].position = CVector(sites);
    for (int x = 0; x < sites; ++x) orbs[k].position(x) = Complex(o[x], o[sites + x]);
    for (int i = 0; i < 2; ++i) orbs[k].spin(i) = Complex(o[2 * sites + i], o[2 * sites + 2 + i]);
  }
  return orbs;
}

void pack_orbitals(const Problem& p, const std::vector<Orbital>& orbs, double* q) {
  const int sites = p.geometry.sites();
  for (int k = 0; k < p.orbital_particles; ++k) {
    double* o = q + k * p.orbital_params_per_particle();
    for (int x = 0; x < sites; ++x) {
      o[x] = orbs[k].position(x).real();
      o[sites + x] = orbs[k].position(x).imag();
    }
    for (int i = 0; i < 2; ++i) {
      o[2 * sites + i] = orbs[k].spin(i).real();
      o[2 * sites + 2 + i] = orbs[k].spin(i).imag();
    }
  }
}

CVector unnormalized_product(const Problem& p, const std::vector<Orbital>& orbs) {
  StateVector psi = StateVector::vacuum(p.geometry);
  for (const auto& o : orbs) psi = apply_orbital_creation(psi, o);
  return psi.amplitudes();
}

struct Evaluation {
  double objective = 0.0;
  double fidelity = 0.0;  // |<target|U start>|^2
  double cost = 0.0;
};

// Objective weight_cost * sum dt sqrt(|c|^2 + eps^2) + mu (1 - F).
Evaluation evaluate(const Problem& p, const double* x, double* grad, double weight_cost,
                    double mu, double eps) {
  const int steps = p.steps();
  const int np = p.params_per_step;
  Evaluation ev;

  CVector psi;
  double start_norm = 1.0;
  std::vector<Orbital> orbs;
  if (p.orbital_particles > 0) {
    orbs = unpack_orbitals(p, x + p.field_params());
    psi = unnormalized_product(p, orbs);
    start_norm = psi.norm();
    if (!(start_norm > 1e-8)) return {std::nan(""), 0.0, 0.0};
    psi /= start_norm;
  } else {
    psi = p.start;
  }
  const CVector psi_start = psi;

  std::vector<CVector> before(steps);
  std::vector<Eigen::VectorXd> evals(steps);
  std::vector<CMatrix> evecs(steps);
  for (int j = 0; j < steps; ++j) {
    const double* c = x + j * np;
    const double n2 = Eigen::Map<const Eigen::VectorXd>(c, np).squaredNorm();
    const double len = std::sqrt(n2 + eps * eps);
    ev.cost += p.dt[j] * std::sqrt(n2);
    ev.objective += weight_cost * p.dt[j] * len;
    if (grad)
      for (int m = 0; m < np; ++m) grad[j * np + m] = weight_cost * p.dt[j] * c[m] / len;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(assemble(p, c));
    evals[j] = es.eigenvalues();
    evecs[j] = es.eigenvectors();
    before[j] = psi;
    CVector t = evecs[j].adjoint() * psi;
    for (int a = 0; a < t.size(); ++a) t(a) *= std::exp(Complex(0.0, -p.dt[j] * evals[j](a)));
    psi = evecs[j] * t;
  }
  const Complex amp = p.target.dot(psi);
  ev.fidelity = std::norm(amp);
  ev.objective += mu * (1.0 - ev.fidelity);
  if (!grad) return ev;

  // Backward sweep: chi_j = U_{j+1}^dag ... U_S^dag target.
  CVector chi = p.target;
  for (int j = steps - 1; j >= 0; --j) {
    const double dt = p.dt[j];
    const CMatrix& v = evecs[j];
    const Eigen::VectorXd& lam = evals[j];
    const CVector chi_t = v.adjoint() * chi;
    const CVector psi_t = v.adjoint() * before[j];
    const int d = static_cast<int>(lam.size());
    CMatrix m(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const double half = 0.5 * dt * (lam(a) - lam(b));
        const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
        const Complex phi = std::exp(Complex(0.0, -0.5 * dt * (lam(a) + lam(b)))) *
                            Complex(0.0, -dt) * sinc;
        m(a, b) = std::conj(chi_t(a)) * phi * psi_t(b);
      }
    const CMatrix w = (2.0 * std::conj(amp)) * (v.conjugate() * m * v.transpose());
    const Eigen::VectorXd df = contract_elements(p.basis.elements, w, p.exec);
    for (int k = 0; k < np; ++k) grad[j * np + k] -= mu * df(k);
    CVector t = chi_t;
    for (int a = 0; a < d; ++a) t(a) *= std::exp(Complex(0.0, dt * lam(a)));
    chi = v * t;
  }

  if (p.orbital_particles > 0) {
    // Multilinear in the orbitals: each partial derivative of the unnormalized
    // product replaces one orbital by a unit position or spin vector.
    const int sites = p.geometry.sites();
    const Complex sc = 2.0 * std::conj(amp);
    for (int k = 0; k < p.orbital_particles; ++k) {
      double* g = grad + p.field_params() + k * p.orbital_params_per_particle();
      // d amp for unit real and imaginary steps of one parameter.
      auto partial = [&](const Orbital& replacement, double* g_re, double* g_im) {
        std::vector<Orbital> o = orbs;
        o[k] = replacement;
        const CVector dv = unnormalized_product(p, o) / start_norm;
        for (int part = 0; part < 2; ++part) {
          const CVector step = part == 0 ? dv : CVector(Complex(0.0, 1.0) * dv);
          const CVector dpsi = step - psi_start * psi_start.dot(step).real();
          const double d = -mu * (sc * chi.dot(dpsi)).real();
          *(part == 0 ? g_re : g_im) = d;
        }
      };
      for (int xs = 0; xs < sites; ++xs) {
        Orbital r{CVector::Zero(sites), orbs[k].spin};
        r.position(xs) = 1.0;
        partial(r, &g[xs], &g[sites + xs]);
      }
      for (int i = 0; i < 2; ++i) {
        Orbital r{orbs[k].position, Eigen::Vector2cd::Zero()};
        r.spin(i) = 1.0;
        partial(r, &g[2 * sites + i], &g[2 * sites + 2 + i]);
      }
    }
  }
  return ev;
}

class Objective : public ceres::FirstOrderFunction {
 public:
  Objective(std::shared_ptr<const Problem> p, double weight_cost, double mu, double eps)
      : p_(std::move(p)), weight_cost_(weight_cost), mu_(mu), eps_(eps) {}

  bool Evaluate(const double* x, double* value, double* grad) const override {
    const Evaluation ev = evaluate(*p_, x, grad, weight_cost_, mu_, eps_);
    if (!std::isfinite(ev.objective)) return false;
    *value = ev.objective;
    return true;
  }
  int NumParameters() const override { return p_->total_params(); }

 private:
  std::shared_ptr<const Problem> p_;
  double weight_cost_;
  double mu_;
  double eps_;
};

void minimize(const std::shared_ptr<const Problem>& p, std::vector<double>& x, double weight_cost,
              double mu, double eps, int max_iterations, bool tight) {
  ceres::GradientProblem problem(new Objective(p, weight_cost, mu, eps));
  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::LBFGS;
  opts.max_num_iterations = max_iterations;
  opts.logging_type = ceres::SILENT;
  if (tight) {
    opts.function_tolerance = 1e-16;
    opts.gradient_tolerance = 1e-15;
    opts.parameter_tolerance = 1e-16;
  }
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(opts, problem, x.data(), &summary);
}

ControlTrajectory to_trajectory(const Problem& p, const std::vector<double>& x) {
  ControlTrajectory traj(p.geometry);
  for (int j = 0; j < p.steps(); ++j) {
    const Eigen::VectorXd c =
        Eigen::Map<const Eigen::VectorXd>(x.data() + j * p.params_per_step, p.params_per_step);
    traj.add_step(p.dt[j], ControlField::from_coefficients(p.geometry, c));
  }
  return traj;
}

struct Candidate {
  ControlTrajectory trajectory;
  StateVector start;
  double infidelity;
  double cost;
};

// Optionally maximizes fidelity first, then runs the penalty schedule (weights
// in units of the path cost at that point) and the fidelity polish; returns
// the directly checked result. Starting the penalty stages from a nearly
// feasible path keeps the zero-field point from absorbing the run.
Candidate run_from(const std::shared_ptr<Problem>& p, std::vector<double> x,
                   const OptimizerConfig& cfg, const StateVector& target, bool fidelity_first) {
  if (fidelity_first) minimize(p, x, 0.0, 1.0, cfg.smoothing, cfg.max_iterations, false);
  const double scale =
      std::max(1e-3, evaluate(*p, x.data(), nullptr, 0.0, 0.0, 0.0).cost);
  for (double mu : cfg.penalty_schedule)
    minimize(p, x, 1.0, mu * scale, cfg.smoothing, cfg.max_iterations, false);
  minimize(p, x, 0.0, 1.0, cfg.smoothing, std::max(500, cfg.max_iterations), true);

  StateVector start = p->orbital_particles > 0
                          ? build_product_state(p->geometry, unpack_orbitals(*p, x.data() + p->field_params()))
                          : StateVector(p->sector, p->start, true);
  ControlTrajectory traj = to_trajectory(*p, x);
  const StateVector end = evolve(traj, start);
  const double infid = 1.0 - std::abs(target.normalized().inner(end));
  const double c = cost(traj);
  return {std::move(traj), std::move(start), infid, c};
}

// Subdivide a normalized warm trajectory into roughly `steps` equal pieces.
void warm_layout(const ControlTrajectory& warm, int steps, std::vector<double>& dt,
                 std::vector<double>& x, int np) {
  const ControlTrajectory w = warm.normalized_duration();
  dt.clear();
  x.clear();
  for (const auto& s : w.steps()) {
    const int q = std::max(1, static_cast<int>(std::lround(steps * s.dt)));
    const Eigen::VectorXd c = s.k.coefficients();
    for (int i = 0; i < q; ++i) {
      dt.push_back(s.dt / q);
      x.insert(x.end(), c.data(), c.data() + np);
    }
  }
}

void check_sector(const StateVector& psi, const OptimizerConfig& cfg) {
  if (psi.dim() > cfg.sector_cap)
    throw CapExceededError("sector dimension exceeds the optimizer cap", psi.dim(), cfg.sector_cap);
}

int default_steps(const LatticeGeometry& g, const OptimizerConfig& cfg) {
  return cfg.steps > 0 ? cfg.steps : std::max(1, 4 * (g.sites() - 1));
}

std::string describe_failure(double infid, double c) {
  std::ostringstream os;
  os << "no restart reached the target (best infidelity " << infid << ", cost " << c << ")";
  return os.str();
}

bool one_d_pair(const StateVector& a) { return a.particles() == 2 && a.geometry().dims() == 1; }

}  // namespace

double spectral_arc_lower_bound(const StateVector& target, const StateVector& start) {
  if (!one_d_pair(target) || !one_d_pair(start) || target.geometry() != start.geometry())
    throw DomainError("spectral arc bound needs two-particle states on the same 1-D lattice");
  const StateVector a = target.normalized();
  const StateVector b = start.normalized();
  double total = 0.0;
  for (int p = 0; p + 1 < a.geometry().sites(); ++p)
    total += arc_distance(schmidt_spectrum(a, p).values, schmidt_spectrum(b, p).values);
  return total / kTwoRootTwo;
}

ComplexityEstimate optimize_complexity(const StateVector& target, const StateVector& start,
                                       const OptimizerConfig& config) {
  if (target.geometry() != start.geometry())
    throw DomainError("start and target live on different lattices");
  if (target.particles() != start.particles())
    throw DomainError("start and target have different particle numbers");
  check_sector(target, config);
  if (target.norm() == 0.0 || start.norm() == 0.0) throw DomainError("zero state");

  const StateVector t = target.normalized();
  const StateVector s = start.normalized();
  ComplexityEstimate est;
  est.start = StateVector(s.sector(), s.amplitudes(), start.product_certificate());
  if (one_d_pair(t)) {
    est.lower = spectral_arc_lower_bound(t, s);
    est.lower_method = "spectral-arc";
  } else {
    est.lower_method = "trivial";
  }

  if (1.0 - t.overlap_modulus(s) <= config.feasibility_tol) {
    est.upper = 0.0;
    est.upper_method = "identity";
    est.witness = ControlTrajectory(t.geometry());
    est.infidelity = 1.0 - t.overlap_modulus(s);
    est.audit_lower = 0.0;
    return est;
  }

  auto p = std::make_shared<Problem>(Problem{t.geometry(), t.sector(), embed_basis(t.sector()),
                                             t.amplitudes(),
                                             ControlField::parameter_count(t.geometry()),
                                             {}, config.exec, s.amplitudes(), 0});
  const int steps = default_steps(t.geometry(), config);
  const int np = p->params_per_step;

  std::optional<Candidate> best;
  Candidate closest{ControlTrajectory(t.geometry()), s, 1.0, 0.0};
  auto consider = [&](Candidate c) {
    if (c.infidelity <= config.feasibility_tol) {
      ++est.feasible_restarts;
      if (!best || c.cost < best->cost) best = std::move(c);
    } else if (c.infidelity < closest.infidelity) {
      closest = std::move(c);
    }
  };

  for (const auto& warm : config.warm_starts) {
    if (warm.geometry() != t.geometry()) throw DomainError("warm start on a different lattice");
    const double infid = 1.0 - t.overlap_modulus(evolve(warm, s));
    if (infid <= config.feasibility_tol) consider({warm, s, infid, cost(warm)});
    std::vector<double> x;
    warm_layout(warm, steps, p->dt, x, np);
    consider(run_from(p, std::move(x), config, t, false));
  }

  for (int r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> normal(0.0, config.init_scale / std::sqrt(double(np)));
    p->dt.assign(steps, 1.0 / steps);
    std::vector<double> x(static_cast<std::size_t>(steps) * np);
    for (double& v : x) v = normal(rng);
    consider(run_from(p, std::move(x), config, t, true));
  }

  if (!best) throw NonConvergenceError(describe_failure(closest.infidelity, closest.cost));

  est.upper = best->cost;
  est.upper_method = "optimizer";
  est.infidelity = best->infidelity;
  if (one_d_pair(t)) {
    try {
      est.audit_lower = angle_audit(best->trajectory, s).lower_bound;
    } catch (const ToleranceError&) {
      est.audit_lower = std::nan("");
    }
  }
  est.witness = std::move(best->trajectory);
  if (est.lower > est.upper + 1e-9) {
    std::ostringstream os;
    os << "lower bound " << est.lower << " exceeds the optimized cost " << est.upper;
    throw ToleranceError(os.str());
  }
  return est;
}

ComplexityEstimate complexity_of_state(const StateVector& psi, const StateComplexityConfig& config) {
  if (psi.norm() == 0.0) throw DomainError("zero state");
  const StateVector u = psi.normalized();
  const OptimizerConfig& oc = config.optimizer;
  check_sector(u, oc);

  ComplexityEstimate est;
  if (one_d_pair(u)) {
    est.lower = schmidt_surrogate_complexity(u);
    est.lower_method = "schmidt-premise";
  } else {
    est.lower_method = "trivial";
  }
  if (psi.product_certificate() || is_product_state(u)) {
    est.lower = 0.0;
    est.upper = 0.0;
    est.upper_method = "product";
    est.start = StateVector(u.sector(), u.amplitudes(), true);
    est.witness = ControlTrajectory(u.geometry());
    est.infidelity = 0.0;
    return est;
  }

  std::optional<ComplexityEstimate> best;
  auto keep = [&](ComplexityEstimate e) {
    if (!best || e.upper < best->upper) best = std::move(e);
  };

  // Fixed starts with their trajectories.
  for (const auto& [start, traj] : config.warm_starts) {
    OptimizerConfig c = oc;
    c.warm_starts = {traj};
    c.restarts = 0;
    try {
      keep(optimize_complexity(u, start, c));
    } catch (const NonConvergenceError&) {
    }
  }

  // Each candidate start: fixed-start search, then a joint polish of the
  // start orbitals and the best trajectory found.
  const int steps = default_steps(u.geometry(), oc);
  auto p = std::make_shared<Problem>(Problem{u.geometry(), u.sector(), embed_basis(u.sector()),
                                             u.amplitudes(),
                                             ControlField::parameter_count(u.geometry()), {},
                                             oc.exec, CVector(), u.particles()});
  const int np = p->params_per_step;
  int feasible = 0;
  const auto orbital_sets = nearby_product_orbitals(u, config.product_candidates);
  const int per_set = orbital_sets.empty()
                          ? 0
                          : std::max<int>(1, (oc.restarts + orbital_sets.size() - 1) /
                                                 orbital_sets.size());
  std::string failures;
  for (std::size_t set = 0; set < orbital_sets.size(); ++set) {
    const auto& orbs = orbital_sets[set];
    OptimizerConfig c = oc;
    c.restarts = per_set;
    c.warm_starts.clear();
    c.seed = derive_seed(oc.seed, set);
    ComplexityEstimate fixed;
    try {
      fixed = optimize_complexity(u, build_product_state(u.geometry(), orbs), c);
    } catch (const NonConvergenceError& e) {
      failures = e.what();
      continue;
    }
    std::vector<double> x;
    warm_layout(*fixed.witness, steps, p->dt, x, np);
    x.resize(p->total_params());
    pack_orbitals(*p, orbs, x.data() + p->field_params());
    keep(std::move(fixed));
    Candidate joint = run_from(p, std::move(x), oc, u, false);
    if (joint.infidelity > oc.feasibility_tol) continue;
    ++feasible;
    ComplexityEstimate e;
    e.upper = joint.cost;
    e.upper_method = "optimizer";
    e.infidelity = joint.infidelity;
    e.start = joint.start;
    e.witness = joint.trajectory;
    keep(std::move(e));
  }

  if (!best) throw NonConvergenceError(failures.empty() ? "no candidate product start" : failures);
  best->lower = est.lower;
  best->lower_method = est.lower_method;
  best->feasible_restarts += feasible;
  if (one_d_pair(u) && best->start && best->witness) {
    try {
      best->audit_lower = angle_audit(*best->witness, *best->start).lower_bound;
    } catch (const ToleranceError&) {
      best->audit_lower = std::nan("");
    }
  }
  return *best;
}

}  // namespace branchlab
