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


#include "branchlab/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "branchlab/branching.hpp"
#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/experiments.hpp"
#include "branchlab/opspace.hpp"

namespace branchlab::cli {

namespace {

// JSON has no NaN or infinity; emit null so documents round-trip.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json vec(const Eigen::VectorXd& v) { return vec(std::vector<double>(v.data(), v.data() + v.size())); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const std::vector<std::pair<std::string, std::string>> kSubcommands = {
    {"complexity", "optimize the cost of reaching a separated pair state"},
    {"bounds", "closed-form and constructive complexity bounds"},
    {"branch", "branch decomposition minimizing Q"},
    {"lie-closure", "dimension of the Lie algebra generated by the control space"},
    {"stern-gerlach", "Stern-Gerlach deflection on Gaussian packets"},
    {"bell", "Bell experiment replica ensemble"},
};

void build_app(CLI::App& app, RunConfig& c) {
  app.set_config("--config", "", "flat key = value file; flags take precedence");
  app.require_subcommand(1, 1);
  app.add_option("--sites", c.sites, "lattice sites (0: smallest that fits)");
  app.add_option("--n", c.n, "separation of the pair");
  app.add_option("--r", c.r, "extended width (bounds, complexity, branch) or impulse (stern-gerlach)");
  app.add_option("--theta", c.theta, "analyzer angle in radians");
  app.add_option("--b", c.b, "branching threshold");
  app.add_option("--replicas", c.replicas, "Bell replicas");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--steps", c.steps, "trajectory steps (0: 4 (L - 1))");
  app.add_option("--restarts", c.restarts, "optimizer restarts");
  app.add_option("--mode", c.mode, "point-pair or extended")
      ->check(CLI::IsMember({"point-pair", "extended"}));
  app.add_option("--state", c.state, "branch target: omega, omega-prime or product")
      ->check(CLI::IsMember({"omega", "omega-prime", "product"}));
  app.add_option("--oracle", c.oracle, "branch complexity oracle: surrogate or optimizer")
      ->check(CLI::IsMember({"surrogate", "optimizer"}));
  app.add_option("--q", c.q, "packet momentum");
  app.add_option("--w", c.w, "packet offset");
  app.add_option("--d", c.d, "packet width");
  app.add_option("--m", c.m, "mass");
  app.add_option("--t1", c.t1, "impulse time");
  app.add_option("--a", c.a, "lattice spacing for the packet complexity surrogate");
  app.add_option("--sector-cap", c.sector_cap, "largest sector dimension");
  app.add_option("--closure-cap", c.closure_cap, "largest Lie closure real dimension");
  app.add_option("--out", c.out, "result document path (default: stdout)");
  app.add_option("--table", c.table, "CSV table path");
  for (const auto& [name, desc] : kSubcommands) app.add_subcommand(name, desc)->fallthrough();
}

int require_int(double x, const char* what) {
  if (x != std::floor(x)) throw DomainError(std::string(what) + " must be an integer");
  return static_cast<int>(x);
}

void validate(const RunConfig& c) {
  const std::string& s = c.subcommand;
  if (c.sites < 0) throw DomainError("--sites must be >= 0");
  if (s == "complexity" || s == "bounds" || s == "branch") {
    if (c.n < 2) throw DomainError("--n must be >= 2");
    const bool extended = c.mode == "extended" || (s == "branch" && c.state == "omega-prime");
    if (extended && (require_int(c.r, "--r") < 2)) throw DomainError("--r must be >= 2");
  }
  if (s == "complexity" && (c.steps < 0 || c.restarts < 0))
    throw DomainError("--steps and --restarts must be >= 0");
  if (s == "branch" && c.b < 0.0) throw DomainError("--b must be >= 0");
  if (s == "lie-closure" && c.sites != 0 && c.sites < 2) throw DomainError("--sites must be >= 2");
  if (s == "bell") {
    if (!(c.theta >= 0.0 && c.theta <= M_PI)) throw DomainError("--theta must lie in [0, pi]");
    if (c.replicas < 1) throw DomainError("--replicas must be >= 1");
  }
  if (s == "stern-gerlach") {
    if (!(c.q > 0 && c.w > 0 && c.d > 0 && c.m > 0 && c.a > 0))
      throw DomainError("--q, --w, --d, --m and --a must be positive");
    if (c.r < 0.0) throw DomainError("--r must be positive");
    if (c.b < 0.0) throw DomainError("--b must be >= 0");
  }
  if (c.sector_cap < 1 || c.closure_cap < 1) throw DomainError("caps must be positive");
}

struct Output {
  Json inputs = Json::object();
  Json outputs = Json::object();
  Table table;
};

LatticeGeometry pair_line(const RunConfig& c, int needed) {
  const int sites = c.sites == 0 ? needed : c.sites;
  if (sites < needed)
    throw DomainError("--sites " + std::to_string(sites) + " too small, need " +
                      std::to_string(needed));
  return LatticeGeometry::line(sites);
}

Json audit_json(const RotationAudit& a) {
  return {{"lower_bound", num(a.lower_bound)},
          {"total_angle", num(a.total_angle)},
          {"cost", num(a.cost)},
          {"max_bound_ratio", num(a.max_bound_ratio)},
          {"per_cut_integrals", vec(a.per_cut_integrals)},
          {"endpoint_arcs", vec(a.endpoint_arcs)}};
}

Output run_bounds(const RunConfig& c) {
  Output o;
  const bool extended = c.mode == "extended";
  const int r = extended ? require_int(c.r, "--r") : 0;
  const auto g = pair_line(c, extended ? c.n + r : c.n + 1);
  o.inputs = {{"mode", c.mode}, {"n", c.n}, {"sites", g.sites()}};
  if (extended) o.inputs["r"] = r;

  const StateVector start = point_pair_start_state(g);
  const StateVector target = extended ? omega_prime_state(g, c.n, r) : omega_state(g, c.n);
  const ControlTrajectory traj =
      extended ? build_extended_trajectory(g, c.n, r) : build_point_pair_trajectory(g, c.n);
  const RotationAudit audit = angle_audit(traj, start);

  if (extended) {
    o.outputs["lower"] = num(lower_bound_extended(c.n, r));
    o.outputs["upper"] = num(upper_bound_extended(c.n, r));
    o.outputs["kappa"] = num(kappa(r));
    o.outputs["kappa_limit"] = num(kappa_limit());
    o.outputs["lambda"] = num(lambda(r));
  } else {
    o.outputs["lower"] = num(lower_bound_point_pair(c.n));
    o.outputs["upper"] = num(upper_bound_point_pair(c.n));
  }
  o.outputs["constructive_cost"] = num(cost(traj));
  o.outputs["constructive_overlap"] = num(target.overlap_modulus(evolve(traj, start)));
  o.outputs["spectral_arc_lower"] = num(spectral_arc_lower_bound(target, start));
  o.outputs["audit"] = audit_json(audit);

  o.table.columns = {"cut", "angle_integral", "endpoint_arc"};
  for (int p = 0; p < audit.per_cut_integrals.size(); ++p)
    o.table.rows.push_back({p, num(audit.per_cut_integrals(p)), num(audit.endpoint_arcs(p))});
  return o;
}

OptimizerConfig optimizer_config(const RunConfig& c) {
  OptimizerConfig oc;
  oc.steps = c.steps;
  oc.restarts = c.restarts;
  oc.seed = c.seed;
  oc.sector_cap = c.sector_cap;
  return oc;
}

Output run_complexity(const RunConfig& c) {
  Output o;
  const bool extended = c.mode == "extended";
  const int r = extended ? require_int(c.r, "--r") : 0;
  const auto g = pair_line(c, extended ? c.n + r : c.n + 1);
  OptimizerConfig oc = optimizer_config(c);
  o.inputs = {{"mode", c.mode}, {"n", c.n},         {"sites", g.sites()},
              {"steps", c.steps}, {"restarts", c.restarts}, {"sector_cap", c.sector_cap}};
  if (extended) o.inputs["r"] = r;

  const StateVector start = point_pair_start_state(g);
  const StateVector target = extended ? omega_prime_state(g, c.n, r) : omega_state(g, c.n);
  const ControlTrajectory constructive =
      extended ? build_extended_trajectory(g, c.n, r) : build_point_pair_trajectory(g, c.n);
  oc.warm_starts = {constructive};
  const ComplexityEstimate est = optimize_complexity(target, start, oc);

  o.outputs["closed_form_lower"] =
      num(extended ? lower_bound_extended(c.n, r) : lower_bound_point_pair(c.n));
  o.outputs["lower"] = num(est.lower);
  o.outputs["lower_method"] = est.lower_method;
  o.outputs["audit_lower"] = num(est.audit_lower);
  o.outputs["upper"] = num(est.upper);
  o.outputs["upper_method"] = est.upper_method;
  o.outputs["infidelity"] = num(est.infidelity);
  o.outputs["feasible_restarts"] = est.feasible_restarts;
  o.outputs["constructive_cost"] = num(cost(constructive));

  o.table.columns = {"step", "dt", "field_norm"};
  if (est.witness) {
    int j = 0;
    for (const auto& st : est.witness->steps())
      o.table.rows.push_back({j++, num(st.dt), num(st.k.norm())});
  }
  return o;
}

Output run_branch(const RunConfig& c) {
  Output o;
  StateVector psi = [&] {
    if (c.state == "omega-prime") {
      const int r = require_int(c.r, "--r");
      return omega_prime_state(pair_line(c, c.n + r), c.n, r);
    }
    const auto g = pair_line(c, c.n + 1);
    return c.state == "product" ? point_pair_start_state(g) : omega_state(g, c.n);
  }();
  o.inputs = {{"state", c.state}, {"n", c.n},           {"sites", psi.geometry().sites()},
              {"b", c.b},         {"oracle", c.oracle}, {"seed", c.seed}};
  if (c.state == "omega-prime") o.inputs["r"] = require_int(c.r, "--r");

  ComplexityOracle oracle = surrogate_oracle();
  if (c.oracle == "optimizer") {
    StateComplexityConfig sc;
    sc.optimizer = optimizer_config(c);
    sc.optimizer.exec = Execution::kSerial;  // the branch search already runs in parallel
    oracle = optimizer_oracle(sc);
    o.inputs["steps"] = c.steps;
    o.inputs["restarts"] = c.restarts;
  }
  BranchSearchConfig bc;
  bc.seed = c.seed;
  bc.sector_cap = c.sector_cap;
  const BranchDecomposition dec = optimize_branches(psi, c.b, oracle, bc);

  o.outputs["parent_complexity"] = num(oracle(psi.normalized()));
  o.outputs["branch_count"] = dec.branches.size();
  o.outputs["weights"] = vec(dec.weights);
  o.outputs["complexities"] = vec(dec.complexities);
  o.outputs["mean_complexity"] = num(dec.mean_complexity);
  o.outputs["entropy"] = num(dec.entropy);
  o.outputs["q"] = num(dec.q);
  Json splits = Json::array();
  for (const auto& s : dec.accepted_splits)
    splits.push_back({{"candidate", s.candidate},
                      {"rho", num(s.rho)},
                      {"parent_complexity", num(s.parent_complexity)},
                      {"child_complexities",
                       {num(s.child_complexity[0]), num(s.child_complexity[1])}},
                      {"gain", num(s.gain)},
                      {"threshold", num(s.threshold)}});
  o.outputs["accepted_splits"] = splits;
  o.outputs["merges"] = dec.merges;

  o.table.columns = {"branch", "weight", "complexity"};
  for (std::size_t i = 0; i < dec.branches.size(); ++i)
    o.table.rows.push_back({i, num(dec.weights[i]), num(dec.complexities[i])});
  return o;
}

Output run_lie_closure(const RunConfig& c) {
  Output o;
  const auto g = LatticeGeometry::line(c.sites == 0 ? 2 : c.sites);
  LieClosureOptions opt;
  opt.dimension_cap = c.closure_cap;
  o.inputs = {{"sites", g.sites()}, {"closure_cap", c.closure_cap}};
  const LieClosureReport rep = lie_closure(g, {}, opt);
  o.outputs = {{"generator_count", rep.generator_count},
               {"closure_dimension", rep.closure_dimension},
               {"expected_dimension", rep.expected_dimension},
               {"sector_particles", rep.sector_particles},
               {"sector_dimensions", rep.sector_dimensions},
               {"iterations", rep.iterations},
               {"pass", rep.pass}};
  o.table.columns = {"particles", "dimension"};
  for (std::size_t i = 0; i < rep.sector_particles.size(); ++i)
    o.table.rows.push_back({rep.sector_particles[i], rep.sector_dimensions[i]});
  return o;
}

Json packet_json(const GaussianPacket& p) {
  return {{"k", vec(p.k)}, {"z_in", vec(p.z_in)}, {"d", num(p.d)}, {"m", num(p.m)}};
}

Json branches_json(const std::vector<PacketBranch>& bs) {
  Json a = Json::array();
  for (const auto& br : bs)
    a.push_back({{"amplitude", num(br.amplitude)},
                 {"weight", num(br.weight)},
                 {"spins", br.spins},
                 {"packets", {packet_json(br.packets[0]), packet_json(br.packets[1])}}});
  return a;
}

Output run_stern_gerlach(const RunConfig& c) {
  Output o;
  SternGerlachConfig sg;
  sg.q = c.q;
  sg.w = c.w;
  sg.d = c.d;
  sg.m = c.m;
  if (c.r > 0.0) sg.r = c.r;
  sg.t1 = c.t1;
  sg.b = c.b;
  sg.a = c.a;
  o.inputs = {{"q", sg.q}, {"w", sg.w},   {"d", sg.d}, {"m", sg.m},
              {"r", sg.r}, {"t1", sg.t1}, {"b", sg.b}, {"a", sg.a}};
  const SternGerlachReport rep = stern_gerlach_run(sg);
  o.outputs["separates"] = rep.separates;
  o.outputs["outcome"] = rep.outcome;
  o.outputs["branching_time"] = rep.branching_time ? num(*rep.branching_time) : Json(nullptr);
  o.outputs["final_branches"] = branches_json(rep.final_branches);
  o.outputs["pulled_back"] = branches_json(rep.pulled_back);
  o.table.columns = {"t",         "separation", "separation_dispersion", "effective_separation",
                     "surrogate", "exceeds_b",  "q_split"};
  for (const auto& s : rep.samples)
    o.table.rows.push_back({num(s.t), num(s.separation), num(s.separation_dispersion),
                            num(s.effective_separation), num(s.surrogate), s.exceeds_b,
                            s.q_split});
  return o;
}

Output run_bell(const RunConfig& c) {
  Output o;
  o.inputs = {{"theta", c.theta}, {"replicas", c.replicas}};
  BellConfig bc;
  bc.theta = c.theta;
  bc.replicas = c.replicas;
  bc.seed = c.seed;
  const BellEnsemble e = bell_ensemble(bc);
  const BellSingle single = bell_single(c.theta);
  const BellStateCheck lattice = bell_state_check(c.theta);
  o.outputs["correlation"] = num(e.correlation);
  o.outputs["standard_error"] = num(e.standard_error);
  o.outputs["expected"] = num(e.expected);
  o.outputs["agree"] = e.agree;
  o.outputs["disagree"] = e.disagree;
  Json weights = Json::object();
  for (const auto& br : single.branches) weights[br.label] = num(br.weight);
  o.outputs["branch_weights"] = weights;
  o.outputs["lattice_weights"] = vec(std::vector<double>(lattice.weights.begin(),
                                                         lattice.weights.end()));
  o.outputs["lattice_max_weight_error"] = num(lattice.max_weight_error);
  o.table.columns = {"branch", "weight", "lattice_weight"};
  for (int i = 0; i < 4; ++i)
    o.table.rows.push_back(
        {single.branches[i].label, num(single.branches[i].weight), num(lattice.weights[i])});
  return o;
}

Output dispatch(const RunConfig& c) {
  if (c.subcommand == "complexity") return run_complexity(c);
  if (c.subcommand == "bounds") return run_bounds(c);
  if (c.subcommand == "branch") return run_branch(c);
  if (c.subcommand == "lie-closure") return run_lie_closure(c);
  if (c.subcommand == "stern-gerlach") return run_stern_gerlach(c);
  if (c.subcommand == "bell") return run_bell(c);
  throw DomainError("unknown subcommand '" + c.subcommand + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw DomainError("failed writing '" + path + "'");
}

RunConfig parse_with(CLI::App& app, RunConfig c, const std::vector<std::string>& args) {
  build_app(app, c);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  c.subcommand = app.get_subcommands().front()->get_name();
  if (const CLI::Option* opt = app.get_config_ptr(); opt && opt->count() > 0)
    c.config = opt->as<std::string>();
  validate(c);
  return c;
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream s;
  for (std::size_t i = 0; i < columns.size(); ++i) s << (i ? "," : "") << columns[i];
  s << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s << ',';
      if (row[i].is_string())
        s << row[i].get<std::string>();
      else if (!row[i].is_null())
        s << row[i].dump();
    }
    s << '\n';
  }
  return s.str();
}

Json ResultDocument::to_json() const {
  return {{"metadata", metadata}, {"inputs", inputs}, {"outputs", outputs}};
}

ResultDocument ResultDocument::from_json(const Json& j) {
  ResultDocument d;
  d.metadata = j.at("metadata");
  d.inputs = j.at("inputs");
  d.outputs = j.at("outputs");
  return d;
}

std::string ResultDocument::serialize() const { return to_json().dump(2) + "\n"; }

ResultDocument ResultDocument::parse(const std::string& text) {
  return from_json(Json::parse(text));
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app;
  return parse_with(app, RunConfig{}, args);
}

RunOutcome run(const std::vector<std::string>& args) {
  RunOutcome out;
  CLI::App app{"Complexity, branching and measurement models on small fermion lattices",
               "branchlab"};
  try {
    configure_threads_from_env();
    const RunConfig c = parse_with(app, RunConfig{}, args);
    Output o = dispatch(c);
    out.document.metadata = {{"version", BRANCHLAB_VERSION},
                             {"seed", c.seed},
                             {"timestamp", utc_timestamp()},
                             {"subcommand", c.subcommand}};
    out.document.inputs = std::move(o.inputs);
    out.document.outputs = std::move(o.outputs);
    out.table = std::move(o.table);
    if (!c.out.empty()) {
      write_file(c.out, out.document.serialize());
      out.document_path = c.out;
    }
    if (!c.table.empty()) write_file(c.table, out.table.to_csv());
  } catch (const CLI::CallForHelp&) {
    out.diagnostic = app.help();
  } catch (const CLI::CallForAllHelp&) {
    out.diagnostic = app.help("", CLI::AppFormatMode::All);
  } catch (const CLI::ParseError& e) {
    out.exit_code = kArgumentError;
    out.diagnostic = std::string("argument error: ") + e.what() + " (see --help)";
  } catch (const CapExceededError& e) {
    out.exit_code = kCapExceeded;
    out.diagnostic = std::string("cap exceeded: ") + e.what();
  } catch (const NonConvergenceError& e) {
    out.exit_code = kNonConvergence;
    out.diagnostic = std::string("no convergence: ") + e.what();
  } catch (const ToleranceError& e) {
    out.exit_code = kNonConvergence;
    out.diagnostic = std::string("inconsistent bounds: ") + e.what();
  } catch (const DomainError& e) {
    out.exit_code = kArgumentError;
    out.diagnostic = std::string("invalid parameter: ") + e.what();
  } catch (const DegenerateInputError& e) {
    out.exit_code = kArgumentError;
    out.diagnostic = std::string("degenerate input: ") + e.what();
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.diagnostic = std::string("error: ") + e.what();
  }
  if (out.exit_code != kOk) out.document = ResultDocument{};
  return out;
}

}  // namespace branchlab::cli
