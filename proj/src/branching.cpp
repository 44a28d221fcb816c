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


#include "branchlab/branching.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "branchlab/errors.hpp"

namespace branchlab {

namespace {

constexpr double kMarginTol = 1e-12;

double xlogx(double w) { return w > 0.0 ? w * std::log(w) : 0.0; }

// A two-way split proposal: child 0 is the component of the branch along the
// direction obtained from `raw` after projecting out the other branches.
struct Proposal {
  std::string family;
  CVector raw;
};

struct Scored {
  double margin = -std::numeric_limits<double>::infinity();
  CVector child0;
  CVector child1;
  SplitRecord record;
  std::vector<int> support;
};

std::vector<int> support_of(const CVector& v, double rel = 1e-12) {
  std::vector<int> s;
  const double scale = v.norm();
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > rel * scale) s.push_back(i);
  return s;
}

CVector subset_projection(const CVector& phi, const std::vector<int>& subset) {
  CVector out = CVector::Zero(phi.size());
  for (int i : subset) out(i) = phi(i);
  return out;
}

// Coordinate-subset proposals from number-sector and spatial-support labels.
void label_proposals(const StateVector& branch, const std::vector<int>& support,
                     std::vector<Proposal>& out) {
  const auto& basis = branch.basis();
  const auto& g = branch.geometry();
  std::set<std::vector<int>> seen;
  auto add = [&](const std::string& family, const std::function<bool(const FockBasisState&)>& in) {
    std::vector<int> subset;
    for (int i : support)
      if (in(basis.state(i))) subset.push_back(i);
    if (subset.empty() || subset.size() == support.size()) return;
    // a subset and its complement give the same split
    std::vector<int> rest;
    std::set_difference(support.begin(), support.end(), subset.begin(), subset.end(),
                        std::back_inserter(rest));
    const std::vector<int>& key = subset.front() == support.front() ? subset : rest;
    if (!seen.insert(key).second) return;
    out.push_back({family, subset_projection(branch.amplitudes(), subset)});
  };
  for (int x = 0; x < g.sites(); ++x)
    for (int l = 0; l < 4; ++l)
      add("site-label", [x, l](const FockBasisState& s) {
        return static_cast<int>(s.occupation(x)) == l;
      });
  for (int p = 0; p + 1 < g.sites(); ++p)
    for (int k = 0; k <= branch.particles(); ++k)
      add("cut-number", [p, k](const FockBasisState& s) {
        int left = 0;
        for (int m = 0; m < 2 * (p + 1); ++m) left += s.has_mode(m) ? 1 : 0;
        return left == k;
      });
  for (int k = 0; k <= branch.particles(); ++k)
    add("spin-up-number", [k, &g](const FockBasisState& s) {
      int up = 0;
      for (int x = 0; x < g.sites(); ++x) up += s.has_mode(mode_index(x, Spin::kUp)) ? 1 : 0;
      return up == k;
    });
}

void rotation_proposals(const StateVector& branch, const std::vector<int>& support,
                        const BranchSearchConfig& cfg, std::vector<Proposal>& out) {
  std::vector<int> top = support;
  std::stable_sort(top.begin(), top.end(), [&](int a, int b) {
    return std::abs(branch.amplitudes()(a)) > std::abs(branch.amplitudes()(b));
  });
  top.resize(std::min<std::size_t>(top.size(), std::max(0, cfg.rotation_pairs)));
  const int d = branch.dim();
  for (std::size_t a = 0; a < top.size(); ++a)
    for (std::size_t c = a + 1; c < top.size(); ++c)
      for (int k = 1; k < cfg.rotation_angles; ++k) {
        const double alpha = 0.5 * M_PI * k / cfg.rotation_angles;
        for (int q = 0; q < 4; ++q) {
          CVector e = CVector::Zero(d);
          e(top[a]) = std::cos(alpha);
          e(top[c]) = std::polar(std::sin(alpha), 0.5 * M_PI * q);
          out.push_back({"pair-rotation", std::move(e)});
        }
      }
}

void exhaustive_proposals(const StateVector& branch, const std::vector<int>& support,
                          std::vector<Proposal>& out) {
  const int s = static_cast<int>(support.size());
  // Subsets containing support[0], excluding the full support.
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s) - 1; mask += 2) {
    std::vector<int> subset;
    for (int i = 0; i < s; ++i)
      if ((mask >> i) & 1u) subset.push_back(support[i]);
    out.push_back({"exhaustive", subset_projection(branch.amplitudes(), subset)});
  }
}

std::vector<Proposal> proposals(const StateVector& branch, const BranchSearchConfig& cfg,
                                std::uint64_t stream) {
  const std::vector<int> support = support_of(branch.amplitudes());
  std::vector<Proposal> out;
  if (support.size() < 2) return out;
  if (cfg.exhaustive && static_cast<int>(support.size()) <= cfg.exhaustive_support) {
    exhaustive_proposals(branch, support, out);
  } else {
    label_proposals(branch, support, out);
  }
  rotation_proposals(branch, support, cfg, out);
  if (cfg.product_candidates > 0)
    for (const auto& s : nearby_product_states(branch, cfg.product_candidates))
      out.push_back({"product-projection", s.amplitudes()});
  std::mt19937_64 rng(derive_seed(cfg.seed, stream));
  std::normal_distribution<double> normal;
  for (int r = 0; r < cfg.random_candidates; ++r) {
    CVector e = CVector::Zero(branch.dim());
    for (int i : support) e(i) = Complex(normal(rng), normal(rng));
    out.push_back({"random", std::move(e)});
  }
  return out;
}

// Components of `raw` orthogonal to the other (mutually orthogonal) branches.
CVector project_out(CVector raw, const std::vector<CVector>& others) {
  for (const auto& o : others) raw -= o * o.dot(raw);
  return raw;
}

Scored score(const Proposal& prop, const StateVector& branch, double parent_c,
             const std::vector<CVector>& others, double total, double b,
             const ComplexityOracle& oracle, const BranchSearchConfig& cfg) {
  Scored out;
  const CVector& phi = branch.amplitudes();
  CVector dir = project_out(prop.raw, others);
  const double dn = dir.norm();
  if (dn < 1e-12) return out;
  dir /= dn;
  CVector c0 = dir * dir.dot(phi);
  CVector c1 = phi - c0;
  const double w0 = c0.squaredNorm();
  const double w1 = c1.squaredNorm();
  if (w0 < cfg.weight_floor * total || w1 < cfg.weight_floor * total) return out;
  const double rho = w0 / (w0 + w1);
  const double k0 = oracle(StateVector(branch.sector(), c0 / std::sqrt(w0)));
  const double k1 = oracle(StateVector(branch.sector(), c1 / std::sqrt(w1)));
  const SplitGain sg = split_gain(parent_c, k0, k1, rho, b);
  // Q drop in units of the whole state.
  out.margin = (w0 + w1) / total * (sg.gain - sg.threshold);
  out.record = {parent_c, {k0, k1}, rho, sg.gain, sg.threshold, prop.family};
  out.support = support_of(c0);
  out.child0 = std::move(c0);
  out.child1 = std::move(c1);
  return out;
}

bool better(const Scored& a, const Scored& b) {
  if (a.margin > b.margin + kMarginTol) return true;
  if (b.margin > a.margin + kMarginTol) return false;
  return a.support < b.support;
}

// Best split of branch `index` against the current decomposition.
std::optional<Scored> best_split(const std::vector<StateVector>& branches,
                                 const std::vector<double>& complexities, int index, double b,
                                 const ComplexityOracle& oracle, const BranchSearchConfig& cfg,
                                 std::uint64_t stream) {
  const StateVector& branch = branches[index];
  std::vector<CVector> others;
  double total = 0.0;
  for (int j = 0; j < static_cast<int>(branches.size()); ++j) {
    total += branches[j].amplitudes().squaredNorm();
    if (j != index) others.push_back(branches[j].amplitudes().normalized());
  }
  const auto props = proposals(branch, cfg, stream);
  std::vector<Scored> scored(props.size());
  std::exception_ptr error;
  const int n = static_cast<int>(props.size());
#pragma omp parallel for schedule(dynamic) if (cfg.exec == Execution::kParallel)
  for (int i = 0; i < n; ++i) {
    try {
      scored[i] = score(props[i], branch, complexities[index], others, total, b, oracle, cfg);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::optional<Scored> best;
  for (auto& s : scored)
    if (s.margin > std::max(kMarginTol, cfg.q_tolerance) && (!best || better(s, *best)))
      best = std::move(s);
  return best;
}

double oracle_of(const StateVector& v, const ComplexityOracle& oracle) {
  return oracle(v.normalized());
}

}  // namespace

ComplexityOracle surrogate_oracle() {
  return [](const StateVector& psi) { return schmidt_surrogate_complexity(psi); };
}

ComplexityOracle optimizer_oracle(StateComplexityConfig config) {
  config.optimizer.exec = Execution::kSerial;
  return [config](const StateVector& psi) { return complexity_of_state(psi, config).upper; };
}

BranchDecomposition make_decomposition(std::vector<StateVector> branches, double b,
                                       const ComplexityOracle& oracle) {
  if (b < 0.0) throw DomainError("branching threshold b must be non-negative");
  BranchDecomposition d;
  d.b = b;
  for (auto& br : branches) {
    const double w = br.amplitudes().squaredNorm();
    d.weights.push_back(w);
    d.complexities.push_back(w > 0.0 ? oracle_of(br, oracle) : 0.0);
    d.branches.push_back(std::move(br));
  }
  for (std::size_t i = 0; i < d.weights.size(); ++i) {
    d.mean_complexity += d.weights[i] * d.complexities[i];
    d.entropy -= xlogx(d.weights[i]);
  }
  d.q = q_value(d);
  return d;
}

double q_value(const BranchDecomposition& d) {
  double q = 0.0;
  for (std::size_t i = 0; i < d.weights.size(); ++i)
    q += d.weights[i] * d.complexities[i] - d.b * xlogx(d.weights[i]);
  return q;
}

SplitGain split_gain(double parent, double child0, double child1, double rho, double b) {
  if (!(rho > 0.0 && rho < 1.0))
    throw DomainError("weight fraction must lie in (0, 1), got " + std::to_string(rho));
  SplitGain s;
  s.gain = parent - rho * child0 - (1.0 - rho) * child1;
  s.threshold = -b * xlogx(rho) - b * xlogx(1.0 - rho);
  s.splits = s.gain > s.threshold;
  return s;
}

BranchDecomposition optimize_branches(const StateVector& psi, double b,
                                      const ComplexityOracle& oracle,
                                      const BranchSearchConfig& config) {
  if (b < 0.0) throw DomainError("branching threshold b must be non-negative");
  if (psi.dim() > config.sector_cap)
    throw CapExceededError("sector dimension exceeds the branching cap", psi.dim(),
                           config.sector_cap);
  if (psi.norm() == 0.0) throw DomainError("cannot branch the zero state");

  std::vector<StateVector> branches = {psi};
  std::vector<double> comp = {oracle_of(psi, oracle)};
  std::vector<SplitRecord> records;
  int merges = 0;
  std::uint64_t stream = 0;

  // Split the pending branches, and every child they produce, until no
  // proposal lowers Q.
  auto split_from = [&](std::vector<int> pending) {
    while (!pending.empty() && static_cast<int>(branches.size()) < config.max_branches) {
      const int i = pending.back();
      pending.pop_back();
      auto s = best_split(branches, comp, i, b, oracle, config, stream++);
      if (!s) continue;
      branches[i] = StateVector(psi.sector(), std::move(s->child0));
      comp[i] = s->record.child_complexity[0];
      branches.push_back(StateVector(psi.sector(), std::move(s->child1)));
      comp.push_back(s->record.child_complexity[1]);
      records.push_back(s->record);
      pending.push_back(i);
      pending.push_back(static_cast<int>(branches.size()) - 1);
    }
  };

  const double total = psi.amplitudes().squaredNorm();
  split_from({0});
  // Merge re-test: undo any pair whose split no longer pays, then re-split
  // the merged branch.
  for (int pass = 0; pass < 4 * config.max_branches; ++pass) {
    bool merged = false;
    int merged_into = -1;
    for (std::size_t i = 0; i < branches.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < branches.size() && !merged; ++j) {
        const double wi = branches[i].amplitudes().squaredNorm();
        const double wj = branches[j].amplitudes().squaredNorm();
        const double rho = wi / (wi + wj);
        if (!(rho > 0.0 && rho < 1.0)) continue;
        StateVector m = branches[i] + branches[j];
        const double cm = oracle_of(m, oracle);
        const SplitGain sg = split_gain(cm, comp[i], comp[j], rho, b);
        if ((wi + wj) / total * (sg.threshold - sg.gain) > std::max(kMarginTol, config.q_tolerance)) {
          branches[i] = std::move(m);
          comp[i] = cm;
          branches.erase(branches.begin() + j);
          comp.erase(comp.begin() + j);
          ++merges;
          merged = true;
          merged_into = static_cast<int>(i);
        }
      }
    if (!merged) break;
    split_from({merged_into});
  }

  BranchDecomposition d;
  d.b = b;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    d.weights.push_back(branches[i].amplitudes().squaredNorm() / total);
    d.complexities.push_back(comp[i]);
  }
  d.branches = std::move(branches);
  for (std::size_t i = 0; i < d.weights.size(); ++i) {
    d.mean_complexity += d.weights[i] * d.complexities[i];
    d.entropy -= xlogx(d.weights[i]);
  }
  d.q = q_value(d);
  d.accepted_splits = std::move(records);
  d.merges = merges;
  return d;
}

BranchHistory late_time_branch(const StateVector& psi_in, const CMatrix& h, double t_in,
                               const std::vector<double>& schedule, double b,
                               const ComplexityOracle& oracle, const BranchSearchConfig& config,
                               double tolerance) {
  if (h.rows() != psi_in.dim() || h.cols() != psi_in.dim())
    throw DomainError("Hamiltonian does not match the state's sector");
  if ((h - h.adjoint()).norm() > 1e-10 * std::max(1.0, h.norm()))
    throw DomainError("Hamiltonian is not Hermitian");
  for (std::size_t k = 0; k < schedule.size(); ++k)
    if (schedule[k] < t_in || (k > 0 && schedule[k] <= schedule[k - 1]))
      throw DomainError("t_out schedule must be increasing and not before t_in");

  BranchHistory hist;
  hist.t_in = t_in;
  hist.schedule = schedule;
  const HermitianPropagator prop(h);
  for (double t_out : schedule) {
    const double dt = t_out - t_in;
    const StateVector out(psi_in.sector(), prop.apply(psi_in.amplitudes(), dt));
    BranchDecomposition d = optimize_branches(out, b, oracle, config);
    std::vector<StateVector> back;
    for (const auto& br : d.branches)
      back.emplace_back(psi_in.sector(), prop.apply(br.amplitudes(), -dt));
    hist.at_out.push_back(std::move(d));
    hist.pulled_back.push_back(std::move(back));
  }

  for (std::size_t k = 1; k < schedule.size() && !hist.stabilized; ++k) {
    const auto& cur = hist.pulled_back[k];
    const auto& prev = hist.pulled_back[k - 1];
    if (cur.size() != prev.size()) continue;
    std::vector<bool> used(prev.size(), false);
    bool same = true;
    for (const auto& a : cur) {
      int match = -1;
      double best = -1.0;
      for (std::size_t j = 0; j < prev.size(); ++j)
        if (!used[j] && std::abs(a.inner(prev[j])) > best) {
          best = std::abs(a.inner(prev[j]));
          match = static_cast<int>(j);
        }
      if (match < 0 || (a.amplitudes() - prev[match].amplitudes()).norm() >= tolerance) {
        same = false;
        break;
      }
      used[match] = true;
    }
    if (same) {
      hist.stabilized = true;
      hist.stable_index = static_cast<int>(k) - 1;
    }
  }
  hist.status = hist.stabilized ? "stabilized" : "not converged";
  return hist;
}

int sample_branch(const std::vector<double>& weights, std::uint64_t seed) {
  if (weights.empty()) throw DomainError("no branches to sample");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("branch weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw DomainError("branch weights sum to zero");
  if (std::abs(total - 1.0) > 1e-6)
    std::cerr << "warning: branch weights sum to " << total << "; renormalizing\n";
  std::mt19937_64 rng(derive_seed(seed, 0));
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    acc += weights[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

int sample_branch(const BranchDecomposition& d, std::uint64_t seed) {
  return sample_branch(d.weights, seed);
}

}  // namespace branchlab
