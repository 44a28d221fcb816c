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


#include <algorithm>
#include <cmath>

#include "branchlab/errors.hpp"
#include "branchlab/experiments.hpp"

namespace branchlab {

namespace {

void validate(const SternGerlachConfig& c) {
  if (!(c.q > 0.0 && c.w > 0.0 && c.d > 0.0 && c.m > 0.0 && c.r > 0.0 && c.a > 0.0))
    throw DomainError("q, w, d, m, r and a must be positive");
  if (c.b < 0.0) throw DomainError("branching threshold b must be non-negative");
  if (c.t1 < c.t_in) throw DomainError("impulse time precedes t_in");
}

std::vector<PacketBranch> two_terms(const SternGerlachConfig& c, double ry, double y_shift) {
  const GaussianPacket p1 = make_packet({-c.q, 0.0}, {-c.w, 0.0}, c.d, c.m);
  PacketBranch up{M_SQRT1_2, 0.5, {1, -1},
                  {make_packet({c.q, ry}, {c.w, -y_shift}, c.d, c.m), p1}};
  PacketBranch down{-M_SQRT1_2, 0.5, {-1, 1},
                    {make_packet({c.q, -ry}, {c.w, y_shift}, c.d, c.m), p1}};
  return {up, down};
}

}  // namespace

bool separation_condition(double r, double d) {
  if (!(r > 0.0) || !(d > 0.0)) throw DomainError("r and d must be positive");
  return r > 1.0 / (2.0 * M_SQRT2 * d);
}

std::vector<PacketBranch> stern_gerlach_terms(const SternGerlachConfig& c) {
  validate(c);
  return two_terms(c, c.r, c.r * c.t1 / c.m);
}

SternGerlachReport stern_gerlach_run(const SternGerlachConfig& c) {
  validate(c);
  SternGerlachReport rep;
  rep.separates = separation_condition(c.r, c.d);
  std::vector<double> schedule = c.schedule;
  if (schedule.empty())
    for (int i = 1; i <= 64; ++i) schedule.push_back(c.t1 + 0.5 * i * c.m / c.r);
  const auto terms = stern_gerlach_terms(c);
  const double rate = M_PI / (8.0 * M_SQRT2);
  for (double t : schedule) {
    if (t < c.t_in) throw DomainError("t_out precedes t_in");
    SternGerlachSample s;
    s.t = t;
    s.separation = t > c.t1 ? std::abs(terms[0].packets[0].mean(t)(1) - terms[1].packets[0].mean(t)(1))
                            : 0.0;
    s.separation_dispersion = M_SQRT2 * terms[0].packets[0].dispersion(t);
    s.effective_separation = std::max(0.0, s.separation - s.separation_dispersion);
    s.surrogate = s.effective_separation / c.a * rate;
    s.exceeds_b = s.surrogate > c.b;
    s.q_split = s.surrogate > c.b * std::log(2.0);
    if (s.exceeds_b && !rep.branching_time) rep.branching_time = t;
    rep.samples.push_back(s);
  }
  if (rep.branching_time) {
    rep.outcome = "two branches";
    rep.final_branches = terms;
    rep.pulled_back = two_terms(c, 0.0, 0.0);
  } else {
    rep.outcome = rep.separates ? "no branching within schedule" : "no branching";
  }
  return rep;
}

}  // namespace branchlab
