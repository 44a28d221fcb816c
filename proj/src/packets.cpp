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

#include "branchlab/errors.hpp"
#include "branchlab/experiments.hpp"

namespace branchlab {

Eigen::VectorXd GaussianPacket::mean(double t) const { return k * (t / m) + z_in; }

double GaussianPacket::dispersion(double t) const {
  return std::sqrt(t * t / (4.0 * d * d * m * m) + d * d);
}

// Per axis: (2 pi d^2)^(-1/4) (1 + i tau)^(-1/2)
//   exp(-(x - x0 - k t/m)^2 / (4 d^2 (1 + i tau)) + i k (x - x0) - i k^2 t / 2m),
// tau = t / (2 m d^2).
Complex GaussianPacket::amplitude(const Eigen::VectorXd& z, double t) const {
  if (z.size() != k.size()) throw DomainError("position has the wrong dimension");
  const Complex one_i(1.0, t / (2.0 * m * d * d));
  Complex psi = 1.0;
  for (int i = 0; i < k.size(); ++i) {
    const double shift = z(i) - z_in(i) - k(i) * t / m;
    const double rel = z(i) - z_in(i);
    psi *= std::pow(2.0 * M_PI * d * d, -0.25) / std::sqrt(one_i) *
           std::exp(-shift * shift / (4.0 * d * d * one_i) +
                    Complex(0.0, k(i) * rel - k(i) * k(i) * t / (2.0 * m)));
  }
  return psi;
}

GaussianPacket make_packet(std::vector<double> k, std::vector<double> z_in, double d, double m) {
  if (k.size() != z_in.size() || k.empty() || k.size() > 2)
    throw DomainError("packet needs matching 1-D or 2-D momentum and position");
  if (!(d > 0.0) || !(m > 0.0)) throw DomainError("packet dispersion and mass must be positive");
  GaussianPacket p;
  p.k = Eigen::Map<Eigen::VectorXd>(k.data(), static_cast<int>(k.size()));
  p.z_in = Eigen::Map<Eigen::VectorXd>(z_in.data(), static_cast<int>(z_in.size()));
  p.d = d;
  p.m = m;
  return p;
}

}  // namespace branchlab
