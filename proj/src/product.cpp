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
#include <bit>
#include <cmath>

#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/product.hpp"

namespace branchlab {

namespace {

// Mode vector (length 2L) reshaped to (site, spin) with spin column 0 = up.
CMatrix as_site_spin(const CVector& modes) {
  const int sites = static_cast<int>(modes.size() / 2);
  CMatrix m(sites, 2);
  for (int x = 0; x < sites; ++x) {
    m(x, 0) = modes(2 * x);
    m(x, 1) = modes(2 * x + 1);
  }
  return m;
}

// Antisymmetric two-particle coefficient matrix over modes.
CMatrix pair_coefficients(const StateVector& psi) {
  const int modes = psi.geometry().modes();
  CMatrix a = CMatrix::Zero(modes, modes);
  for (int i = 0; i < psi.dim(); ++i) {
    const std::uint64_t mask = psi.basis().state(i).mask();
    const int m1 = std::countr_zero(mask);
    const int m2 = 63 - std::countl_zero(mask);
    a(m1, m2) = psi.amplitudes()(i);
    a(m2, m1) = -psi.amplitudes()(i);
  }
  return a;
}

// Does span{u1, u2} (mode vectors) have a basis of position-spin products?
bool span_has_product_basis(const CVector& u1, const CVector& u2, double tol) {
  const CMatrix a = as_site_spin(u1);
  const CMatrix b = as_site_spin(u2);
  const int sites = static_cast<int>(a.rows());
  // Each 2x2 minor of alpha*a + beta*b is a binary quadratic form.
  std::vector<Eigen::RowVector3cd> rows;
  for (int x = 0; x < sites; ++x)
    for (int y = x + 1; y < sites; ++y) {
      const Complex qa = a(x, 0) * a(y, 1) - a(x, 1) * a(y, 0);
      const Complex qc = b(x, 0) * b(y, 1) - b(x, 1) * b(y, 0);
      const Complex qb = a(x, 0) * b(y, 1) + b(x, 0) * a(y, 1) - a(x, 1) * b(y, 0) -
                         b(x, 1) * a(y, 0);
      rows.emplace_back(qa, qb, qc);
    }
  if (rows.empty()) return true;
  CMatrix r(static_cast<int>(rows.size()), 3);
  for (int i = 0; i < r.rows(); ++i) r.row(i) = rows[i];
  Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= tol) return true;  // every combination is a product
  if (sv.size() > 1 && sv(1) > tol) return false;  // two independent forms: <= 1 common root
  // one form q = (a, b, c): need two distinct projective roots
  const Eigen::Vector3cd q = svd.matrixV().col(0).conjugate();
  const Complex disc = q(1) * q(1) - 4.0 * q(0) * q(2);
  return std::abs(disc) > tol;
}

Orbital nearest_product_orbital(const CVector& modes) {
  const CMatrix m = as_site_spin(modes);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Orbital o;
  o.position = svd.matrixU().col(0) * svd.singularValues()(0);
  o.spin = svd.matrixV().col(0).conjugate();
  return o;
}

}  // namespace

CMatrix one_body_density(const StateVector& psi) {
  const int modes = psi.geometry().modes();
  if (psi.particles() == 0) return CMatrix::Zero(modes, modes);
  auto target = enumerate_sector(psi.geometry(), psi.particles() - 1);
  CMatrix v(target->dim(), modes);
  for (int m = 0; m < modes; ++m) {
    const Spin s = (m % 2 == 0) ? Spin::kUp : Spin::kDown;
    v.col(m) = apply_annihilation(psi, m / 2, s, target).amplitudes();
  }
  return v.adjoint() * v;
}

bool is_product_state(const StateVector& psi, double tol) {
  if (psi.product_certificate()) return true;
  const double n = psi.norm();
  if (n == 0.0) return false;
  switch (psi.particles()) {
    case 0:
      return true;
    case 1: {
      Eigen::JacobiSVD<CMatrix> svd(as_site_spin(psi.amplitudes() / n));
      return svd.singularValues()(1) <= tol;
    }
    case 2: {
      const CMatrix a = pair_coefficients(psi) / n;
      Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU);
      const auto& sv = svd.singularValues();
      if (sv.size() > 2 && sv(2) > tol * sv(0)) return false;  // not a single determinant
      return span_has_product_basis(svd.matrixU().col(0), svd.matrixU().col(1), tol);
    }
    default:
      return false;
  }
}

std::vector<std::vector<Orbital>> nearby_product_orbitals(const StateVector& psi, int count) {
  const auto& g = psi.geometry();
  const int n = psi.particles();
  std::vector<std::vector<Orbital>> cands;
  if (n == 0 || count <= 0) return cands;

  // Largest basis amplitudes are products of point orbitals.
  std::vector<int> order(psi.dim());
  for (int i = 0; i < psi.dim(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(psi.amplitudes()(a)) > std::abs(psi.amplitudes()(b));
  });
  for (int k = 0; k < std::min<int>(count, psi.dim()); ++k) {
    const std::uint64_t mask = psi.basis().state(order[k]).mask();
    std::vector<Orbital> orbs;
    for (int m = 0; m < g.modes(); ++m)
      if ((mask >> m) & 1u)
        orbs.push_back(point_orbital(g, m / 2, m % 2 == 0 ? Spin::kUp : Spin::kDown));
    cands.push_back(std::move(orbs));
  }

  // Natural orbitals projected onto position-spin products.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(one_body_density(psi));
  std::vector<Orbital> natural;
  for (int k = 0; k < n; ++k)
    natural.push_back(nearest_product_orbital(es.eigenvectors().col(g.modes() - 1 - k)));
  cands.push_back(std::move(natural));

  // Rank by overlap, drop collisions and near duplicates.
  struct Scored {
    double overlap;
    std::vector<Orbital> orbitals;
    StateVector state;
  };
  std::vector<Scored> scored;
  for (auto& c : cands) {
    try {
      StateVector s = build_product_state(g, c);
      const double ov = std::abs(s.inner(psi)) / psi.norm();
      bool dup = false;
      for (const auto& e : scored)
        if (e.state.overlap_modulus(s) > 1.0 - 1e-9) dup = true;
      if (!dup) scored.push_back({ov, std::move(c), std::move(s)});
    } catch (const DegenerateInputError&) {
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.overlap > b.overlap; });
  std::vector<std::vector<Orbital>> out;
  for (int k = 0; k < std::min<int>(count, static_cast<int>(scored.size())); ++k)
    out.push_back(scored[k].orbitals);
  return out;
}

std::vector<StateVector> nearby_product_states(const StateVector& psi, int count) {
  std::vector<StateVector> out;
  for (const auto& orbs : nearby_product_orbitals(psi, count))
    out.push_back(build_product_state(psi.geometry(), orbs));
  return out;
}

double schmidt_surrogate_complexity(const StateVector& psi) {
  if (psi.particles() != 2) throw DomainError("the Schmidt surrogate needs a two-particle state");
  const StateVector u = psi.normalized();
  if (is_product_state(u)) return 0.0;
  double total = 0.0;
  for (int p = 0; p + 1 < u.geometry().sites(); ++p) {
    const auto s = schmidt_spectrum(u, p).values;
    double head = s(0) * s(0) + s(1) * s(1);
    if (s.size() > 2) head += s(2) * s(2);
    total += std::acos(std::clamp(std::sqrt(head), 0.0, 1.0));
  }
  return total / (2.0 * M_SQRT2);
}

}  // namespace branchlab
