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
#include <functional>

#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"

namespace branchlab {

namespace {

// Coordinates of a two-particle amplitude vector split by particle number on
// each side of the cut. Every basis state lands in exactly one block entry.
struct CutBlocks {
  CVector right_pair;  // (0, 2): both modes right of the cut
  CVector left_pair;   // (2, 0)
  CMatrix cross;       // (1, 1): left mode x right mode
};

class CutLayout {
 public:
  CutLayout(const SectorBasis& basis, int cut) {
    const int sites = basis.geometry().sites();
    if (basis.particles() != 2)
      throw DomainError("Schmidt audits are defined for two-particle states");
    if (cut < 0 || cut > sites - 2)
      throw DomainError("cut " + std::to_string(cut) + " outside [0, " +
                        std::to_string(sites - 2) + "]");
    left_modes_ = 2 * (cut + 1);
    right_modes_ = 2 * sites - left_modes_;
    for (int i = 0; i < basis.dim(); ++i) {
      const std::uint64_t mask = basis.state(i).mask();
      const int m1 = std::countr_zero(mask);
      const int m2 = 63 - std::countl_zero(mask);
      Slot s;
      if (m1 >= left_modes_) {
        s.block = 0;
        s.row = static_cast<int>(right_.size());
        right_.push_back(i);
      } else if (m2 < left_modes_) {
        s.block = 1;
        s.row = static_cast<int>(left_.size());
        left_.push_back(i);
      } else {
        s.block = 2;
        s.row = m1;
        s.col = m2 - left_modes_;
      }
      slots_.push_back(s);
    }
  }

  CutBlocks split(const CVector& v) const {
    CutBlocks b;
    b.right_pair.resize(static_cast<int>(right_.size()));
    b.left_pair.resize(static_cast<int>(left_.size()));
    b.cross = CMatrix::Zero(left_modes_, right_modes_);
    for (int i = 0; i < v.size(); ++i) {
      const auto& s = slots_[i];
      if (s.block == 0)
        b.right_pair(s.row) = v(i);
      else if (s.block == 1)
        b.left_pair(s.row) = v(i);
      else
        b.cross(s.row, s.col) = v(i);
    }
    return b;
  }

  CVector join(const CutBlocks& b) const {
    CVector v(static_cast<int>(slots_.size()));
    for (int i = 0; i < v.size(); ++i) {
      const auto& s = slots_[i];
      if (s.block == 0)
        v(i) = b.right_pair(s.row);
      else if (s.block == 1)
        v(i) = b.left_pair(s.row);
      else
        v(i) = b.cross(s.row, s.col);
    }
    return v;
  }

  int cross_rank_bound() const { return std::min(left_modes_, right_modes_); }

 private:
  struct Slot {
    int block = 0;
    int row = 0;
    int col = 0;
  };
  int left_modes_ = 0;
  int right_modes_ = 0;
  std::vector<int> right_;
  std::vector<int> left_;
  std::vector<Slot> slots_;
};

struct CutSvd {
  CutBlocks blocks;
  Eigen::VectorXd sigma;
  CMatrix u;
  CMatrix v;
};

CutSvd cut_svd(const CutLayout& layout, const CVector& psi) {
  CutSvd out;
  out.blocks = layout.split(psi);
  Eigen::JacobiSVD<CMatrix> svd(out.blocks.cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.sigma = svd.singularValues();
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  return out;
}

Eigen::VectorXd assemble_spectrum(const CutSvd& s) {
  Eigen::VectorXd values(2 + s.sigma.size());
  values(0) = s.blocks.right_pair.norm();
  values(1) = s.blocks.left_pair.norm();
  values.tail(s.sigma.size()) = s.sigma;
  return values;
}

// Forward derivative of a vector norm: Re <x/|x|, dx> or |dx| at x = 0.
double norm_rate(const CVector& x, const CVector& dx, double tol) {
  const double n = x.norm();
  if (n <= tol) return dx.norm();
  return (x.dot(dx)).real() / n;
}

RotationRates rates_from_blocks(const CutLayout& layout, const CVector& psi, const CVector& dpsi,
                                int cut, double tol) {
  const CutSvd s = cut_svd(layout, psi);
  const CutBlocks d = layout.split(dpsi);

  RotationRates out;
  out.cut = cut;
  out.spectrum = assemble_spectrum(s);
  out.rates = Eigen::VectorXd::Zero(out.spectrum.size());
  out.rates(0) = norm_rate(s.blocks.right_pair, d.right_pair, tol);
  out.rates(1) = norm_rate(s.blocks.left_pair, d.left_pair, tol);

  const int r = static_cast<int>(s.sigma.size());
  int first_zero = r;
  for (int i = 0; i < r; ++i)
    if (s.sigma(i) <= tol) {
      first_zero = i;
      break;
    }
  // positive clusters
  int i = 0;
  while (i < first_zero) {
    int j = i + 1;
    while (j < first_zero && s.sigma(j - 1) - s.sigma(j) <= tol) ++j;
    const int c = j - i;
    if (c > 1) out.degenerate = true;
    const CMatrix a = s.u.middleCols(i, c).adjoint() * d.cross * s.v.middleCols(i, c);
    const CMatrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    for (int k = 0; k < c; ++k) out.rates(2 + i + k) = es.eigenvalues()(c - 1 - k);
    i = j;
  }
  // zero cluster
  if (first_zero < r) {
    const CMatrix a = s.u.rightCols(s.u.cols() - first_zero).adjoint() * d.cross *
                      s.v.rightCols(s.v.cols() - first_zero);
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& sv = svd.singularValues();
    for (int k = 0; k < r - first_zero && k < sv.size(); ++k) out.rates(2 + first_zero + k) = sv(k);
  }
  out.theta = out.rates.norm();
  return out;
}

}  // namespace

SchmidtSpectrum schmidt_spectrum(const StateVector& psi, int cut) {
  const CutLayout layout(psi.basis(), cut);
  const CutSvd s = cut_svd(layout, psi.amplitudes());
  SchmidtSpectrum out;
  out.cut = cut;
  out.values = assemble_spectrum(s);
  out.sectors.assign(out.values.size(), {1, 1});
  out.sectors[0] = {0, 2};
  out.sectors[1] = {2, 0};
  return out;
}

double arc_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const long n = std::max(a.size(), b.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  x.head(a.size()) = a;
  y.head(b.size()) = b;
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw DegenerateInputError("arc distance of a zero spectrum");
  const double c = std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
  // acos loses precision near 1; use the chord for the small-angle regime
  const double chord = (x / nx - y / ny).norm();
  return c > 0.9 ? 2.0 * std::asin(std::min(1.0, 0.5 * chord)) : std::acos(c);
}

RotationRates rotation_rates(const StateVector& psi, const CMatrix& h, int cut,
                             double degeneracy_tol) {
  const CutLayout layout(psi.basis(), cut);
  if (h.rows() != psi.dim() || h.cols() != psi.dim())
    throw DomainError("Hamiltonian does not match the state's sector");
  const CVector dpsi = Complex(0.0, -1.0) * (h * psi.amplitudes());
  return rates_from_blocks(layout, psi.amplitudes(), dpsi, cut, degeneracy_tol);
}

RotationRates rotation_rates(const StateVector& psi, const ControlField& k, int cut,
                             double degeneracy_tol) {
  SectorEmbedding emb(psi.sector());
  return rotation_rates(psi, emb.embed(k), cut, degeneracy_tol);
}

Eigen::MatrixXd rotation_matrix(const StateVector& psi, const ControlField& k, int cut) {
  const CutLayout layout(psi.basis(), cut);
  const CutSvd s = cut_svd(layout, psi.amplitudes());
  const int n = 2 + static_cast<int>(s.sigma.size());
  std::vector<CVector> vecs;
  auto from_blocks = [&](const CutBlocks& b) { return layout.join(b); };
  CutBlocks zero;
  zero.right_pair = CVector::Zero(s.blocks.right_pair.size());
  zero.left_pair = CVector::Zero(s.blocks.left_pair.size());
  zero.cross = CMatrix::Zero(s.blocks.cross.rows(), s.blocks.cross.cols());
  {
    CutBlocks b = zero;
    const double nr = s.blocks.right_pair.norm();
    if (nr > 0.0) b.right_pair = s.blocks.right_pair / nr;
    vecs.push_back(from_blocks(b));
  }
  {
    CutBlocks b = zero;
    const double nl = s.blocks.left_pair.norm();
    if (nl > 0.0) b.left_pair = s.blocks.left_pair / nl;
    vecs.push_back(from_blocks(b));
  }
  for (int i = 0; i < s.sigma.size(); ++i) {
    CutBlocks b = zero;
    b.cross = s.u.col(i) * s.v.col(i).adjoint();
    vecs.push_back(from_blocks(b));
  }
  SectorEmbedding emb(psi.sector());
  const CMatrix h = emb.embed(k);
  Eigen::MatrixXd r(n, n);
  for (int j = 0; j < n; ++j) {
    const CVector hj = h * vecs[j];
    for (int i = 0; i < n; ++i) r(i, j) = vecs[i].dot(hj).imag();
  }
  return r;
}

RotationAudit angle_audit(const ControlTrajectory& traj, const StateVector& psi0,
                          const AuditOptions& options) {
  if (psi0.particles() != 2) throw DomainError("angle audit needs a two-particle state");
  if (options.subintervals < 2 || options.subintervals % 2 != 0)
    throw DomainError("Simpson audit needs an even number of subintervals");
  const int cuts = psi0.geometry().sites() - 1;
  std::vector<CutLayout> layouts;
  for (int p = 0; p < cuts; ++p) layouts.emplace_back(psi0.basis(), p);

  RotationAudit audit;
  audit.per_cut_integrals = Eigen::VectorXd::Zero(cuts);
  audit.cost = cost(traj);
  SectorEmbedding emb(psi0.sector());
  CVector psi = psi0.amplitudes();
  constexpr double kTwoRootTwo = 2.0 * M_SQRT2;

  for (const auto& step : traj.steps()) {
    const CMatrix h = emb.embed(step.k);
    const HermitianPropagator prop(h);
    const double knorm = step.k.norm();
    const int m = options.subintervals;
    const double hstep = step.dt / m;
    for (int j = 0; j <= m; ++j) {
      const CVector phi = prop.apply(psi, j * hstep);
      const CVector dphi = Complex(0.0, -1.0) * (h * phi);
      const double w = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      double sum_theta = 0.0;
      for (int p = 0; p < cuts; ++p) {
        const double th = rates_from_blocks(layouts[p], phi, dphi, p, 1e-9).theta;
        audit.per_cut_integrals(p) += w * hstep / 3.0 * th;
        sum_theta += th;
      }
      ++audit.evaluations;
      if (knorm > 0.0)
        audit.max_bound_ratio = std::max(audit.max_bound_ratio, sum_theta / (kTwoRootTwo * knorm));
    }
    psi = prop.apply(psi, step.dt);
  }

  const StateVector end(psi0.sector(), psi);
  audit.endpoint_arcs = Eigen::VectorXd::Zero(cuts);
  for (int p = 0; p < cuts; ++p) {
    audit.endpoint_arcs(p) =
        arc_distance(schmidt_spectrum(psi0, p).values, schmidt_spectrum(end, p).values);
    if (audit.per_cut_integrals(p) < audit.endpoint_arcs(p) - options.tolerance)
      throw ToleranceError("angle audit at cut " + std::to_string(p) + " integrates to " +
                           std::to_string(audit.per_cut_integrals(p)) +
                           ", below the endpoint arc " + std::to_string(audit.endpoint_arcs(p)) +
                           "; refine the quadrature");
  }
  audit.total_angle = audit.per_cut_integrals.sum();
  audit.lower_bound = audit.total_angle / kTwoRootTwo;
  return audit;
}

}  // namespace branchlab
