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

#include "branchlab/complexity.hpp"
#include "branchlab/errors.hpp"

namespace branchlab {

ControlTrajectory& ControlTrajectory::add_step(double dt, ControlField k) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step duration must be positive");
  if (k.geometry() != geometry_) throw DomainError("step field lives on a different lattice");
  steps_.push_back({dt, std::move(k)});
  return *this;
}

double ControlTrajectory::total_duration() const {
  double t = 0.0;
  for (const auto& s : steps_) t += s.dt;
  return t;
}

ControlTrajectory ControlTrajectory::reparametrized(double factor) const {
  if (!(factor > 0.0)) throw DomainError("reparametrization factor must be positive");
  ControlTrajectory out(geometry_);
  for (const auto& s : steps_) out.add_step(s.dt / factor, s.k.scaled(factor));
  return out;
}

ControlTrajectory ControlTrajectory::normalized_duration() const {
  const double t = total_duration();
  if (t == 0.0) return *this;
  return reparametrized(t);
}

HermitianPropagator::HermitianPropagator(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NonConvergenceError("Hermitian eigensolver failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

CVector HermitianPropagator::apply(const CVector& psi, double dt) const {
  CVector c = evecs_.adjoint() * psi;
  for (int i = 0; i < c.size(); ++i) c(i) *= std::exp(Complex(0.0, -dt * evals_(i)));
  return evecs_ * c;
}

StateVector evolve(const ControlTrajectory& traj, const StateVector& psi0) {
  if (traj.geometry() != psi0.geometry())
    throw DomainError("trajectory and state live on different lattices");
  if (traj.empty()) return psi0;
  SectorEmbedding emb(psi0.sector());
  CVector psi = psi0.amplitudes();
  for (const auto& step : traj.steps()) {
    HermitianPropagator prop(emb.embed(step.k));
    psi = prop.apply(psi, step.dt);
  }
  return StateVector(psi0.sector(), std::move(psi));
}

double cost(const ControlTrajectory& traj) {
  double c = 0.0;
  for (const auto& s : traj.steps()) c += s.dt * s.k.norm();
  return c;
}

}  // namespace branchlab
