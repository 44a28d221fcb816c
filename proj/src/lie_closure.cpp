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
#include "branchlab/kernels.hpp"
#include "branchlab/opspace.hpp"

namespace branchlab {

namespace {

// Growing orthonormal basis of a subspace of R^D.
class SpanBuilder {
 public:
  // `target` is the su(d) bound; reaching it ends the closure loop early.
  SpanBuilder(int dim, int target, double tol)
      : q_(dim, std::max(1, dim)), target_(target), tol_(tol) {}

  int rank() const { return rank_; }
  bool full() const { return rank_ >= target_ || rank_ == q_.cols(); }

  // Adds the components of the columns of `cands` outside the current span.
  // Returns the indices (into the basis) of newly accepted directions.
  std::vector<int> absorb(Eigen::MatrixXd cands) {
    std::vector<int> added;
    for (int j = 0; j < cands.cols(); ++j) {
      const double n = cands.col(j).norm();
      if (n > 0.0) cands.col(j) /= n;
    }
    if (rank_ > 0) {
      const auto q = q_.leftCols(rank_);
      for (int pass = 0; pass < 2; ++pass) cands -= q * (q.transpose() * cands);
    }
    const int first_new = rank_;
    for (int j = 0; j < cands.cols() && rank_ < q_.cols(); ++j) {
      Eigen::VectorXd v = cands.col(j);
      if (v.norm() <= tol_) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (int k = first_new; k < rank_; ++k) v -= q_.col(k).dot(v) * q_.col(k);
      const double n = v.norm();
      if (n <= tol_) continue;
      q_.col(rank_) = v / n;
      added.push_back(rank_);
      ++rank_;
    }
    return added;
  }

  Eigen::VectorXd column(int k) const { return q_.col(k); }

 private:
  Eigen::MatrixXd q_;
  int rank_ = 0;
  int target_;
  double tol_;
};

}  // namespace

LieClosureReport lie_closure(const LatticeGeometry& geometry, std::vector<int> sectors,
                             const LieClosureOptions& options) {
  const int modes = geometry.modes();
  if (sectors.empty())
    for (int n = 1; n <= modes - 1; ++n) sectors.push_back(n);

  LieClosureReport report;
  std::vector<SectorEmbedding> embeddings;
  std::vector<int> dims;
  for (int n : sectors) {
    if (n < 0 || n > modes) throw DomainError("sector particle number out of range");
    auto sector = enumerate_sector(geometry, n);
    report.sector_particles.push_back(n);
    report.sector_dimensions.push_back(sector->dim());
    report.expected_dimension += static_cast<long>(sector->dim()) * sector->dim() - 1;
    dims.push_back(sector->dim());
    embeddings.emplace_back(sector);
  }
  const long real_dim = hermitian_real_dimension(dims);
  if (real_dim > options.dimension_cap)
    throw CapExceededError("Lie closure matrix space too large", real_dim, options.dimension_cap);

  // Generators: every F and G basis element, traceless part per sector block.
  std::vector<BlockMatrix> generators;
  auto add_generator = [&](auto&& fill) {
    BlockMatrix g;
    for (std::size_t s = 0; s < embeddings.size(); ++s) {
      CMatrix m = CMatrix::Zero(dims[s], dims[s]);
      fill(embeddings[s], m);
      if (dims[s] > 0) m -= (m.trace() / static_cast<double>(dims[s])) *
                            CMatrix::Identity(dims[s], dims[s]);
      g.push_back(std::move(m));
    }
    generators.push_back(std::move(g));
  };
  for (int x = 0; x < geometry.sites(); ++x)
    for (const auto& b : local_basis_F())
      add_generator([&](const SectorEmbedding& e, CMatrix& m) { e.add_site(m, x, b); });
  for (const auto& pr : geometry.neighbor_pairs())
    for (const auto& b : local_basis_G())
      add_generator(
          [&](const SectorEmbedding& e, CMatrix& m) { e.add_pair(m, pr.first, pr.second, b); });
  report.generator_count = static_cast<int>(generators.size());

  SpanBuilder span(static_cast<int>(real_dim), static_cast<int>(report.expected_dimension),
                   options.rank_tolerance);

  Eigen::MatrixXd gen_cols(real_dim, generators.size());
  for (std::size_t i = 0; i < generators.size(); ++i)
    gen_cols.col(i) = hermitian_vectorize(generators[i]);
  std::vector<int> frontier = span.absorb(gen_cols);

  const Execution exec = options.parallel ? Execution::kParallel : Execution::kSerial;
  constexpr int kChunk = 512;
  while (!frontier.empty() && !span.full()) {
    ++report.iterations;
    std::vector<BlockMatrix> front;
    for (int k : frontier) front.push_back(hermitian_unvectorize(span.column(k), dims));
    std::vector<int> next;
    std::vector<std::pair<int, int>> pairs;
    auto flush = [&] {
      if (pairs.empty()) return;
      auto added = span.absorb(commutator_batch(generators, front, pairs, exec));
      next.insert(next.end(), added.begin(), added.end());
      pairs.clear();
    };
    for (std::size_t f = 0; f < front.size() && !span.full(); ++f) {
      for (std::size_t g = 0; g < generators.size(); ++g) {
        pairs.emplace_back(static_cast<int>(g), static_cast<int>(f));
        if (static_cast<int>(pairs.size()) == kChunk) {
          flush();
          if (span.full()) break;
        }
      }
    }
    if (!span.full()) flush();
    frontier = std::move(next);
  }

  report.closure_dimension = span.rank();
  report.pass = report.closure_dimension == report.expected_dimension;
  return report;
}

}  // namespace branchlab
