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

#include "branchlab/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "branchlab/errors.hpp"

namespace branchlab {

namespace {

std::optional<int> env_threads() {
  const char* s = std::getenv("BRANCHLAB_THREADS");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096)
    throw DomainError(std::string("BRANCHLAB_THREADS must be a positive integer, got '") + s +
                      "'");
  return static_cast<int>(v);
}

}  // namespace

int default_thread_count() {
  if (auto t = env_threads()) return *t;
  return omp_get_max_threads();
}

void configure_threads_from_env() {
  if (auto t = env_threads()) omp_set_num_threads(*t);
}

int hermitian_real_dimension(const std::vector<int>& dims) {
  int total = 0;
  for (int d : dims) total += d * d;
  return total;
}

Eigen::VectorXd hermitian_vectorize(const BlockMatrix& m) {
  std::vector<int> dims;
  for (const auto& b : m) dims.push_back(static_cast<int>(b.rows()));
  Eigen::VectorXd v(hermitian_real_dimension(dims));
  const double r2 = std::sqrt(2.0);
  int k = 0;
  for (const auto& b : m) {
    const int d = static_cast<int>(b.rows());
    for (int i = 0; i < d; ++i) v(k++) = b(i, i).real();
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        v(k++) = r2 * b(i, j).real();
        v(k++) = r2 * b(i, j).imag();
      }
  }
  return v;
}

BlockMatrix hermitian_unvectorize(const Eigen::VectorXd& v, const std::vector<int>& dims) {
  if (v.size() != hermitian_real_dimension(dims)) throw DomainError("vector length mismatch");
  const double r2 = 1.0 / std::sqrt(2.0);
  BlockMatrix out;
  int k = 0;
  for (int d : dims) {
    CMatrix b(d, d);
    for (int i = 0; i < d; ++i) b(i, i) = v(k++);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const Complex z(r2 * v(k), r2 * v(k + 1));
        k += 2;
        b(i, j) = z;
        b(j, i) = std::conj(z);
      }
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

Eigen::VectorXd commutator_column(const BlockMatrix& a, const BlockMatrix& b) {
  BlockMatrix c(a.size());
  const Complex i(0.0, 1.0);
  for (std::size_t s = 0; s < a.size(); ++s) c[s] = i * (a[s] * b[s] - b[s] * a[s]);
  return hermitian_vectorize(c);
}

}  // namespace

Eigen::MatrixXd commutator_batch(const std::vector<BlockMatrix>& a,
                                 const std::vector<BlockMatrix>& b,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 Execution exec) {
  if (pairs.empty()) return Eigen::MatrixXd(0, 0);
  std::vector<int> dims;
  for (const auto& blk : a.at(pairs[0].first)) dims.push_back(static_cast<int>(blk.rows()));
  const int rows = hermitian_real_dimension(dims);
  const long n = static_cast<long>(pairs.size());
  Eigen::MatrixXd out(rows, n);
  if (exec == Execution::kSerial) {
    for (long p = 0; p < n; ++p)
      out.col(p) = commutator_column(a[pairs[p].first], b[pairs[p].second]);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (long p = 0; p < n; ++p)
      out.col(p) = commutator_column(a[pairs[p].first], b[pairs[p].second]);
  }
  return out;
}

Eigen::VectorXd contract_elements(const std::vector<std::vector<SectorEmbedding::Entry>>& elements,
                                  const CMatrix& w, Execution exec) {
  const long n = static_cast<long>(elements.size());
  Eigen::VectorXd out(n);
  auto one = [&](long m) {
    double acc = 0.0;
    for (const auto& e : elements[m]) {
      const Complex p = e.value * w(e.row, e.col);
      acc += p.real();
    }
    out(m) = acc;
  };
  if (exec == Execution::kSerial) {
    for (long m = 0; m < n; ++m) one(m);
  } else {
#pragma omp parallel for schedule(static)
    for (long m = 0; m < n; ++m) one(m);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer applied to a counter-mixed state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace branchlab
