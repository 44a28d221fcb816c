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


#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <set>

#include "branchlab/kernels.hpp"
#include "branchlab/opspace.hpp"

namespace branchlab {
namespace {

CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return (a + a.adjoint()) / 2.0;
}

BlockMatrix random_block(const std::vector<int>& dims, std::mt19937_64& rng) {
  BlockMatrix m;
  for (int d : dims) m.push_back(random_hermitian(d, rng));
  return m;
}

TEST(Vectorize, IsAnIsometryAndInvertible) {
  std::mt19937_64 rng(1);
  const std::vector<int> dims = {3, 1, 4};
  const auto a = random_block(dims, rng);
  const auto b = random_block(dims, rng);
  const Eigen::VectorXd va = hermitian_vectorize(a);
  ASSERT_EQ(va.size(), hermitian_real_dimension(dims));
  double trace = 0.0;
  for (std::size_t i = 0; i < dims.size(); ++i) trace += (a[i] * b[i]).trace().real();
  EXPECT_NEAR(va.dot(hermitian_vectorize(b)), trace, 1e-12);
  const auto back = hermitian_unvectorize(va, dims);
  for (std::size_t i = 0; i < dims.size(); ++i) EXPECT_LT((back[i] - a[i]).norm(), 1e-14);
}

TEST(CommutatorBatch, ParallelMatchesSerialAndDirect) {
  std::mt19937_64 rng(2);
  const std::vector<int> dims = {4, 6};
  std::vector<BlockMatrix> a, b;
  for (int i = 0; i < 5; ++i) a.push_back(random_block(dims, rng));
  for (int i = 0; i < 4; ++i) b.push_back(random_block(dims, rng));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) pairs.emplace_back(i, j);
  const Eigen::MatrixXd serial = commutator_batch(a, b, pairs, Execution::kSerial);
  const Eigen::MatrixXd parallel = commutator_batch(a, b, pairs, Execution::kParallel);
  EXPECT_EQ((serial - parallel).norm(), 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    BlockMatrix c;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const CMatrix& x = a[pairs[p].first][k];
      const CMatrix& y = b[pairs[p].second][k];
      c.push_back(Complex(0, 1) * (x * y - y * x));
    }
    EXPECT_LT((serial.col(p) - hermitian_vectorize(c)).norm(), 1e-12);
  }
}

TEST(ContractElements, ParallelMatchesSerialAndDenseEmbedding) {
  const auto geo = LatticeGeometry::line(3);
  auto sector = enumerate_sector(geo, 2);
  const EmbeddedBasis basis = embed_basis(sector);
  ASSERT_EQ(static_cast<int>(basis.elements.size()), ControlField::parameter_count(geo));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  CMatrix w(sector->dim(), sector->dim());
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) w(i, j) = Complex(nd(rng), nd(rng));
  const Eigen::VectorXd serial = contract_elements(basis.elements, w, Execution::kSerial);
  const Eigen::VectorXd parallel = contract_elements(basis.elements, w, Execution::kParallel);
  EXPECT_LT((serial - parallel).norm(), 1e-12);
  // element m is the embedding of the m-th unit coefficient field
  for (int m = 0; m < serial.size(); m += 7) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(serial.size());
    c(m) = 1.0;
    const CMatrix e = embed(ControlField::from_coefficients(geo, c), *sector);
    EXPECT_NEAR(serial(m), e.cwiseProduct(w).sum().real(), 1e-12);
  }
}

TEST(Seeds, DerivedStreamsAreDeterministicAndDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    EXPECT_EQ(derive_seed(7, i), derive_seed(7, i));
    seen.insert(derive_seed(7, i));
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

TEST(Threads, EnvironmentOverride) {
  setenv("BRANCHLAB_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3);
  unsetenv("BRANCHLAB_THREADS");
  EXPECT_GE(default_thread_count(), 1);
}

}  // namespace
}  // namespace branchlab
