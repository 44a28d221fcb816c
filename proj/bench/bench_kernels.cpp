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


// Serial reference vs OpenMP for the data-parallel kernels. Set
// BRANCHLAB_THREADS to pin the thread count.

#include <benchmark/benchmark.h>

#include <random>

#include "branchlab/experiments.hpp"
#include "branchlab/kernels.hpp"
#include "branchlab/opspace.hpp"

namespace branchlab {
namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

BlockMatrix random_block(const std::vector<int>& dims, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  BlockMatrix m;
  for (int d : dims) {
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = Complex(nd(rng), nd(rng));
    m.push_back((a + a.adjoint()) / 2.0);
  }
  return m;
}

void BM_CommutatorBatch(benchmark::State& state) {
  std::mt19937_64 rng(1);
  // sector dimensions of a three-site line
  const std::vector<int> dims = {6, 15, 20, 15, 6};
  std::vector<BlockMatrix> a, b;
  for (int i = 0; i < 24; ++i) a.push_back(random_block(dims, rng));
  for (int i = 0; i < 16; ++i) b.push_back(random_block(dims, rng));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 16; ++j) pairs.emplace_back(i, j);
  for (auto _ : state)
    benchmark::DoNotOptimize(commutator_batch(a, b, pairs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pairs.size()));
}
BENCHMARK(BM_CommutatorBatch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_ContractElements(benchmark::State& state) {
  const auto geo = LatticeGeometry::line(5);
  auto sector = enumerate_sector(geo, 4);
  const EmbeddedBasis basis = embed_basis(sector);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  CMatrix w(sector->dim(), sector->dim());
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) w(i, j) = Complex(nd(rng), nd(rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(contract_elements(basis.elements, w, exec_of(state)));
}
BENCHMARK(BM_ContractElements)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMicrosecond);

void BM_BellEnsemble(benchmark::State& state) {
  BellConfig c;
  c.theta = 1.0;
  c.replicas = 100000;
  c.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(bell_ensemble(c));
  state.SetItemsProcessed(state.iterations() * c.replicas);
}
BENCHMARK(BM_BellEnsemble)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace branchlab

int main(int argc, char** argv) {
  branchlab::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
