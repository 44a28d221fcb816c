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

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP implementation selected by Execution; both must agree to rounding.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "branchlab/opspace.hpp"

namespace branchlab {

enum class Execution { kSerial, kParallel };

/// Number of OpenMP threads, honouring BRANCHLAB_THREADS if set.
int default_thread_count();
/// Apply BRANCHLAB_THREADS (if set) to the OpenMP runtime.
void configure_threads_from_env();

/// Block-diagonal Hermitian matrix, one block per particle-number sector.
using BlockMatrix = std::vector<CMatrix>;

/// Real coordinates of a block Hermitian matrix: per block the diagonal,
/// then sqrt(2) Re and sqrt(2) Im of the strict upper triangle. The map is an
/// isometry from (Re Tr(A B)) to the Euclidean inner product.
Eigen::VectorXd hermitian_vectorize(const BlockMatrix& m);
BlockMatrix hermitian_unvectorize(const Eigen::VectorXd& v, const std::vector<int>& dims);
int hermitian_real_dimension(const std::vector<int>& dims);

/// Columns i[a_p.first, b_p.second] (vectorized) for every index pair p.
Eigen::MatrixXd commutator_batch(const std::vector<BlockMatrix>& a,
                                 const std::vector<BlockMatrix>& b,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 Execution exec);

/// out_m = Re sum_{(r,c,v) in elements[m]} v * w(r, c), the derivative
/// contraction used by the trajectory optimizer.
Eigen::VectorXd contract_elements(const std::vector<std::vector<SectorEmbedding::Entry>>& elements,
                                  const CMatrix& w, Execution exec);

/// Counter-based seed derivation: independent stream seeds per (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace branchlab
