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

#pragma once

#include <vector>

#include "branchlab/fock.hpp"

namespace branchlab {

/// gamma(i, j) = <psi| a^dag_i a_j |psi> over modes (site-major, up first).
CMatrix one_body_density(const StateVector& psi);

/// Orbital sets whose product states overlap strongly with psi, best first:
/// largest basis amplitudes and natural orbitals projected to position-spin
/// products.
std::vector<std::vector<Orbital>> nearby_product_orbitals(const StateVector& psi, int count);

}  // namespace branchlab
