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


#include <iostream>
#include <string>
#include <vector>

#include "branchlab/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const auto outcome = branchlab::cli::run(args);
  if (outcome.exit_code != 0) {
    std::cerr << outcome.diagnostic << '\n';
    return outcome.exit_code;
  }
  if (!outcome.diagnostic.empty()) {
    std::cout << outcome.diagnostic;  // help
    return 0;
  }
  if (outcome.document_path.empty()) std::cout << outcome.document.serialize();
  return 0;
}
