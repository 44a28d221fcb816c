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


// Batch entry point: parses flags (and an optional flat key = value config
// file), runs one subcommand and emits a JSON result document plus an
// optional CSV table.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace branchlab::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kArgumentError = 2,
  kCapExceeded = 3,
  kNonConvergence = 4,
};

/// Everything a subcommand may read. Zero-valued geometry fields mean "pick
/// the smallest lattice that fits".
struct RunConfig {
  std::string subcommand;
  // geometry
  int sites = 0;
  // physics
  int n = 2;
  double r = 0.0;                  // width (bounds, complexity, branch) or impulse (stern-gerlach)
  double theta = 0.0;
  double b = 0.1;
  long replicas = 10000;
  double q = 1.0;
  double w = 10.0;
  double d = 1.0;
  double m = 1.0;
  double t1 = 1.0;
  double a = 0.1;
  std::string mode = "point-pair";  // bounds / complexity / branch target family
  std::string state = "omega";      // branch: omega, omega-prime or product
  std::string oracle = "surrogate"; // branch: surrogate or optimizer
  // optimizer and caps
  int steps = 0;
  int restarts = 8;
  std::uint64_t seed = 1;
  long sector_cap = 2000;
  long closure_cap = 20000;
  // outputs
  std::string out;
  std::string config;
  std::string table;
};

/// Table of plot-ready rows, written as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  std::string to_csv() const;
};

/// metadata {version, seed, timestamp, subcommand}, inputs, outputs.
struct ResultDocument {
  Json metadata = Json::object();
  Json inputs = Json::object();
  Json outputs = Json::object();

  Json to_json() const;
  static ResultDocument from_json(const Json& j);
  std::string serialize() const;
  static ResultDocument parse(const std::string& text);

  bool operator==(const ResultDocument& o) const {
    return metadata == o.metadata && inputs == o.inputs && outputs == o.outputs;
  }
};

struct RunOutcome {
  int exit_code = kOk;
  std::string diagnostic;          // error text or help output
  ResultDocument document;         // empty unless exit_code == 0
  Table table;
  std::string document_path;       // set when the document went to --out
};

/// Parses `args` (without the program name), dispatches and writes --out
/// and --table if given. Never throws.
RunOutcome run(const std::vector<std::string>& args);

/// Parse only; throws CLI::ParseError on bad flags and DomainError on
/// out-of-range values.
RunConfig parse_config(const std::vector<std::string>& args);

}  // namespace branchlab::cli
