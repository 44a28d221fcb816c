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

#include <stdexcept>
#include <string>

namespace branchlab {

/// Base class for all library errors. The CLI maps the concrete subclasses
/// onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, shape, geometry).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Construction produced the zero vector (e.g. two identical fermion modes).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (sector dimension, Lie closure dimension) was hit.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& what, long requested, long cap)
      : Error(what + " (requested " + std::to_string(requested) + ", cap " +
              std::to_string(cap) + ")"),
        requested_(requested),
        cap_(cap) {}

  long requested() const { return requested_; }
  long cap() const { return cap_; }

 private:
  long requested_;
  long cap_;
};

/// An iterative procedure failed to reach its target.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-consistency check failed (e.g. audit vs. endpoints).
class ToleranceError : public Error {
 public:
  using Error::Error;
};

}  // namespace branchlab
