// Copyright 2026 The macromech Authors
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

namespace macromech {

/// Malformed or inconsistent experiment configuration / input table.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical or numerical invariant was violated (e.g. I > <b^dag b>).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative or adaptive numerical routine did not reach its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// The measurement record has (numerically) zero probability.
class DegenerateOutcome : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fock truncation too small for the requested tolerance.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int suggested_cutoff)
      : std::runtime_error(what), suggested_cutoff_(suggested_cutoff) {}

  int suggested_cutoff() const noexcept { return suggested_cutoff_; }

 private:
  int suggested_cutoff_;
};

}  // namespace macromech
