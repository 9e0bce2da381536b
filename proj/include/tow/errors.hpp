// Copyright 2026 The tow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tow {

using NodeId = std::size_t;

/// Malformed input to a library call (bad sizes, wrong node kind, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition does not hold. Carries the offending nodes.
class PreconditionViolation : public std::logic_error {
 public:
  PreconditionViolation(const std::string& what, std::vector<NodeId> nodes = {})
      : std::logic_error(what), nodes_(std::move(nodes)) {}
  const std::vector<NodeId>& nodes() const { return nodes_; }

 private:
  std::vector<NodeId> nodes_;
};

/// Input for which a transform is undefined (e.g. division by a zero scale).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant failed. Indicates a bug or a violated assumption.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An algorithm exhausted its search without producing an answer.
class AlgorithmFailure : public std::runtime_error {
 public:
  AlgorithmFailure(const std::string& what, std::vector<double> diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<double>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<double> diagnostics_;
};

/// Monte Carlo estimate with no terminated episode.
class EstimateUndefined : public std::runtime_error {
 public:
  explicit EstimateUndefined(double truncated_fraction)
      : std::runtime_error("estimate undefined: no episode terminated"),
        truncated_fraction_(truncated_fraction) {}
  double truncated_fraction() const { return truncated_fraction_; }

 private:
  double truncated_fraction_;
};

}  // namespace tow
