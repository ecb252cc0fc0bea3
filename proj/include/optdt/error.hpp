// Copyright 2026 The optdt Authors.
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

namespace optdt {

/// Base class of every error raised by the solver.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent scenario input. `field()` holds the path of the
/// offending field (e.g. "actions[4].outcomes") when one is known.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A state entry fell outside its per-dimension domain.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::size_t dimension)
      : Error(message), dimension_(dimension) {}

  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::size_t dimension_;
};

/// The node cap of a graph build was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A solve stage ran past its deadline.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

/// The instance generator could not produce a usable scenario.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant broke (cycle, infeasible LP, malformed tree).
/// Seeing one of these means there is a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace optdt
