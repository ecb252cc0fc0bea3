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

#include <chrono>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>

#include "optdt/error.hpp"

namespace optdt {

/// Absolute tolerance for probability sums and score comparisons.
inline constexpr double kTolerance = 1e-9;

inline constexpr std::size_t kDefaultNodeCap = 50'000'000;

/// Node cap for graph builds; `OPTDT_NODE_CAP` overrides the default.
inline std::size_t default_node_cap() {
  if (const char* env = std::getenv("OPTDT_NODE_CAP"); env != nullptr) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) {
      return static_cast<std::size_t>(value);
    }
  }
  return kDefaultNodeCap;
}

/// Optional wall-clock limit shared by the stages of one solve.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(Clock::time_point at) : at_(at) {}

  template <class Rep, class Period>
  static Deadline after(std::chrono::duration<Rep, Period> d) {
    return Deadline(Clock::now() +
                    std::chrono::duration_cast<Clock::duration>(d));
  }

  bool unlimited() const noexcept { return !at_.has_value(); }
  bool expired() const { return at_ && Clock::now() >= *at_; }

  /// Throws TimeoutError naming `stage` once the deadline has passed.
  void check(const char* stage) const {
    if (expired()) {
      throw TimeoutError(std::string(stage) + ": time limit exceeded");
    }
  }

 private:
  std::optional<Clock::time_point> at_;
};

}  // namespace optdt
