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

#include <string>

#include "optdt/scenario_io.hpp"

namespace fixtures {

inline std::string data_path(const std::string& relative) {
  return std::string(OPTDT_DATA_DIR) + "/" + relative;
}

inline optdt::Scenario illustrative() {
  return optdt::load_scenario(data_path("scenarios/illustrative.json"));
}

/// Raw expected reward of the illustrative example at budget 6, frozen from
/// oracle::best_policy_value (exhaustive recursion over all policies).
inline constexpr double kIllustrativePhiRaw = 8.43672;
inline constexpr double kIllustrativePhi = 0.0843672;

/// One-step scenario: a single action whose second outcome (p = 0.6) pays
/// 100.
inline optdt::Scenario single_action() {
  return optdt::parse_scenario(R"({
    "schema_version": 1, "budget": 1,
    "actions": [{"id": "a", "cost": 1, "outcomes": [
      {"id": 1, "probability": "0.4"}, {"id": 2, "probability": "0.6"}]}],
    "rewards": [{"action": "a", "outcome": 2, "value": 100}]})");
}

}  // namespace fixtures
