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

// Scenario documents: JSON with an explicit schema version.
//
//   {
//     "schema_version": 1,
//     "budget": 6,
//     "actions": [
//       {"id": "a4", "cost": 1, "repeatable": false,
//        "outcomes": [{"id": 1, "probability": "0.7"},
//                     {"id": 2, "probability": "0.3"}],
//        "prereq": {"or": [["a1", 2], ["a3", 2]]}}
//     ],
//     "rewards": [{"action": "a5", "outcome": 2, "value": 50}]
//   }
//
// Probabilities are decimal strings. Unknown fields are rejected. Missing
// "repeatable" and "prereq" default to false and no prerequisites.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "optdt/error.hpp"
#include "optdt/state.hpp"

namespace optdt {

inline constexpr int kScenarioSchemaVersion = 1;

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                           const std::string& field) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("unknown field \"" + key + "\"", field);
  }
}

inline const json& require(const json& obj, const char* key, const std::string& field) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(std::string("missing field \"") + key + "\"", field);
  }
  return *it;
}

inline double require_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError("expected a number", field);
  return v.get<double>();
}

inline std::string require_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError("expected a string", field);
  return v.get<std::string>();
}

inline OutcomeId require_outcome_id(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError("expected an integer outcome id", field);
  const auto id = v.get<long long>();
  if (id < 1 || id > kMaxOutcomeId) {
    throw ValidationError("outcome id " + std::to_string(id) + " is outside [1, 255]",
                          field);
  }
  return static_cast<OutcomeId>(id);
}

inline ActionIndex resolve_action(const Scenario& scn, const std::string& id,
                                  const std::string& field) {
  auto a = scn.find_action(id);
  if (!a) throw ValidationError("unknown action \"" + id + "\"", field);
  return *a;
}

inline std::vector<ActionOutcomePair> parse_pairs(const Scenario& scn, const json& v,
                                                  const std::string& field) {
  if (!v.is_array()) throw ValidationError("expected a list of [action, outcome]", field);
  std::vector<ActionOutcomePair> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const json& p = v[i];
    if (!p.is_array() || p.size() != 2) {
      throw ValidationError("expected [action, outcome]", f);
    }
    const ActionIndex a = resolve_action(scn, require_string(p[0], f), f);
    out.push_back({a, require_outcome_id(p[1], f)});
  }
  return out;
}

/// Integral values are written as JSON integers so documents stay tidy.
inline json number(double v) {
  if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<long long>(v);
  return v;
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

}  // namespace detail

/// Builds and validates a Scenario from a parsed scenario document.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
  using detail::require;
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object", "");
  detail::reject_unknown(doc, {"schema_version", "budget", "actions", "rewards"}, "");
  const auto& version = require(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion) {
    throw ValidationError("unsupported schema_version (expected " +
                              std::to_string(kScenarioSchemaVersion) + ")",
                          "schema_version");
  }
  Scenario scn;
  scn.root_budget = detail::require_number(require(doc, "budget", ""), "budget");
  const auto& actions = require(doc, "actions", "");
  if (!actions.is_array()) throw ValidationError("expected a list", "actions");

  // Ids first so prerequisites may refer to later actions.
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string field = "actions[" + std::to_string(i) + "]";
    const auto& a = actions[i];
    if (!a.is_object()) throw ValidationError("expected an object", field);
    detail::reject_unknown(a, {"id", "cost", "repeatable", "outcomes", "prereq"}, field);
    ActionSpec spec;
    spec.id = detail::require_string(require(a, "id", field), field + ".id");
    scn.actions.push_back(std::move(spec));
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    ActionSpec& spec = scn.actions[i];
    const std::string field = "actions[" + std::to_string(i) + "] (" + spec.id + ")";
    spec.cost = detail::require_number(require(a, "cost", field), field + ".cost");
    if (auto it = a.find("repeatable"); it != a.end()) {
      if (!it->is_boolean()) throw ValidationError("expected a boolean", field + ".repeatable");
      spec.repeatable = it->get<bool>();
    }
    const auto& outcomes = require(a, "outcomes", field);
    if (!outcomes.is_array()) throw ValidationError("expected a list", field + ".outcomes");
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      const std::string f = field + ".outcomes[" + std::to_string(k) + "]";
      const auto& o = outcomes[k];
      if (!o.is_object()) throw ValidationError("expected an object", f);
      detail::reject_unknown(o, {"id", "probability"}, f);
      OutcomeSpec out;
      out.id = detail::require_outcome_id(require(o, "id", f), f + ".id");
      const auto& p = require(o, "probability", f);
      if (!p.is_string()) {
        throw ValidationError("probability of action " + spec.id +
                                  " must be a decimal string such as \"0.4\"",
                              f + ".probability");
      }
      try {
        out.probability = make_probability(p.get<std::string>());
      } catch (const ValidationError& e) {
        throw ValidationError("action " + spec.id + ": " + e.what(), f + ".probability");
      }
      spec.outcomes.push_back(std::move(out));
    }
    if (auto it = a.find("prereq"); it != a.end()) {
      const std::string f = field + ".prereq";
      if (!it->is_object()) throw ValidationError("expected an object", f);
      detail::reject_unknown(*it, {"and", "or", "notand", "notor"}, f);
      const auto list = [&](const char* key) {
        auto jt = it->find(key);
        if (jt == it->end()) return std::vector<ActionOutcomePair>{};
        return detail::parse_pairs(scn, *jt, f + "." + key);
      };
      spec.prereq.and_set = list("and");
      spec.prereq.or_set = list("or");
      spec.prereq.notand_set = list("notand");
      spec.prereq.notor_set = list("notor");
    }
  }
  const auto& rewards = require(doc, "rewards", "");
  if (!rewards.is_array()) throw ValidationError("expected a list", "rewards");
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const std::string f = "rewards[" + std::to_string(i) + "]";
    const auto& r = rewards[i];
    if (!r.is_object()) throw ValidationError("expected an object", f);
    detail::reject_unknown(r, {"action", "outcome", "value"}, f);
    RewardPair pair;
    pair.pair.action = detail::resolve_action(
        scn, detail::require_string(require(r, "action", f), f + ".action"), f + ".action");
    pair.pair.outcome = detail::require_outcome_id(require(r, "outcome", f), f + ".outcome");
    pair.value = detail::require_number(require(r, "value", f), f + ".value");
    scn.rewards.push_back(pair);
  }
  finalize_scenario(scn);
  return scn;
}

/// Parses scenario text. Syntax errors report line and column.
inline Scenario parse_scenario(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t line = detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ValidationError("line " + std::to_string(line) + ": " + e.what(), "");
  }
  return scenario_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

inline nlohmann::json scenario_to_json(const Scenario& scn) {
  using nlohmann::json;
  const auto pairs = [&](const std::vector<ActionOutcomePair>& ps) {
    json out = json::array();
    for (const auto& p : ps) out.push_back({scn.actions[p.action].id, p.outcome});
    return out;
  };
  json actions = json::array();
  for (const auto& a : scn.actions) {
    json outcomes = json::array();
    for (const auto& o : a.outcomes) {
      outcomes.push_back({{"id", o.id}, {"probability", o.probability.decimal}});
    }
    json entry = {{"id", a.id},
                  {"cost", detail::number(a.cost)},
                  {"repeatable", a.repeatable},
                  {"outcomes", std::move(outcomes)}};
    if (!a.prereq.empty()) {
      json prereq = json::object();
      if (!a.prereq.and_set.empty()) prereq["and"] = pairs(a.prereq.and_set);
      if (!a.prereq.or_set.empty()) prereq["or"] = pairs(a.prereq.or_set);
      if (!a.prereq.notand_set.empty()) prereq["notand"] = pairs(a.prereq.notand_set);
      if (!a.prereq.notor_set.empty()) prereq["notor"] = pairs(a.prereq.notor_set);
      entry["prereq"] = std::move(prereq);
    }
    actions.push_back(std::move(entry));
  }
  json rewards = json::array();
  for (const auto& r : scn.rewards) {
    rewards.push_back({{"action", scn.actions[r.pair.action].id},
                       {"outcome", r.pair.outcome},
                       {"value", detail::number(r.value)}});
  }
  return {{"schema_version", kScenarioSchemaVersion},
          {"budget", detail::number(scn.root_budget)},
          {"actions", std::move(actions)},
          {"rewards", std::move(rewards)}};
}

inline std::string serialize_scenario(const Scenario& scn) {
  return scenario_to_json(scn).dump(2) + "\n";
}

}  // namespace optdt
