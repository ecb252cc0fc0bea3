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

// States, actions and scenarios, plus the budget, reward and availability
// functions every later stage is built on.
//
// Dimension i of a state is action i. Entry 0 means "not taken"; entry k >= 1
// means "taken, outcome k". Outcome k of action i therefore moves the state by
// k * e_i.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "optdt/error.hpp"
#include "optdt/limits.hpp"

namespace optdt {

using ActionIndex = std::uint32_t;
using OutcomeId = std::uint32_t;

inline constexpr int kMaxOutcomeId = 255;

/// Outcome vector of a scenario. Stored as one byte per action so that the
/// byte string doubles as the canonical graph key.
class State {
 public:
  State() = default;
  explicit State(std::size_t n) : bytes_(n, '\0') {}
  State(std::initializer_list<int> values)
      : State(std::span<const int>(values.begin(), values.size())) {}

  explicit State(std::span<const int> values) : bytes_(values.size(), '\0') {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0 || values[i] > kMaxOutcomeId) {
        throw DomainError("state entry " + std::to_string(values[i]) +
                              " at dimension " + std::to_string(i) +
                              " is outside [0, 255]",
                          i);
      }
      bytes_[i] = static_cast<char>(values[i]);
    }
  }

  std::size_t size() const noexcept { return bytes_.size(); }

  int operator[](std::size_t i) const noexcept {
    return static_cast<unsigned char>(bytes_[i]);
  }

  bool taken(std::size_t i) const noexcept { return bytes_[i] != '\0'; }

  /// Copy of this state with dimension `i` set to `value`.
  State with_entry(std::size_t i, int value) const {
    State out = *this;
    out.bytes_[i] = static_cast<char>(value);
    return out;
  }

  /// Canonical byte encoding used as the graph key.
  const std::string& key() const noexcept { return bytes_; }

  std::vector<int> values() const {
    std::vector<int> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)[i];
    return out;
  }

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) out += ',';
      out += std::to_string((*this)[i]);
    }
    return out + "]";
  }

  bool operator==(const State&) const = default;
  auto operator<=>(const State&) const = default;

 private:
  std::string bytes_;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept {
    return std::hash<std::string>{}(s.key());
  }
};

struct ActionOutcomePair {
  ActionIndex action = 0;
  OutcomeId outcome = 0;

  bool operator==(const ActionOutcomePair&) const = default;
  auto operator<=>(const ActionOutcomePair&) const = default;
};

/// Outcome probability. The decimal text is kept so that scenario files
/// round-trip exactly and sums can be checked in exact arithmetic.
struct Probability {
  std::string decimal;
  double value = 0.0;

  bool operator==(const Probability&) const = default;
};

/// Parses a plain decimal literal ("0.4", "1", ".25") into an exact rational.
inline std::optional<boost::multiprecision::cpp_rational> parse_decimal(
    std::string_view text) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  if (text.empty()) return std::nullopt;
  cpp_int numerator = 0;
  cpp_int denominator = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      numerator = numerator * 10 + (c - '0');
      if (seen_point) denominator *= 10;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  return cpp_rational(numerator, denominator);
}

/// Builds a Probability from decimal text; throws ValidationError when the
/// text is not a decimal in (0, 1].
inline Probability make_probability(std::string_view text) {
  const auto exact = parse_decimal(text);
  if (!exact) {
    throw ValidationError("probability \"" + std::string(text) +
                          "\" is not a plain decimal string");
  }
  if (*exact <= 0 || *exact > 1) {
    throw ValidationError("probability " + std::string(text) +
                          " is outside (0, 1]");
  }
  return Probability{std::string(text), static_cast<double>(*exact)};
}

struct OutcomeSpec {
  OutcomeId id = 0;
  Probability probability;

  bool operator==(const OutcomeSpec&) const = default;
};

/// Prerequisite logic of one action. AND pairs must all have occurred, at
/// least one OR pair must have occurred, no NOTAND pair may have occurred and
/// not every NOTOR pair may have occurred. Empty sets impose nothing.
struct PrereqExpr {
  std::vector<ActionOutcomePair> and_set;
  std::vector<ActionOutcomePair> or_set;
  std::vector<ActionOutcomePair> notand_set;
  std::vector<ActionOutcomePair> notor_set;

  bool empty() const noexcept {
    return and_set.empty() && or_set.empty() && notand_set.empty() &&
           notor_set.empty();
  }

  bool operator==(const PrereqExpr&) const = default;
};

struct ActionSpec {
  std::string id;
  double cost = 0.0;
  bool repeatable = false;
  std::vector<OutcomeSpec> outcomes;
  PrereqExpr prereq;

  const OutcomeSpec* find_outcome(OutcomeId outcome) const {
    for (const auto& o : outcomes) {
      if (o.id == outcome) return &o;
    }
    return nullptr;
  }

  bool operator==(const ActionSpec&) const = default;
};

struct RewardPair {
  ActionOutcomePair pair;
  double value = 0.0;  // raw, before normalization

  bool operator==(const RewardPair&) const = default;
};

/// Action catalog, prerequisite logic, rewards and budget of one decision
/// problem. Call `finalize_scenario` after filling the fields by hand.
struct Scenario {
  std::vector<ActionSpec> actions;
  double root_budget = 0.0;
  std::vector<RewardPair> rewards;
  /// Raw rewards are divided by this (the largest raw reward) internally.
  double reward_scale = 1.0;
  /// State the solve starts from; the all-zeros state unless re-solving.
  State root_state;

  std::size_t action_count() const noexcept { return actions.size(); }

  std::optional<ActionIndex> find_action(std::string_view id) const {
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i].id == id) return static_cast<ActionIndex>(i);
    }
    return std::nullopt;
  }

  bool operator==(const Scenario&) const = default;
};

namespace detail {

inline std::string action_field(std::size_t i, const ActionSpec& a) {
  return "actions[" + std::to_string(i) + "] (" + a.id + ")";
}

inline void check_pairs(const Scenario& scn,
                        const std::vector<ActionOutcomePair>& pairs,
                        const std::string& field) {
  for (const auto& p : pairs) {
    if (p.action >= scn.actions.size()) {
      throw ValidationError("prerequisite references unknown action index " +
                                std::to_string(p.action),
                            field);
    }
    if (scn.actions[p.action].find_outcome(p.outcome) == nullptr) {
      throw ValidationError("prerequisite references unknown outcome " +
                                std::to_string(p.outcome) + " of action " +
                                scn.actions[p.action].id,
                            field);
    }
  }
}

}  // namespace detail

/// Checks every scenario invariant and fills the derived fields
/// (reward_scale, root_state). Throws ValidationError on the first problem.
inline void finalize_scenario(Scenario& scn) {
  using boost::multiprecision::cpp_rational;
  if (scn.actions.empty()) throw ValidationError("no actions", "actions");
  if (!(scn.root_budget >= 0.0)) {
    throw ValidationError("budget must be non-negative", "budget");
  }
  for (std::size_t i = 0; i < scn.actions.size(); ++i) {
    const ActionSpec& a = scn.actions[i];
    const std::string field = detail::action_field(i, a);
    if (a.id.empty()) throw ValidationError("empty action id", field);
    for (std::size_t j = 0; j < i; ++j) {
      if (scn.actions[j].id == a.id) {
        throw ValidationError("duplicate action id " + a.id, field);
      }
    }
    if (!(a.cost >= 0.0)) {
      throw ValidationError("negative cost for action " + a.id, field);
    }
    if (a.outcomes.empty()) {
      throw ValidationError("action " + a.id + " has no outcomes", field);
    }
    cpp_rational exact_sum = 0;
    double float_sum = 0.0;
    bool all_exact = true;
    for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
      const OutcomeSpec& o = a.outcomes[k];
      if (o.id < 1 || o.id > static_cast<OutcomeId>(kMaxOutcomeId)) {
        throw ValidationError("outcome id " + std::to_string(o.id) +
                                  " of action " + a.id +
                                  " is outside [1, 255]",
                              field + ".outcomes");
      }
      for (std::size_t m = 0; m < k; ++m) {
        if (a.outcomes[m].id == o.id) {
          throw ValidationError("duplicate outcome id " +
                                    std::to_string(o.id) + " in action " + a.id,
                                field + ".outcomes");
        }
      }
      if (!(o.probability.value > 0.0 && o.probability.value <= 1.0)) {
        throw ValidationError("probability of outcome " +
                                  std::to_string(o.id) + " of action " + a.id +
                                  " is outside (0, 1]",
                              field + ".outcomes");
      }
      float_sum += o.probability.value;
      if (auto exact = parse_decimal(o.probability.decimal)) {
        exact_sum += *exact;
      } else {
        all_exact = false;
      }
    }
    const double deviation =
        all_exact ? std::abs(static_cast<double>(exact_sum - 1))
                  : std::abs(float_sum - 1.0);
    if (deviation > kTolerance) {
      throw ValidationError("outcome probabilities of action " + a.id +
                                " sum to " + std::to_string(float_sum) +
                                ", expected 1",
                            field + ".outcomes");
    }
  }
  for (std::size_t i = 0; i < scn.actions.size(); ++i) {
    const ActionSpec& a = scn.actions[i];
    const std::string field = detail::action_field(i, a) + ".prereq";
    detail::check_pairs(scn, a.prereq.and_set, field + ".and");
    detail::check_pairs(scn, a.prereq.or_set, field + ".or");
    detail::check_pairs(scn, a.prereq.notand_set, field + ".notand");
    detail::check_pairs(scn, a.prereq.notor_set, field + ".notor");
  }
  if (scn.rewards.empty()) {
    throw ValidationError("at least one reward is required", "rewards");
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < scn.rewards.size(); ++i) {
    const RewardPair& r = scn.rewards[i];
    const std::string field = "rewards[" + std::to_string(i) + "]";
    if (!(r.value > 0.0)) {
      throw ValidationError("reward values must be positive", field);
    }
    detail::check_pairs(scn, {r.pair}, field);
    scale = std::max(scale, r.value);
  }
  scn.reward_scale = scale;
  if (scn.root_state.size() == 0) {
    scn.root_state = State(scn.actions.size());
  } else if (scn.root_state.size() != scn.actions.size()) {
    throw ValidationError("root state has " +
                              std::to_string(scn.root_state.size()) +
                              " entries, expected " +
                              std::to_string(scn.actions.size()),
                          "root_state");
  }
  for (std::size_t i = 0; i < scn.root_state.size(); ++i) {
    const int v = scn.root_state[i];
    if (v != 0 && scn.actions[i].find_outcome(static_cast<OutcomeId>(v)) ==
                      nullptr) {
      throw ValidationError("entry " + std::to_string(v) +
                                " is not an outcome of action " +
                                scn.actions[i].id,
                            "root_state[" + std::to_string(i) + "]");
    }
  }
}

/// Transition vector of (action, outcome) in the default encoding.
inline std::vector<int> transition(const Scenario& scn, ActionIndex action,
                                   OutcomeId outcome) {
  std::vector<int> delta(scn.action_count(), 0);
  delta.at(action) = static_cast<int>(outcome);
  return delta;
}

/// Ordered per-dimension sets of attainable values.
struct StateDomain {
  std::vector<std::vector<int>> values;

  bool contains(std::size_t dim, int v) const {
    const auto& d = values[dim];
    return std::binary_search(d.begin(), d.end(), v);
  }
};

/// {0} plus every outcome id, per action.
inline StateDomain domain_of(const Scenario& scn) {
  StateDomain dom;
  dom.values.reserve(scn.action_count());
  for (const auto& a : scn.actions) {
    std::vector<int> d{0};
    for (const auto& o : a.outcomes) d.push_back(static_cast<int>(o.id));
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    dom.values.push_back(std::move(d));
  }
  return dom;
}

/// s + delta, entry-wise. Throws DomainError naming the first dimension that
/// leaves its domain.
inline State apply_outcome(const StateDomain& dom, const State& s,
                           std::span<const int> delta) {
  if (delta.size() != s.size() || dom.values.size() != s.size()) {
    throw DomainError("transition has " + std::to_string(delta.size()) +
                          " entries, state has " + std::to_string(s.size()),
                      std::min(delta.size(), s.size()));
  }
  std::vector<int> next(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    next[i] = s[i] + delta[i];
    if (!dom.contains(i, next[i])) {
      throw DomainError("dimension " + std::to_string(i) + " value " +
                            std::to_string(next[i]) + " is outside its domain",
                        i);
    }
  }
  return State(std::span<const int>(next));
}

/// Index of a state in the mixed-radix basis induced by the domain:
/// sum_i #{x in dom_i : x < s_i} * prod_{j<i} |dom_j|, so indices run from 0
/// to prod_i |dom_i| - 1.
inline boost::multiprecision::cpp_int state_index(const StateDomain& dom,
                                                  std::span<const int> s) {
  using boost::multiprecision::cpp_int;
  if (s.size() != dom.values.size()) {
    throw DomainError("state has " + std::to_string(s.size()) +
                          " entries, domain has " +
                          std::to_string(dom.values.size()),
                      std::min(s.size(), dom.values.size()));
  }
  cpp_int index = 0;
  cpp_int radix = 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& d = dom.values[i];
    if (!dom.contains(i, s[i])) {
      throw DomainError("dimension " + std::to_string(i) + " value " +
                            std::to_string(s[i]) + " is outside its domain",
                        i);
    }
    const auto rank = std::lower_bound(d.begin(), d.end(), s[i]) - d.begin();
    index += radix * rank;
    radix *= d.size();
  }
  return index;
}

inline boost::multiprecision::cpp_int state_index(const StateDomain& dom,
                                                  const State& s) {
  const auto v = s.values();
  return state_index(dom, std::span<const int>(v));
}

/// Root budget minus the cost of every action taken since the root state.
inline double remaining_budget(const Scenario& scn, const State& s) {
  double budget = scn.root_budget;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.taken(i) && !scn.root_state.taken(i)) budget -= scn.actions[i].cost;
  }
  return budget;
}

/// Largest raw reward whose (action, outcome) pair has occurred in `s`.
inline double raw_reward(const Scenario& scn, const State& s) {
  double best = 0.0;
  for (const auto& r : scn.rewards) {
    if (s[r.pair.action] == static_cast<int>(r.pair.outcome)) {
      best = std::max(best, r.value);
    }
  }
  return best;
}

/// Normalized reward in [0, 1].
inline double reward(const Scenario& scn, const State& s) {
  return raw_reward(scn, s) / scn.reward_scale;
}

inline bool pair_occurred(const State& s, const ActionOutcomePair& p) {
  return s[p.action] == static_cast<int>(p.outcome);
}

inline bool prerequisites_met(const PrereqExpr& e, const State& s) {
  const auto occurred = [&](const ActionOutcomePair& p) {
    return pair_occurred(s, p);
  };
  if (!std::all_of(e.and_set.begin(), e.and_set.end(), occurred)) return false;
  if (!e.or_set.empty() &&
      std::none_of(e.or_set.begin(), e.or_set.end(), occurred)) {
    return false;
  }
  if (std::any_of(e.notand_set.begin(), e.notand_set.end(), occurred)) {
    return false;
  }
  if (!e.notor_set.empty() &&
      std::all_of(e.notor_set.begin(), e.notor_set.end(), occurred)) {
    return false;
  }
  return true;
}

/// Actions whose prerequisites hold at `s` and whose cost fits in `budget`.
/// A taken action is never offered again: the encoding has no room to record
/// a second outcome of the same action.
inline std::vector<ActionIndex> available_actions(const Scenario& scn,
                                                  const State& s,
                                                  double budget) {
  std::vector<ActionIndex> out;
  for (std::size_t i = 0; i < scn.actions.size(); ++i) {
    const ActionSpec& a = scn.actions[i];
    if (s.taken(i)) continue;
    if (a.cost > budget + kTolerance) continue;
    if (!prerequisites_met(a.prereq, s)) continue;
    out.push_back(static_cast<ActionIndex>(i));
  }
  return out;
}

inline std::vector<ActionIndex> available_actions(const Scenario& scn,
                                                  const State& s) {
  return available_actions(scn, s, remaining_budget(scn, s));
}

}  // namespace optdt
