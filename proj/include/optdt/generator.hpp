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

// Seeded random scenarios shaped like layered AND/OR dependency graphs:
// source actions in the first rank, gated actions in later ranks, and one
// end action whose best outcome carries the only reward.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "optdt/error.hpp"
#include "optdt/rewarding.hpp"
#include "optdt/state.hpp"

namespace optdt {

struct GeneratorParams {
  std::size_t n_actions = 10;
  double budget = 6.0;
  int min_outcomes = 2;
  int max_outcomes = 3;
  /// Probabilities are multiples of 1 / probability_resolution, which must
  /// divide 1'000'000 so that every probability has an exact decimal form.
  int probability_resolution = 20;
  /// Chance that a gated action uses AND rather than OR.
  double and_fraction = 0.5;
  /// Chance of each extra parent beyond the first, up to max_parents.
  double dependency_density = 0.35;
  int max_parents = 3;
  /// Share of non-end actions placed in the source rank.
  double source_fraction = 0.3;
  /// Actions per gated rank.
  std::size_t rank_width = 3;
  std::uint64_t seed = 1;

  bool operator==(const GeneratorParams&) const = default;
};

inline void validate_params(const GeneratorParams& p) {
  if (p.n_actions < 2 || p.n_actions > 255) {
    throw ValidationError("n_actions must be in [2, 255]", "n_actions");
  }
  if (!(p.budget >= 0)) throw ValidationError("budget must be non-negative", "budget");
  if (p.min_outcomes < 1 || p.max_outcomes < p.min_outcomes || p.max_outcomes > 16) {
    throw ValidationError("outcome range must satisfy 1 <= min <= max <= 16",
                          "min_outcomes");
  }
  if (p.probability_resolution < p.max_outcomes ||
      1'000'000 % p.probability_resolution != 0) {
    throw ValidationError(
        "probability_resolution must divide 1000000 and be at least max_outcomes",
        "probability_resolution");
  }
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(p.and_fraction)) throw ValidationError("must be in [0, 1]", "and_fraction");
  if (!unit(p.dependency_density)) {
    throw ValidationError("must be in [0, 1]", "dependency_density");
  }
  if (!unit(p.source_fraction)) throw ValidationError("must be in [0, 1]", "source_fraction");
  if (p.max_parents < 1) throw ValidationError("must be at least 1", "max_parents");
  if (p.rank_width < 1) throw ValidationError("must be at least 1", "rank_width");
}

inline nlohmann::json params_to_json(const GeneratorParams& p) {
  return {{"n_actions", p.n_actions},
          {"budget", p.budget},
          {"min_outcomes", p.min_outcomes},
          {"max_outcomes", p.max_outcomes},
          {"probability_resolution", p.probability_resolution},
          {"and_fraction", p.and_fraction},
          {"dependency_density", p.dependency_density},
          {"max_parents", p.max_parents},
          {"source_fraction", p.source_fraction},
          {"rank_width", p.rank_width},
          {"seed", p.seed}};
}

/// Reads params from JSON; absent fields keep their defaults, unknown fields
/// are rejected.
inline GeneratorParams params_from_json(const nlohmann::json& j,
                                        GeneratorParams p = {}) {
  if (!j.is_object()) throw ValidationError("generator params must be an object", "");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n_actions") p.n_actions = v.get<std::size_t>();
      else if (key == "budget") p.budget = v.get<double>();
      else if (key == "min_outcomes") p.min_outcomes = v.get<int>();
      else if (key == "max_outcomes") p.max_outcomes = v.get<int>();
      else if (key == "probability_resolution") p.probability_resolution = v.get<int>();
      else if (key == "and_fraction") p.and_fraction = v.get<double>();
      else if (key == "dependency_density") p.dependency_density = v.get<double>();
      else if (key == "max_parents") p.max_parents = v.get<int>();
      else if (key == "source_fraction") p.source_fraction = v.get<double>();
      else if (key == "rank_width") p.rank_width = v.get<std::size_t>();
      else if (key == "seed") p.seed = v.get<std::uint64_t>();
      else throw ValidationError("unknown field \"" + key + "\"", key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad generator params: ") + e.what(), "");
  }
  validate_params(p);
  return p;
}

namespace detail {

/// Small deterministic sampling helpers over a 64-bit Mersenne twister, so
/// generated documents do not depend on the standard library's
/// distributions.
class GenRng {
 public:
  explicit GenRng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = eng_(); while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  bool chance(double p) {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53 < p;
  }

 private:
  std::mt19937_64 eng_;
};

/// Decimal text of units / resolution, exact because resolution | 10^6.
inline std::string probability_text(int units, int resolution) {
  const long long millionths = static_cast<long long>(units) * (1'000'000 / resolution);
  if (millionths == 1'000'000) return "1";
  std::string frac = std::to_string(millionths);
  frac.insert(0, 6 - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  return "0." + frac;
}

inline Scenario generate_once(const GeneratorParams& p, std::uint64_t seed) {
  GenRng rng(seed);
  const std::size_t n = p.n_actions;
  const std::size_t end = n - 1;
  const std::size_t gated = n - 1;
  std::size_t sources = static_cast<std::size_t>(
      std::max<double>(1.0, std::round(p.source_fraction * static_cast<double>(gated))));
  sources = std::min(sources, gated);

  // rank[i]: 0 for sources, then blocks of rank_width, end action last.
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = i < sources ? 0 : 1 + (i - sources) / p.rank_width;
  }
  rank[end] = (end > sources ? rank[end - 1] : 0) + 1;

  Scenario scn;
  scn.root_budget = p.budget;
  for (std::size_t i = 0; i < n; ++i) {
    ActionSpec a;
    a.id = "a" + std::to_string(i + 1);
    a.cost = 1.0;
    const int k = p.min_outcomes +
                  static_cast<int>(rng.below(static_cast<std::size_t>(
                      p.max_outcomes - p.min_outcomes + 1)));
    // Random composition of the resolution into k positive parts.
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < k - 1) {
      const int c = 1 + static_cast<int>(rng.below(
                            static_cast<std::size_t>(p.probability_resolution - 1)));
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(p.probability_resolution);
    int prev = 0;
    for (int j = 0; j < k; ++j) {
      a.outcomes.push_back({static_cast<OutcomeId>(j + 1),
                            make_probability(probability_text(
                                cuts[static_cast<std::size_t>(j)] - prev,
                                p.probability_resolution))});
      prev = cuts[static_cast<std::size_t>(j)];
    }
    scn.actions.push_back(std::move(a));
  }

  // Parent lists; each edge requires the parent's highest outcome.
  std::vector<std::vector<std::size_t>> parents(n);
  std::vector<bool> has_child(n, false);
  std::vector<bool> is_and(n, false);
  for (std::size_t i = sources; i < n; ++i) {
    std::vector<std::size_t> pool;
    for (std::size_t j = 0; j < i; ++j) {
      if (rank[j] < rank[i]) pool.push_back(j);
    }
    std::size_t want = 1;
    while (static_cast<int>(want) < p.max_parents && rng.chance(p.dependency_density)) ++want;
    want = std::min(want, pool.size());
    // Prefer the previous rank for the first parent so chains stay deep.
    std::vector<std::size_t> near;
    for (std::size_t j : pool) {
      if (rank[j] + 1 == rank[i]) near.push_back(j);
    }
    const std::size_t first = near[rng.below(near.size())];
    parents[i].push_back(first);
    while (parents[i].size() < want) {
      const std::size_t j = pool[rng.below(pool.size())];
      if (std::find(parents[i].begin(), parents[i].end(), j) == parents[i].end()) {
        parents[i].push_back(j);
      }
    }
    is_and[i] = rng.chance(p.and_fraction);
    for (std::size_t j : parents[i]) has_child[j] = true;
  }
  // Every dangling action feeds some later OR gate, or the end action.
  for (std::size_t j = 0; j < end; ++j) {
    if (has_child[j]) continue;
    std::vector<std::size_t> later;
    for (std::size_t i = j + 1; i < end; ++i) {
      if (rank[i] > rank[j] && !is_and[i] &&
          static_cast<int>(parents[i].size()) < p.max_parents) {
        later.push_back(i);
      }
    }
    const std::size_t target = later.empty() ? end : later[rng.below(later.size())];
    parents[target].push_back(j);
    has_child[j] = true;
  }
  for (std::size_t i = sources; i < n; ++i) {
    auto& pr = scn.actions[i].prereq;
    auto& set = is_and[i] ? pr.and_set : pr.or_set;
    std::sort(parents[i].begin(), parents[i].end());
    for (std::size_t j : parents[i]) {
      set.push_back({static_cast<ActionIndex>(j),
                     static_cast<OutcomeId>(scn.actions[j].outcomes.size())});
    }
  }
  scn.rewards.push_back(
      {{static_cast<ActionIndex>(end),
        static_cast<OutcomeId>(scn.actions[end].outcomes.size())},
       1.0});
  finalize_scenario(scn);
  return scn;
}

}  // namespace detail

inline constexpr int kGeneratorAttempts = 20;

/// Seeded scenario with at least one rewarding set that fits the budget.
/// Retries with derived seeds up to kGeneratorAttempts times.
inline Scenario generate_instance(const GeneratorParams& params) {
  validate_params(params);
  std::uint64_t seed = params.seed;
  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    Scenario scn = detail::generate_once(params, seed);
    const auto sets = enumerate_rewarding_sets(scn);
    const bool affordable = std::any_of(sets.begin(), sets.end(), [&](const RewardingSet& r) {
      return r.total_cost <= scn.root_budget + kTolerance;
    });
    if (affordable) return scn;
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  }
  throw GenerationError("no reachable reward after " +
                        std::to_string(kGeneratorAttempts) +
                        " attempts; raise the budget or lower n_actions");
}

}  // namespace optdt
