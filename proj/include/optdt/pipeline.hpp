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

// End-to-end solve: rewarding sets, full graph, scores, reduced graph and
// decision tree, with per-stage wall times.

#include <chrono>
#include <cstdint>
#include <optional>

#include "optdt/graph.hpp"
#include "optdt/rewarding.hpp"
#include "optdt/tree.hpp"

namespace optdt {

enum class TieBreak { node_count, random };

struct SolveOptions {
  bool naive = false;
  QueueDiscipline discipline = QueueDiscipline::lifo;
  TieBreak tie_break = TieBreak::node_count;
  std::uint64_t seed = 0;
  std::size_t node_cap = default_node_cap();
  std::optional<std::chrono::milliseconds> timeout{};
};

/// Stage wall times in seconds.
struct StageTimings {
  double rewarding_sets = 0.0;
  double full_graph = 0.0;
  double reduced_graph = 0.0;
  double decision_tree = 0.0;
  double total = 0.0;
};

struct SolveResult {
  StateGraph full{GraphKind::full};
  StateGraph reduced{GraphKind::reduced};
  StateGraph tree{GraphKind::tree};
  RewardingSetBundle root_bundle;  // empty for naive solves
  double phi = 0.0;                // normalized score of the root
  double phi_raw = 0.0;
  StageTimings timings;
  EnumerationStats enumeration;
};

namespace detail {

class StageClock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Solves `scn` from its root state and root budget.
inline SolveResult solve(const Scenario& scn, const SolveOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  const Deadline deadline =
      options.timeout ? Deadline::after(*options.timeout) : Deadline{};
  const BuildOptions build{options.discipline, options.node_cap, deadline};
  SolveResult out;
  detail::StageClock clock;

  if (!options.naive) {
    out.root_bundle = root_bundle(scn, {deadline, 0}, &out.enumeration);
  }
  out.timings.rewarding_sets = clock.lap();

  out.full = options.naive ? build_full_graph_naive(scn, build)
                           : build_full_graph_accel(scn, out.root_bundle, build);
  out.timings.full_graph = clock.lap();

  compute_scores(out.full, scn, nullptr, deadline);
  out.reduced = build_reduced_graph(out.full, build);
  out.timings.reduced_graph = clock.lap();

  out.tree = options.tie_break == TieBreak::random
                 ? random_tie_break(out.reduced, options.seed)
                 : select_tree(out.reduced);
  out.timings.decision_tree = clock.lap();

  out.phi = *out.full.node(out.full.root()).score;
  out.phi_raw = out.phi * scn.reward_scale;
  out.timings.total = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

/// Copy of `scn` re-rooted at `state` with `budget` left to spend.
inline Scenario rerooted(const Scenario& scn, const State& state, double budget) {
  Scenario sub = scn;
  sub.root_state = state;
  sub.root_budget = budget;
  finalize_scenario(sub);
  return sub;
}

}  // namespace optdt
