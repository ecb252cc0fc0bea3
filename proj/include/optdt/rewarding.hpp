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

// Rewarding sets: minimal collections of (action, outcome) pairs whose joint
// occurrence reaches a reward state.
//
// Enumeration solves the binary program
//
//   minimize    |z|
//   subject to  at least one reward pair selected
//               selected pair  =>  all of its AND pairs selected
//               selected pair  =>  one of its OR pairs selected (if any)
//               selected pair  =>  none of its NOTAND pairs selected
//               selected pair  =>  not all of its NOTOR pairs selected (if any)
//               no-good cuts excluding every earlier solution
//
// repeatedly, adding a cut after each solution, until it becomes infeasible.
// Each solve is a depth-first branch and bound: AND/NOTAND implications are
// propagated on assignment, and branching happens only on the reward pair
// and on OR supports, so the tree is the space of derivations rather than
// the space of all 2^|pairs| vectors.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "optdt/limits.hpp"
#include "optdt/state.hpp"

namespace optdt {

struct RewardingSet {
  std::vector<ActionOutcomePair> pairs;  // sorted
  double target_reward = 0.0;            // normalized reward of the implied state
  double total_cost = 0.0;               // sum of member action costs

  bool contains(const ActionOutcomePair& p) const {
    return std::binary_search(pairs.begin(), pairs.end(), p);
  }

  bool contains_action(ActionIndex a) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(),
                               ActionOutcomePair{a, 0});
    return it != pairs.end() && it->action == a;
  }

  bool operator==(const RewardingSet&) const = default;
};

using RewardingSetBundle = std::vector<RewardingSet>;

struct EnumerationOptions {
  Deadline deadline{};
  /// Upper bound on cut-loop iterations; 0 means unbounded.
  std::size_t max_iterations = 0;
};

struct EnumerationStats {
  std::size_t iterations = 0;    // binary programs solved, incl. the infeasible one
  std::size_t search_nodes = 0;  // branch-and-bound nodes over all solves
};

namespace detail {

inline double pairs_cost(const Scenario& scn,
                         const std::vector<ActionOutcomePair>& pairs) {
  double cost = 0.0;
  for (const auto& p : pairs) cost += scn.actions[p.action].cost;
  return cost;
}

/// Minimum-cardinality solver for the rewarding-set program with no-good
/// cuts. Pairs already realized in the root state count as selected for
/// free and carry no obligations of their own; other outcomes of actions
/// already taken are fixed to zero.
class RewardingSetSearch {
 public:
  RewardingSetSearch(const Scenario& scn, const EnumerationOptions& options,
                     EnumerationStats& stats)
      : options_(options), stats_(stats) {
    const std::size_t n = scn.action_count();
    index_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (const auto& o : scn.actions[a].outcomes) {
        index_[a].push_back({o.id, static_cast<std::uint32_t>(pairs_.size())});
        pairs_.push_back({static_cast<ActionIndex>(a), o.id});
      }
    }
    const std::size_t m = pairs_.size();
    and_.resize(m);
    or_.resize(m);
    notand_.resize(m);
    notor_.resize(m);
    notor_watch_.resize(m);
    cuts_by_var_.resize(m);
    fixed_.assign(m, kFree);
    for (std::uint32_t v = 0; v < m; ++v) {
      const PrereqExpr& e = scn.actions[pairs_[v].action].prereq;
      and_[v] = lookup(e.and_set);
      or_[v] = lookup(e.or_set);
      notand_[v] = lookup(e.notand_set);
      notor_[v] = lookup(e.notor_set);
      for (std::uint32_t u : notor_[v]) notor_watch_[u].push_back(v);
    }
    const State& root = scn.root_state;
    for (std::uint32_t v = 0; v < m; ++v) {
      const auto& p = pairs_[v];
      if (root.taken(p.action)) {
        fixed_[v] = pair_occurred(root, p) ? kOne : kZero;
      }
    }
    const double root_reward = raw_reward(scn, root);
    for (const auto& r : scn.rewards) {
      const std::uint32_t v = var_of(r.pair);
      if (fixed_[v] == kFree && r.value > root_reward &&
          std::find(sink_.begin(), sink_.end(), v) == sink_.end()) {
        sink_.push_back(v);
      }
    }
    std::sort(sink_.begin(), sink_.end());
  }

  const ActionOutcomePair& pair(std::uint32_t v) const { return pairs_[v]; }

  /// One minimum-cardinality solution (new pairs only), or nullopt when the
  /// program with the current cuts is infeasible.
  std::optional<std::vector<std::uint32_t>> solve() {
    assign_ = fixed_;
    trail_.clear();
    selected_.clear();
    cut_ones_.assign(cuts_.size(), 0);
    for (std::uint32_t v = 0; v < assign_.size(); ++v) {
      if (assign_[v] == kOne) {
        for (std::uint32_t c : cuts_by_var_[v]) ++cut_ones_[c];
      }
    }
    best_.reset();
    limit_ = pairs_.size();
    search();
    return best_;
  }

  void add_cut(const std::vector<std::uint32_t>& solution) {
    const auto id = static_cast<std::uint32_t>(cuts_.size());
    cuts_.push_back(solution);
    for (std::uint32_t v : solution) cuts_by_var_[v].push_back(id);
  }

 private:
  static constexpr std::int8_t kFree = -1;
  static constexpr std::int8_t kZero = 0;
  static constexpr std::int8_t kOne = 1;

  std::uint32_t var_of(const ActionOutcomePair& p) const {
    for (const auto& [outcome, v] : index_.at(p.action)) {
      if (outcome == p.outcome) return v;
    }
    throw InvariantError("unknown action-outcome pair");
  }

  std::vector<std::uint32_t> lookup(const std::vector<ActionOutcomePair>& ps) const {
    std::vector<std::uint32_t> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(var_of(p));
    return out;
  }

  bool is_new(std::uint32_t v) const { return fixed_[v] == kFree; }

  bool all_one(const std::vector<std::uint32_t>& vs) const {
    return std::all_of(vs.begin(), vs.end(),
                       [&](std::uint32_t u) { return assign_[u] == kOne; });
  }

  bool set_one(std::uint32_t v) {
    if (assign_[v] == kOne) return true;
    if (assign_[v] == kZero) return false;
    assign_[v] = kOne;
    trail_.push_back(v);
    selected_.push_back(v);
    bool ok = true;
    for (std::uint32_t c : cuts_by_var_[v]) {
      if (++cut_ones_[c] == cuts_[c].size()) ok = false;
    }
    if (!ok) return false;
    if (!notor_[v].empty() && all_one(notor_[v])) return false;
    for (std::uint32_t o : notor_watch_[v]) {
      if (assign_[o] == kOne && is_new(o) && all_one(notor_[o])) return false;
    }
    for (std::uint32_t u : and_[v]) {
      if (!set_one(u)) return false;
    }
    for (std::uint32_t u : notand_[v]) {
      if (!set_zero(u)) return false;
    }
    return true;
  }

  bool set_zero(std::uint32_t v) {
    if (assign_[v] == kZero) return true;
    if (assign_[v] == kOne) return false;
    assign_[v] = kZero;
    trail_.push_back(v);
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::uint32_t v = trail_.back();
      trail_.pop_back();
      if (assign_[v] == kOne) {
        selected_.pop_back();
        for (std::uint32_t c : cuts_by_var_[v]) --cut_ones_[c];
      }
      assign_[v] = kFree;
    }
  }

  /// Tries each candidate in turn; candidate i is explored with candidates
  /// 0..i-1 fixed to zero so branches never overlap.
  void branch(const std::vector<std::uint32_t>& candidates) {
    if (selected_.size() + 1 > limit_) return;
    const std::size_t mark = trail_.size();
    for (std::uint32_t c : candidates) {
      if (assign_[c] == kZero) continue;
      const std::size_t inner = trail_.size();
      if (set_one(c)) search();
      undo(inner);
      if (!set_zero(c)) break;
      if (selected_.size() + 1 > limit_) break;
    }
    undo(mark);
  }

  void search() {
    if ((++stats_.search_nodes & 1023u) == 0) {
      options_.deadline.check("rewarding-set enumeration");
    }
    if (selected_.size() > limit_) return;
    const bool sink_hit = std::any_of(
        sink_.begin(), sink_.end(),
        [&](std::uint32_t v) { return assign_[v] == kOne; });
    if (!sink_hit) {
      branch(sink_);
      return;
    }
    for (std::size_t i = 0; i < selected_.size(); ++i) {
      const std::uint32_t o = selected_[i];
      const auto& supports = or_[o];
      if (supports.empty()) continue;
      const bool supported = std::any_of(
          supports.begin(), supports.end(),
          [&](std::uint32_t u) { return assign_[u] == kOne; });
      if (!supported) {
        const std::vector<std::uint32_t> candidates = supports;
        branch(candidates);
        return;
      }
    }
    // Every obligation holds with the unassigned pairs at zero.
    best_ = selected_;
    std::sort(best_->begin(), best_->end());
    limit_ = selected_.size() - 1;
  }

  const EnumerationOptions& options_;
  EnumerationStats& stats_;

  std::vector<ActionOutcomePair> pairs_;
  std::vector<std::vector<std::pair<OutcomeId, std::uint32_t>>> index_;
  std::vector<std::vector<std::uint32_t>> and_, or_, notand_, notor_;
  std::vector<std::vector<std::uint32_t>> notor_watch_;
  std::vector<std::int8_t> fixed_;
  std::vector<std::uint32_t> sink_;
  std::vector<std::vector<std::uint32_t>> cuts_;
  std::vector<std::vector<std::uint32_t>> cuts_by_var_;

  std::vector<std::int8_t> assign_;
  std::vector<std::uint32_t> trail_;
  std::vector<std::uint32_t> selected_;
  std::vector<std::uint32_t> cut_ones_;
  std::size_t limit_ = 0;
  std::optional<std::vector<std::uint32_t>> best_;
};

}  // namespace detail

/// Builds a RewardingSet from its pairs, deriving target reward and cost.
/// The target is the reward of the implied state: the root reward raised by
/// any reward pairs in the set.
inline RewardingSet make_rewarding_set(const Scenario& scn,
                                       std::vector<ActionOutcomePair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  RewardingSet set;
  set.pairs = std::move(pairs);
  double raw = raw_reward(scn, scn.root_state);
  for (const auto& r : scn.rewards) {
    if (set.contains(r.pair)) raw = std::max(raw, r.value);
  }
  set.target_reward = raw / scn.reward_scale;
  set.total_cost = detail::pairs_cost(scn, set.pairs);
  return set;
}

/// Every inclusion-minimal rewarding set from the scenario's root state, in
/// order of increasing size. Each iteration of the cut loop solves for a
/// minimum-cardinality set and then cuts it (and all its supersets) away.
/// Throws TimeoutError if the deadline or iteration bound is hit.
inline RewardingSetBundle enumerate_rewarding_sets(
    const Scenario& scn, const EnumerationOptions& options = {},
    EnumerationStats* stats_out = nullptr) {
  EnumerationStats stats;
  detail::RewardingSetSearch search(scn, options, stats);
  RewardingSetBundle bundle;
  while (true) {
    ++stats.iterations;
    if (options.max_iterations != 0 && stats.iterations > options.max_iterations) {
      throw TimeoutError("rewarding-set enumeration: iteration limit of " +
                         std::to_string(options.max_iterations) + " reached");
    }
    auto solution = search.solve();
    if (!solution) break;
    std::vector<ActionOutcomePair> pairs;
    pairs.reserve(solution->size());
    for (std::uint32_t v : *solution) pairs.push_back(search.pair(v));
    bundle.push_back(make_rewarding_set(scn, std::move(pairs)));
    search.add_cut(*solution);
  }
  std::stable_sort(bundle.begin(), bundle.end(),
                   [](const RewardingSet& a, const RewardingSet& b) {
                     if (a.pairs.size() != b.pairs.size()) {
                       return a.pairs.size() < b.pairs.size();
                     }
                     return a.pairs < b.pairs;
                   });
  if (stats_out != nullptr) *stats_out = stats;
  return bundle;
}

/// Drops every set whose implied reward state is dominated: some other set
/// is a strict subset of it and reaches an equal or higher reward.
inline RewardingSetBundle filter_dominated(const RewardingSetBundle& bundle) {
  RewardingSetBundle out;
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const RewardingSet& si = bundle[i];
    bool dominated = false;
    for (std::size_t j = 0; j < bundle.size() && !dominated; ++j) {
      const RewardingSet& sj = bundle[j];
      if (i == j || sj.pairs.size() >= si.pairs.size()) continue;
      dominated = sj.target_reward >= si.target_reward - kTolerance &&
                  std::includes(si.pairs.begin(), si.pairs.end(),
                                sj.pairs.begin(), sj.pairs.end());
    }
    if (!dominated) out.push_back(si);
  }
  return out;
}

/// Root bundle used by the accelerated graph build.
inline RewardingSetBundle root_bundle(const Scenario& scn,
                                      const EnumerationOptions& options = {},
                                      EnumerationStats* stats = nullptr) {
  return filter_dominated(enumerate_rewarding_sets(scn, options, stats));
}

/// Rewarding sets inherited by `child_state` across the edge `edge`.
///
/// A set survives only if it can still raise the child's reward. If the
/// edge's pair belongs to the set, the pair is removed. If the edge's action
/// belongs to the set with another outcome, the set survives only for a
/// repeatable action with enough budget left. Otherwise the set survives if
/// the child's budget covers the set's remaining cost.
inline RewardingSetBundle propagate(const RewardingSetBundle& parent,
                                    const ActionOutcomePair& edge,
                                    const State& child_state,
                                    const Scenario& scn) {
  RewardingSetBundle out;
  if (parent.empty()) return out;
  const double child_reward = reward(scn, child_state);
  const double child_budget = remaining_budget(scn, child_state);
  const bool repeatable = scn.actions[edge.action].repeatable;
  for (const RewardingSet& set : parent) {
    if (!(child_reward < set.target_reward - kTolerance)) continue;
    if (set.contains_action(edge.action)) {
      if (set.contains(edge)) {
        RewardingSet reduced;
        reduced.target_reward = set.target_reward;
        reduced.pairs.reserve(set.pairs.size() - 1);
        for (const auto& p : set.pairs) {
          if (p != edge) reduced.pairs.push_back(p);
        }
        reduced.total_cost = detail::pairs_cost(scn, reduced.pairs);
        if (!reduced.pairs.empty()) out.push_back(std::move(reduced));
      } else if (repeatable &&
                 child_budget >= set.total_cost - kTolerance) {
        out.push_back(set);
      }
    } else if (child_budget >= set.total_cost - kTolerance) {
      out.push_back(set);
    }
  }
  return out;
}

/// Available actions that appear in at least one set able to raise the
/// current reward.
inline std::vector<ActionIndex> prune_actions(
    const std::vector<ActionIndex>& available, const RewardingSetBundle& bundle,
    double current_reward) {
  std::vector<ActionIndex> out;
  for (ActionIndex a : available) {
    const bool useful = std::any_of(
        bundle.begin(), bundle.end(), [&](const RewardingSet& set) {
          return set.target_reward > current_reward + kTolerance &&
                 set.contains_action(a);
        });
    if (useful) out.push_back(a);
  }
  return out;
}

}  // namespace optdt
