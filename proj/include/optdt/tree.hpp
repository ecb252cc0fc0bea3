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

// Decision-tree extraction from a reduced graph.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "optdt/graph.hpp"

namespace optdt {

/// Secondary objective used to choose among score-maximizing actions.
/// f(s) = leaf_value when s has no best action, otherwise
/// node_value + min over best actions of sum_children w * f(child), where w
/// is the outcome probability if probability_weighted and 1 otherwise.
struct SecondaryObjective {
  std::string name;
  double leaf_value = 1.0;
  double node_value = 1.0;
  bool probability_weighted = false;

  /// Number of nodes of the optimal subtree, the node itself included.
  static SecondaryObjective node_count() { return {"node-count", 1.0, 1.0, false}; }

  /// Expected number of actions taken before reaching a leaf.
  static SecondaryObjective expected_depth() {
    return {"expected-depth", 0.0, 1.0, true};
  }
};

namespace detail {

inline double objective_of_action(const SecondaryObjective& obj,
                                  const ActionEdges& edges,
                                  const std::vector<double>& f) {
  double sum = obj.node_value;
  for (const auto& c : edges.outcomes) {
    sum += (obj.probability_weighted ? c.probability : 1.0) * f[c.node];
  }
  return sum;
}

}  // namespace detail

/// f for every node of a reduced graph, children first.
inline std::vector<double> evaluate_objective(const StateGraph& rg,
                                              const SecondaryObjective& obj) {
  std::vector<double> f(rg.size(), 0.0);
  std::vector<std::uint8_t> done(rg.size(), 0);
  std::vector<std::pair<NodeId, bool>> stack{{rg.root(), false}};
  if (rg.empty()) return f;
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (done[id]) continue;
    const NodeRecord& rec = rg.node(id);
    if (!expanded) {
      stack.push_back({id, true});
      for (const auto& e : rec.children) {
        for (const auto& c : e.outcomes) {
          if (!done[c.node]) stack.push_back({c.node, false});
        }
      }
      continue;
    }
    double best = obj.leaf_value;
    for (std::size_t k = 0; k < rec.children.size(); ++k) {
      const double v = detail::objective_of_action(obj, rec.children[k], f);
      best = k == 0 ? v : std::min(best, v);
    }
    f[id] = best;
    done[id] = 1;
  }
  return f;
}

/// Node count of the smallest optimal subtree rooted at every node.
inline std::vector<std::uint64_t> subtree_sizes(const StateGraph& rg) {
  const auto f = evaluate_objective(rg, SecondaryObjective::node_count());
  std::vector<std::uint64_t> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = static_cast<std::uint64_t>(std::llround(f[i]));
  }
  return out;
}

inline std::optional<std::uint64_t> subtree_size(const StateGraph& rg,
                                                 const State& s) {
  const auto id = rg.find(s);
  if (!id) return std::nullopt;
  return subtree_sizes(rg)[*id];
}

/// Chooses one action per visited node; `choose` receives the node and
/// returns an index into its children.
template <class Choose>
StateGraph extract_tree(const StateGraph& rg, Choose&& choose) {
  StateGraph tree(GraphKind::tree);
  if (rg.empty()) return tree;
  std::vector<std::pair<NodeId, NodeId>> queue;  // (reduced id, tree id)
  auto [root, fresh] = tree.insert(rg.node(rg.root()).state, rg.size() + 1);
  (void)fresh;
  tree.node(root).reach_probability = 1.0;
  queue.push_back({rg.root(), root});
  while (!queue.empty()) {
    auto [rid, tid] = queue.back();
    queue.pop_back();
    const NodeRecord& src = rg.node(rid);
    tree.node(tid).score = src.score;
    tree.node(tid).pruned_actions = src.pruned_actions;
    if (src.children.empty()) continue;
    const ActionEdges& chosen = src.children.at(choose(rid, src));
    tree.node(tid).best_actions = {chosen.action};
    const double p_parent = *tree.node(tid).reach_probability;
    ActionEdges edges{chosen.action, {}};
    for (const auto& c : chosen.outcomes) {
      auto [child, is_new] = tree.insert(rg.node(c.node).state, rg.size() + 1);
      if (!is_new) {
        throw InvariantError("state " + rg.node(c.node).state.to_string() +
                             " reached twice in a decision tree");
      }
      tree.node(child).reach_probability = p_parent * c.probability;
      edges.outcomes.push_back({c.outcome, c.probability, child});
      queue.push_back({c.node, child});
    }
    tree.node(tid).children = {std::move(edges)};
  }
  return tree;
}

/// At each node, the best action minimizing the secondary objective; ties go
/// to the lowest action index.
inline StateGraph select_tree(
    const StateGraph& rg,
    const SecondaryObjective& obj = SecondaryObjective::node_count()) {
  const auto f = evaluate_objective(rg, obj);
  return extract_tree(rg, [&](NodeId, const NodeRecord& rec) {
    std::size_t best = 0;
    double best_value = detail::objective_of_action(obj, rec.children[0], f);
    for (std::size_t k = 1; k < rec.children.size(); ++k) {
      const double v = detail::objective_of_action(obj, rec.children[k], f);
      if (v < best_value - kTolerance) {
        best = k;
        best_value = v;
      }
    }
    return best;
  });
}

/// Uniformly random best action at each node, from a seeded generator.
inline StateGraph random_tie_break(const StateGraph& rg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return extract_tree(rg, [&](NodeId, const NodeRecord& rec) {
    std::uniform_int_distribution<std::size_t> pick(0, rec.children.size() - 1);
    return pick(rng);
  });
}

/// Action chosen at a tree node, if any.
inline std::optional<ActionIndex> prescribed_action(const NodeRecord& rec) {
  if (rec.children.empty()) return std::nullopt;
  return rec.children.front().action;
}

struct ExpectedReward {
  double normalized = 0.0;
  double raw = 0.0;
};

/// Sum over leaves of reach probability times reward.
inline ExpectedReward expected_reward(const StateGraph& tree,
                                      const Scenario& scn) {
  ExpectedReward out;
  for (const auto& rec : tree.nodes()) {
    if (!rec.children.empty()) continue;
    const double p = rec.reach_probability.value_or(0.0);
    out.normalized += p * reward(scn, rec.state);
    out.raw += p * raw_reward(scn, rec.state);
  }
  return out;
}

/// Sum of leaf reach probabilities; 1 for a well-formed tree.
inline double leaf_probability_mass(const StateGraph& tree) {
  double mass = 0.0;
  for (const auto& rec : tree.nodes()) {
    if (rec.children.empty()) mass += rec.reach_probability.value_or(0.0);
  }
  return mass;
}

}  // namespace optdt
