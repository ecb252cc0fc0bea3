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

// State graphs: the full graph (naive closure or reward-pruned closure), the
// score recursion over it and the reduced graph of score-maximizing actions.

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "optdt/limits.hpp"
#include "optdt/rewarding.hpp"
#include "optdt/state.hpp"

namespace optdt {

using NodeId = std::uint32_t;

enum class GraphKind { full, reduced, tree };

/// Order in which discovered states are expanded. Both orders produce the
/// same node set; LIFO keeps fewer pending rewarding-set bundles alive.
enum class QueueDiscipline { lifo, fifo };

struct ChildEdge {
  OutcomeId outcome = 0;
  double probability = 0.0;
  NodeId node = 0;
};

struct ActionEdges {
  ActionIndex action = 0;
  std::vector<ChildEdge> outcomes;
};

struct NodeRecord {
  State state;
  /// Actions expanded at this node (all available actions in a naive build).
  std::vector<ActionIndex> pruned_actions;
  /// Score-maximizing subset of pruned_actions, filled by the reduce step.
  std::vector<ActionIndex> best_actions;
  std::optional<double> score;
  /// Product of outcome probabilities from the root; set on trees only.
  std::optional<double> reach_probability;
  /// Sorted by action.
  std::vector<ActionEdges> children;

  const ActionEdges* edges_for(ActionIndex a) const {
    for (const auto& e : children) {
      if (e.action == a) return &e;
    }
    return nullptr;
  }
};

class StateGraph {
 public:
  explicit StateGraph(GraphKind kind = GraphKind::full) : kind_(kind) {}

  GraphKind kind() const noexcept { return kind_; }
  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const NodeRecord& node(NodeId id) const { return nodes_.at(id); }
  NodeRecord& node(NodeId id) { return nodes_.at(id); }
  std::span<const NodeRecord> nodes() const noexcept { return nodes_; }

  std::optional<NodeId> find(const State& s) const {
    auto it = index_.find(s.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const State& s) const { return index_.count(s.key()) != 0; }

  /// Inserts `s` if absent. Returns its id and whether it was new.
  std::pair<NodeId, bool> insert(const State& s, std::size_t node_cap) {
    auto it = index_.find(s.key());
    if (it != index_.end()) return {it->second, false};
    if (nodes_.size() >= node_cap) {
      throw CapacityError("graph exceeded the node cap of " +
                          std::to_string(node_cap) + " states");
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    index_.emplace(s.key(), id);
    nodes_.push_back(NodeRecord{s, {}, {}, {}, {}, {}});
    return {id, true};
  }

 private:
  GraphKind kind_;
  std::vector<NodeRecord> nodes_;
  std::unordered_map<std::string, NodeId> index_;
};

struct BuildOptions {
  QueueDiscipline discipline = QueueDiscipline::lifo;
  std::size_t node_cap = default_node_cap();
  Deadline deadline{};
};

namespace detail {

/// LIFO or FIFO work list of node ids.
class WorkList {
 public:
  explicit WorkList(QueueDiscipline d) : discipline_(d) {}
  bool empty() const { return items_.empty(); }
  void push(NodeId id) { items_.push_back(id); }
  NodeId pop() {
    NodeId id;
    if (discipline_ == QueueDiscipline::lifo) {
      id = items_.back();
      items_.pop_back();
    } else {
      id = items_.front();
      items_.pop_front();
    }
    return id;
  }

 private:
  QueueDiscipline discipline_;
  std::deque<NodeId> items_;
};

/// Adds the edges of `action` at `parent`, creating children as needed.
/// `on_new` is called with (child id, outcome) for every new child.
template <class OnNew>
void expand_action(StateGraph& g, const Scenario& scn, NodeId parent,
                   ActionIndex action, const BuildOptions& options,
                   OnNew&& on_new) {
  const ActionSpec& spec = scn.actions[action];
  ActionEdges edges{action, {}};
  edges.outcomes.reserve(spec.outcomes.size());
  for (const auto& o : spec.outcomes) {
    State child = g.node(parent).state.with_entry(action, static_cast<int>(o.id));
    auto [id, fresh] = g.insert(child, options.node_cap);
    edges.outcomes.push_back({o.id, o.probability.value, id});
    if (fresh) on_new(id, ActionOutcomePair{action, o.id});
  }
  g.node(parent).children.push_back(std::move(edges));
}

}  // namespace detail

/// Closure of the root state under every available action, with no reward
/// pruning. Each node's pruned_actions is its full available set.
inline StateGraph build_full_graph_naive(const Scenario& scn,
                                         const BuildOptions& options = {}) {
  StateGraph g(GraphKind::full);
  g.insert(scn.root_state, options.node_cap);
  detail::WorkList queue(options.discipline);
  queue.push(g.root());
  std::size_t popped = 0;
  while (!queue.empty()) {
    if ((++popped & 4095u) == 0) options.deadline.check("full graph");
    const NodeId id = queue.pop();
    auto actions = available_actions(scn, g.node(id).state);
    g.node(id).pruned_actions = actions;
    for (ActionIndex a : actions) {
      detail::expand_action(g, scn, id, a, options,
                            [&](NodeId child, const ActionOutcomePair&) {
                              queue.push(child);
                            });
    }
  }
  return g;
}

/// Reward-pruned closure. Each discovered child inherits the rewarding sets
/// of the parent that discovered it and keeps only the available actions
/// that appear in a surviving set. Bundles are released once a node has
/// been expanded.
inline StateGraph build_full_graph_accel(const Scenario& scn,
                                         const RewardingSetBundle& bundle,
                                         const BuildOptions& options = {}) {
  StateGraph g(GraphKind::full);
  g.insert(scn.root_state, options.node_cap);
  std::unordered_map<NodeId, RewardingSetBundle> pending;
  {
    NodeRecord& root = g.node(g.root());
    root.pruned_actions = prune_actions(available_actions(scn, root.state),
                                        bundle, reward(scn, root.state));
    if (!root.pruned_actions.empty()) pending.emplace(g.root(), bundle);
  }
  detail::WorkList queue(options.discipline);
  queue.push(g.root());
  std::size_t popped = 0;
  while (!queue.empty()) {
    if ((++popped & 4095u) == 0) options.deadline.check("full graph");
    const NodeId id = queue.pop();
    auto it = pending.find(id);
    if (it == pending.end()) continue;  // nothing to expand
    const RewardingSetBundle parent_bundle = std::move(it->second);
    pending.erase(it);
    const auto actions = g.node(id).pruned_actions;
    for (ActionIndex a : actions) {
      detail::expand_action(
          g, scn, id, a, options,
          [&](NodeId child, const ActionOutcomePair& edge) {
            NodeRecord& rec = g.node(child);
            auto child_bundle = propagate(parent_bundle, edge, rec.state, scn);
            rec.pruned_actions =
                prune_actions(available_actions(scn, rec.state), child_bundle,
                              reward(scn, rec.state));
            if (!rec.pruned_actions.empty()) {
              pending.emplace(child, std::move(child_bundle));
            }
            queue.push(child);
          });
    }
  }
  return g;
}

struct ScoreStats {
  std::size_t evaluations = 0;  // nodes whose score was computed
};

/// Expected reward of taking `edges` from a node whose children are scored.
inline double action_expectation(const StateGraph& g, const ActionEdges& edges) {
  double sum = 0.0;
  for (const auto& c : edges.outcomes) sum += c.probability * *g.node(c.node).score;
  return sum;
}

/// Score of every node: the reward at childless nodes, otherwise the best
/// expected child score over the expanded actions. Each node is evaluated
/// once, children first, with an explicit stack.
inline void compute_scores(StateGraph& g, const Scenario& scn,
                           ScoreStats* stats = nullptr,
                           const Deadline& deadline = {}) {
  enum : std::uint8_t { kUnseen, kOpen, kDone };
  std::vector<std::uint8_t> mark(g.size(), kUnseen);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node(static_cast<NodeId>(i)).score) mark[i] = kDone;
  }
  std::size_t evaluations = 0;
  std::vector<std::pair<NodeId, bool>> stack;
  for (NodeId start = 0; start < g.size(); ++start) {
    if (mark[start] != kUnseen) continue;
    stack.push_back({start, false});
    while (!stack.empty()) {
      auto [id, children_done] = stack.back();
      stack.pop_back();
      NodeRecord& rec = g.node(id);
      if (children_done) {
        double best = 0.0;
        if (rec.children.empty()) {
          best = reward(scn, rec.state);
        } else {
          best = -1.0;
          for (const auto& edges : rec.children) {
            best = std::max(best, action_expectation(g, edges));
          }
        }
        rec.score = best;
        mark[id] = kDone;
        if ((++evaluations & 4095u) == 0) deadline.check("scores");
        continue;
      }
      if (mark[id] == kDone) continue;
      if (mark[id] == kOpen) {
        throw InvariantError("cycle through state " + rec.state.to_string());
      }
      mark[id] = kOpen;
      stack.push_back({id, true});
      for (const auto& edges : rec.children) {
        for (const auto& c : edges.outcomes) {
          if (mark[c.node] == kOpen) {
            throw InvariantError("cycle through state " +
                                 g.node(c.node).state.to_string());
          }
          if (mark[c.node] == kUnseen) stack.push_back({c.node, false});
        }
      }
    }
  }
  if (stats != nullptr) stats->evaluations += evaluations;
}

/// Fills best_actions on every node: expanded actions whose expected child
/// score equals the node score within tolerance.
inline void annotate_best_actions(StateGraph& g) {
  for (NodeId id = 0; id < g.size(); ++id) {
    NodeRecord& rec = g.node(id);
    if (!rec.score) throw InvariantError("scores must be computed first");
    rec.best_actions.clear();
    for (const auto& edges : rec.children) {
      if (std::abs(action_expectation(g, edges) - *rec.score) <= kTolerance) {
        rec.best_actions.push_back(edges.action);
      }
    }
  }
}

/// Subgraph reachable from the root through best actions only. Annotates
/// best_actions on `g` as a side effect.
inline StateGraph build_reduced_graph(StateGraph& g,
                                      const BuildOptions& options = {}) {
  annotate_best_actions(g);
  StateGraph rg(GraphKind::reduced);
  std::vector<NodeId> to_reduced(g.size(), static_cast<NodeId>(-1));
  std::vector<NodeId> from_reduced;
  const auto add = [&](NodeId full_id) {
    auto [rid, fresh] = rg.insert(g.node(full_id).state, options.node_cap);
    if (fresh) {
      const NodeRecord& src = g.node(full_id);
      NodeRecord& dst = rg.node(rid);
      dst.pruned_actions = src.pruned_actions;
      dst.best_actions = src.best_actions;
      dst.score = src.score;
      to_reduced[full_id] = rid;
      from_reduced.push_back(full_id);
    }
    return std::pair{rid, fresh};
  };
  add(g.root());
  detail::WorkList queue(options.discipline);
  queue.push(rg.root());
  while (!queue.empty()) {
    const NodeId rid = queue.pop();
    const NodeRecord& src = g.node(from_reduced[rid]);
    std::vector<ActionEdges> kept;
    for (ActionIndex a : src.best_actions) {
      const ActionEdges* edges = src.edges_for(a);
      ActionEdges copy{a, {}};
      for (const auto& c : edges->outcomes) {
        auto [child, fresh] = add(c.node);
        copy.outcomes.push_back({c.outcome, c.probability, child});
        if (fresh) queue.push(child);
      }
      kept.push_back(std::move(copy));
    }
    rg.node(rid).children = std::move(kept);
  }
  return rg;
}

}  // namespace optdt
