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

// Tree export: tree-json (consumed by the walker client and the HTTP
// service) and Graphviz dot.
//
// tree-json layout, keys sorted, nodes in preorder with children in outcome
// order:
//
//   {"actions": ["a1", ...], "kind": "tree", "nodes": [
//      {"action": "a1", "children": [{"node": 1, "outcome": 1,
//                                     "probability": 0.4}, ...],
//       "id": 0, "key": "s_0_0_...", "reach_probability": 1,
//       "remaining_budget": 6, "score": 0.08, "score_raw": 8.4,
//       "state": [0, 0, ...]},
//      {"children": [], "id": 5, ..., "reward": 0.5, "reward_raw": 50}],
//    "phi": 0.08, "phi_raw": 8.4, "reward_scale": 100, "root": 0,
//    "schema_version": 1}

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "optdt/format.hpp"
#include "optdt/graph.hpp"
#include "optdt/lp.hpp"
#include "optdt/state.hpp"

namespace optdt {

inline constexpr int kTreeSchemaVersion = 1;

struct TreeEdgeDoc {
  OutcomeId outcome = 0;
  double probability = 0.0;
  std::size_t node = 0;

  bool operator==(const TreeEdgeDoc&) const = default;
};

struct TreeNodeDoc {
  std::string key;
  std::vector<int> state;
  double reach_probability = 0.0;
  double score = 0.0;
  double score_raw = 0.0;
  double remaining_budget = 0.0;
  std::optional<std::string> action;  // absent at leaves
  double reward = 0.0;                // leaves only
  double reward_raw = 0.0;            // leaves only
  std::vector<TreeEdgeDoc> children;

  bool operator==(const TreeNodeDoc&) const = default;
};

/// Plain-data view of a decision tree, in preorder.
struct TreeDocument {
  std::vector<std::string> actions;
  double reward_scale = 1.0;
  double phi = 0.0;
  double phi_raw = 0.0;
  std::vector<TreeNodeDoc> nodes;

  bool operator==(const TreeDocument&) const = default;
};

inline TreeDocument tree_document(const StateGraph& tree, const Scenario& scn) {
  TreeDocument doc;
  for (const auto& a : scn.actions) doc.actions.push_back(a.id);
  doc.reward_scale = scn.reward_scale;
  if (tree.empty()) return doc;
  doc.phi = tree.node(tree.root()).score.value_or(0.0);
  doc.phi_raw = doc.phi * scn.reward_scale;

  // Preorder numbering: children are visited in outcome order.
  std::vector<NodeId> order;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const NodeRecord& rec = tree.node(id);
    if (rec.children.empty()) continue;
    const auto& outs = rec.children.front().outcomes;
    for (auto it = outs.rbegin(); it != outs.rend(); ++it) stack.push_back(it->node);
  }
  std::vector<std::size_t> position(tree.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  for (NodeId id : order) {
    const NodeRecord& rec = tree.node(id);
    TreeNodeDoc node;
    node.key = lp_variable_name(rec.state);
    node.state = rec.state.values();
    node.reach_probability = rec.reach_probability.value_or(0.0);
    node.score = rec.score.value_or(0.0);
    node.score_raw = node.score * scn.reward_scale;
    node.remaining_budget = remaining_budget(scn, rec.state);
    if (rec.children.empty()) {
      node.reward = reward(scn, rec.state);
      node.reward_raw = raw_reward(scn, rec.state);
    } else {
      const ActionEdges& e = rec.children.front();
      node.action = scn.actions[e.action].id;
      for (const auto& c : e.outcomes) {
        node.children.push_back({c.outcome, c.probability, position[c.node]});
      }
    }
    doc.nodes.push_back(std::move(node));
  }
  return doc;
}

inline nlohmann::json to_json(const TreeDocument& doc) {
  using nlohmann::json;
  json nodes = json::array();
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    const TreeNodeDoc& n = doc.nodes[i];
    json children = json::array();
    for (const auto& c : n.children) {
      children.push_back(
          {{"outcome", c.outcome}, {"probability", c.probability}, {"node", c.node}});
    }
    json node = {{"id", i},
                 {"key", n.key},
                 {"state", n.state},
                 {"reach_probability", n.reach_probability},
                 {"score", n.score},
                 {"score_raw", n.score_raw},
                 {"remaining_budget", n.remaining_budget},
                 {"children", std::move(children)}};
    if (n.action) {
      node["action"] = *n.action;
    } else {
      node["reward"] = n.reward;
      node["reward_raw"] = n.reward_raw;
    }
    nodes.push_back(std::move(node));
  }
  return {{"schema_version", kTreeSchemaVersion},
          {"kind", "tree"},
          {"root", 0},
          {"actions", doc.actions},
          {"reward_scale", doc.reward_scale},
          {"phi", doc.phi},
          {"phi_raw", doc.phi_raw},
          {"nodes", std::move(nodes)}};
}

inline std::string dump_tree_json(const TreeDocument& doc) {
  return to_json(doc).dump(2) + "\n";
}

inline TreeDocument tree_document_from_json(const nlohmann::json& j) {
  TreeDocument doc;
  try {
    if (j.at("schema_version").get<int>() != kTreeSchemaVersion ||
        j.at("kind").get<std::string>() != "tree") {
      throw ValidationError("not a tree-json document", "schema_version");
    }
    doc.actions = j.at("actions").get<std::vector<std::string>>();
    doc.reward_scale = j.at("reward_scale").get<double>();
    doc.phi = j.at("phi").get<double>();
    doc.phi_raw = j.at("phi_raw").get<double>();
    for (const auto& n : j.at("nodes")) {
      TreeNodeDoc node;
      node.key = n.at("key").get<std::string>();
      node.state = n.at("state").get<std::vector<int>>();
      node.reach_probability = n.at("reach_probability").get<double>();
      node.score = n.at("score").get<double>();
      node.score_raw = n.at("score_raw").get<double>();
      node.remaining_budget = n.at("remaining_budget").get<double>();
      if (n.contains("action")) {
        node.action = n.at("action").get<std::string>();
      } else {
        node.reward = n.at("reward").get<double>();
        node.reward_raw = n.at("reward_raw").get<double>();
      }
      for (const auto& c : n.at("children")) {
        node.children.push_back({c.at("outcome").get<OutcomeId>(),
                                 c.at("probability").get<double>(),
                                 c.at("node").get<std::size_t>()});
      }
      doc.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed tree-json: ") + e.what(), "");
  }
  for (const auto& n : doc.nodes) {
    for (const auto& c : n.children) {
      if (c.node >= doc.nodes.size()) {
        throw ValidationError("child reference out of range", "nodes");
      }
    }
  }
  return doc;
}

inline TreeDocument parse_tree_json(std::string_view text) {
  try {
    return tree_document_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed tree-json: ") + e.what(), "");
  }
}

/// Graphviz digraph: internal nodes labeled with their action, leaves with
/// their raw reward, edges with the outcome.
inline std::string dump_tree_dot(const TreeDocument& doc) {
  std::ostringstream os;
  os << "digraph decision_tree {\n";
  os << "  node [shape=ellipse];\n";
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    const TreeNodeDoc& n = doc.nodes[i];
    if (n.action) {
      os << "  n" << i << " [label=\"" << *n.action << "\"];\n";
    } else {
      os << "  n" << i << " [label=\"" << format_double(n.reward_raw)
         << "\", shape=box];\n";
    }
  }
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    for (const auto& c : doc.nodes[i].children) {
      os << "  n" << i << " -> n" << c.node << " [label=\"outcome " << c.outcome
         << " (" << format_double(c.probability) << ")\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

enum class TreeFormat { json, dot };

inline std::optional<TreeFormat> parse_tree_format(std::string_view name) {
  if (name == "tree-json" || name == "json") return TreeFormat::json;
  if (name == "dot") return TreeFormat::dot;
  return std::nullopt;
}

inline std::string export_tree(const StateGraph& tree, const Scenario& scn,
                               TreeFormat format) {
  const TreeDocument doc = tree_document(tree, scn);
  return format == TreeFormat::dot ? dump_tree_dot(doc) : dump_tree_json(doc);
}

inline std::string export_tree(const StateGraph& tree, const Scenario& scn,
                               std::string_view format) {
  const auto f = parse_tree_format(format);
  if (!f) throw ValidationError("unknown tree format \"" + std::string(format) + "\"", "format");
  return export_tree(tree, scn, *f);
}

}  // namespace optdt
