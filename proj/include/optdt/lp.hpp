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

// Linear-program form of the score recursion over a full graph. The default
// backend exploits acyclicity: every variable takes its largest lower bound,
// children first, and the result is checked against an optimality
// certificate. Other backends can be plugged in through LpBackend.

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optdt/format.hpp"
#include "optdt/graph.hpp"

namespace optdt {

enum class RowSense { less_equal, equal };

/// One constraint. Inequalities read sum(coef * x) - x[owner] <= 0, one per
/// (state, expanded action); equalities read x[owner] = rhs, one per leaf.
struct LpRow {
  RowSense sense = RowSense::less_equal;
  NodeId owner = 0;
  ActionIndex action = 0;  // inequalities only
  std::vector<std::pair<NodeId, double>> terms;
  double rhs = 0.0;
};

struct ScoreLP {
  std::vector<std::string> names;  // one variable per graph node
  std::vector<LpRow> rows;
  double lower = 0.0;
  double upper = 1.0;

  std::size_t variable_count() const noexcept { return names.size(); }

  std::size_t count(RowSense sense) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(),
        [&](const LpRow& r) { return r.sense == sense; }));
  }
};

using LpSolution = std::vector<double>;
using LpBackend = std::function<LpSolution(const ScoreLP&)>;

/// Variable name for a state: "s" followed by its entries.
inline std::string lp_variable_name(const State& s) {
  std::string out = "s";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += '_';
    out += std::to_string(s[i]);
  }
  return out;
}

inline ScoreLP build_score_lp(const StateGraph& g, const Scenario& scn) {
  ScoreLP lp;
  lp.names.reserve(g.size());
  for (const auto& rec : g.nodes()) lp.names.push_back(lp_variable_name(rec.state));
  for (NodeId id = 0; id < g.size(); ++id) {
    const NodeRecord& rec = g.node(id);
    if (rec.children.empty()) {
      lp.rows.push_back({RowSense::equal, id, 0, {{id, 1.0}},
                         reward(scn, rec.state)});
      continue;
    }
    for (const auto& edges : rec.children) {
      LpRow row{RowSense::less_equal, id, edges.action, {}, 0.0};
      for (const auto& c : edges.outcomes) row.terms.push_back({c.node, c.probability});
      lp.rows.push_back(std::move(row));
    }
  }
  return lp;
}

/// Left-hand side minus right-hand side of an inequality row; non-positive
/// when satisfied. For equalities, the signed residual.
inline double row_activity(const LpRow& row, const LpSolution& x) {
  if (row.sense == RowSense::equal) return x[row.owner] - row.rhs;
  double lhs = 0.0;
  for (const auto& [var, coef] : row.terms) lhs += coef * x[var];
  return lhs - x[row.owner];
}

namespace detail {

/// Variables ordered so that each owner comes after every variable its rows
/// reference.
inline std::vector<NodeId> lp_dependency_order(
    const ScoreLP& lp, const std::vector<std::vector<std::size_t>>& by_owner) {
  const std::size_t n = lp.variable_count();
  std::vector<std::uint8_t> mark(n, 0);
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<std::pair<NodeId, bool>> stack;
  for (NodeId start = 0; start < n; ++start) {
    if (mark[start] != 0) continue;
    stack.push_back({start, false});
    while (!stack.empty()) {
      auto [v, done] = stack.back();
      stack.pop_back();
      if (done) {
        mark[v] = 2;
        order.push_back(v);
        continue;
      }
      if (mark[v] == 2) continue;
      if (mark[v] == 1) throw InvariantError("score LP has a cyclic row");
      mark[v] = 1;
      stack.push_back({v, true});
      for (std::size_t r : by_owner[v]) {
        const LpRow& row = lp.rows[r];
        if (row.sense == RowSense::equal) continue;
        for (const auto& [w, coef] : row.terms) {
          if (mark[w] == 1) throw InvariantError("score LP has a cyclic row");
          if (mark[w] == 0) stack.push_back({w, false});
        }
      }
    }
  }
  return order;
}

}  // namespace detail

/// Checks feasibility and optimality of `x` within `tolerance`. Optimality:
/// every variable with inequality rows has a tight row, so no variable can
/// be lowered without violating a lower bound (the rows form a DAG, hence
/// the pointwise-minimal feasible point minimizes the sum).
inline std::optional<std::string> verify_lp_solution(const ScoreLP& lp,
                                                     const LpSolution& x,
                                                     double tolerance = 1e-7) {
  if (x.size() != lp.variable_count()) return "solution has wrong length";
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (!(x[v] >= lp.lower - tolerance && x[v] <= lp.upper + tolerance)) {
      return "variable " + lp.names[v] + " violates its bounds";
    }
  }
  std::vector<bool> has_rows(x.size(), false);
  std::vector<bool> tight(x.size(), false);
  for (const LpRow& row : lp.rows) {
    const double act = row_activity(row, x);
    if (row.sense == RowSense::equal) {
      if (std::abs(act) > tolerance) {
        return "equality of " + lp.names[row.owner] + " is violated";
      }
      continue;
    }
    if (act > tolerance) {
      return "inequality of " + lp.names[row.owner] + " is violated";
    }
    has_rows[row.owner] = true;
    if (act >= -tolerance) tight[row.owner] = true;
  }
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (has_rows[v] && !tight[v]) {
      return "variable " + lp.names[v] + " has no tight lower bound";
    }
  }
  return std::nullopt;
}

/// Default backend: assigns each variable its largest lower bound in
/// dependency order, then verifies the result.
inline LpSolution solve_acyclic_lp(const ScoreLP& lp) {
  const std::size_t n = lp.variable_count();
  std::vector<std::vector<std::size_t>> by_owner(n);
  for (std::size_t r = 0; r < lp.rows.size(); ++r) by_owner[lp.rows[r].owner].push_back(r);
  LpSolution x(n, lp.lower);
  for (NodeId v : detail::lp_dependency_order(lp, by_owner)) {
    double value = lp.lower;
    for (std::size_t r : by_owner[v]) {
      const LpRow& row = lp.rows[r];
      if (row.sense == RowSense::equal) {
        value = row.rhs;
        break;
      }
      double lhs = 0.0;
      for (const auto& [w, coef] : row.terms) lhs += coef * x[w];
      value = std::max(value, lhs);
    }
    x[v] = value;
  }
  if (auto problem = verify_lp_solution(lp, x)) {
    throw InvariantError("score LP is infeasible: " + *problem);
  }
  return x;
}

inline LpSolution solve_score_lp(const ScoreLP& lp,
                                 const LpBackend& backend = solve_acyclic_lp) {
  LpSolution x = backend(lp);
  if (auto problem = verify_lp_solution(lp, x)) {
    throw InvariantError("LP backend returned a non-optimal point: " + *problem);
  }
  return x;
}

/// Per node, the actions whose inequality has slack at most `tolerance`.
inline std::vector<std::vector<ActionIndex>> tight_actions(
    const ScoreLP& lp, const LpSolution& x, double tolerance = 1e-7) {
  std::vector<std::vector<ActionIndex>> out(lp.variable_count());
  for (const LpRow& row : lp.rows) {
    if (row.sense == RowSense::equal) continue;
    if (row_activity(row, x) >= -tolerance) out[row.owner].push_back(row.action);
  }
  for (auto& actions : out) std::sort(actions.begin(), actions.end());
  return out;
}

/// Writes the LP in CPLEX LP text format.
inline void export_lp(const ScoreLP& lp, std::ostream& os) {
  const auto coef = [](double c) { return format_double(c); };
  os << "\\ score LP, " << lp.variable_count() << " variables\n";
  os << "Minimize\n obj:";
  for (std::size_t v = 0; v < lp.names.size(); ++v) {
    if (v != 0 && v % 8 == 0) os << "\n     ";
    os << (v == 0 ? " " : " + ") << lp.names[v];
  }
  os << "\nSubject To\n";
  std::size_t ineq = 0;
  std::size_t eq = 0;
  for (const LpRow& row : lp.rows) {
    if (row.sense == RowSense::equal) {
      os << " e" << eq++ << ": " << lp.names[row.owner] << " = " << coef(row.rhs)
         << '\n';
      continue;
    }
    os << " c" << ineq++ << ":";
    for (const auto& [var, c] : row.terms) os << " + " << coef(c) << ' ' << lp.names[var];
    os << " - " << lp.names[row.owner] << " <= 0\n";
  }
  os << "Bounds\n";
  for (const auto& name : lp.names) {
    os << ' ' << coef(lp.lower) << " <= " << name << " <= " << coef(lp.upper) << '\n';
  }
  os << "End\n";
}

inline std::string export_lp(const ScoreLP& lp) {
  std::ostringstream os;
  export_lp(lp, os);
  return os.str();
}

}  // namespace optdt
