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

// Reference implementations used only by tests. They re-derive the model
// from the scenario data with deliberately naive code (plain vectors, full
// recursion, exhaustive subsets, a textbook simplex) and share nothing with
// the solver beyond the Scenario struct.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "optdt/state.hpp"

namespace oracle {

using Vec = std::vector<int>;

inline bool occurred(const Vec& s, const optdt::ActionOutcomePair& p) {
  return s[p.action] == static_cast<int>(p.outcome);
}

inline bool allowed(const optdt::Scenario& scn, const Vec& s, std::size_t a,
                    double budget_left) {
  const auto& act = scn.actions[a];
  if (s[a] != 0 || act.cost > budget_left + 1e-9) return false;
  const auto& e = act.prereq;
  for (const auto& p : e.and_set) {
    if (!occurred(s, p)) return false;
  }
  if (!e.or_set.empty()) {
    bool any = false;
    for (const auto& p : e.or_set) any = any || occurred(s, p);
    if (!any) return false;
  }
  for (const auto& p : e.notand_set) {
    if (occurred(s, p)) return false;
  }
  if (!e.notor_set.empty()) {
    bool all = true;
    for (const auto& p : e.notor_set) all = all && occurred(s, p);
    if (all) return false;
  }
  return true;
}

inline double raw_value(const optdt::Scenario& scn, const Vec& s) {
  double best = 0.0;
  for (const auto& r : scn.rewards) {
    if (occurred(s, r.pair)) best = std::max(best, r.value);
  }
  return best;
}

/// Best expected raw reward over every policy, by plain recursion over
/// (state, budget) with no memoization shared with the solver.
inline double best_policy_value(const optdt::Scenario& scn, const Vec& s, double budget) {
  double best = raw_value(scn, s);
  for (std::size_t a = 0; a < scn.actions.size(); ++a) {
    if (!allowed(scn, s, a, budget)) continue;
    double value = 0.0;
    for (const auto& o : scn.actions[a].outcomes) {
      Vec next = s;
      next[a] = static_cast<int>(o.id);
      value += o.probability.value *
               best_policy_value(scn, next, budget - scn.actions[a].cost);
    }
    best = std::max(best, value);
  }
  return best;
}

inline double best_policy_value(const optdt::Scenario& scn) {
  return best_policy_value(scn, Vec(scn.actions.size(), 0), scn.root_budget);
}

/// Every state reachable from the all-zeros root.
inline std::set<Vec> reachable_states(const optdt::Scenario& scn) {
  std::set<Vec> seen;
  std::vector<std::pair<Vec, double>> stack{{Vec(scn.actions.size(), 0), scn.root_budget}};
  while (!stack.empty()) {
    auto [s, b] = stack.back();
    stack.pop_back();
    if (!seen.insert(s).second) continue;
    for (std::size_t a = 0; a < scn.actions.size(); ++a) {
      if (!allowed(scn, s, a, b)) continue;
      for (const auto& o : scn.actions[a].outcomes) {
        Vec next = s;
        next[a] = static_cast<int>(o.id);
        stack.push_back({next, b - scn.actions[a].cost});
      }
    }
  }
  return seen;
}

using PairSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

/// Inclusion-minimal subsets of all (action, outcome) pairs that satisfy
/// the rewarding-set program from the all-zeros root, found by testing
/// every subset. Empty OR and NOTOR sets impose nothing.
inline std::set<PairSet> brute_force_rewarding_sets(const optdt::Scenario& scn) {
  std::vector<optdt::ActionOutcomePair> omega;
  for (std::size_t a = 0; a < scn.actions.size(); ++a) {
    for (const auto& o : scn.actions[a].outcomes) {
      omega.push_back({static_cast<optdt::ActionIndex>(a), o.id});
    }
  }
  const std::size_t m = omega.size();
  const auto index_of = [&](const optdt::ActionOutcomePair& p) {
    for (std::size_t i = 0; i < m; ++i) {
      if (omega[i] == p) return i;
    }
    return m;
  };
  std::vector<std::uint64_t> feasible;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    const auto in = [&](const optdt::ActionOutcomePair& p) {
      return ((mask >> index_of(p)) & 1u) != 0;
    };
    bool sink = false;
    for (const auto& r : scn.rewards) sink = sink || in(r.pair);
    if (!sink) continue;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (((mask >> i) & 1u) == 0) continue;
      const auto& e = scn.actions[omega[i].action].prereq;
      for (const auto& p : e.and_set) ok = ok && in(p);
      for (const auto& p : e.notand_set) ok = ok && !in(p);
      if (!e.or_set.empty()) {
        bool any = false;
        for (const auto& p : e.or_set) any = any || in(p);
        ok = ok && any;
      }
      if (!e.notor_set.empty()) {
        bool all = true;
        for (const auto& p : e.notor_set) all = all && in(p);
        ok = ok && !all;
      }
    }
    if (ok) feasible.push_back(mask);
  }
  std::set<PairSet> out;
  for (std::uint64_t f : feasible) {
    bool minimal = true;
    for (std::uint64_t g : feasible) {
      if (g != f && (g & f) == g) {
        minimal = false;
        break;
      }
    }
    if (!minimal) continue;
    PairSet ps;
    for (std::size_t i = 0; i < m; ++i) {
      if ((f >> i) & 1u) ps.insert({omega[i].action, omega[i].outcome});
    }
    out.insert(ps);
  }
  return out;
}

/// Dense two-phase simplex with Bland's rule for
///   minimize c.x  subject to  rows (<= or =) rhs,  x >= 0.
/// Returns nullopt when infeasible. Intended for a few hundred variables.
struct DenseLp {
  std::vector<double> cost;
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    bool equality = false;
    double rhs = 0.0;
  };
  std::vector<Row> rows;
};

inline std::optional<std::vector<double>> simplex(const DenseLp& lp) {
  const double eps = 1e-11;
  const std::size_t n = lp.cost.size();
  const std::size_t m = lp.rows.size();
  // Columns: structural n, one slack per row (unused for equalities), one
  // artificial per row.
  const std::size_t cols = n + 2 * m;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const double sign = row.rhs < 0 ? -1.0 : 1.0;
    for (const auto& [j, c] : row.terms) t[i][j] += sign * c;
    if (!row.equality) t[i][n + i] = sign;
    t[i][n + m + i] = 1.0;
    t[i][cols] = sign * row.rhs;
    basis[i] = n + m + i;
  }
  const auto pivot = [&](std::size_t r, std::size_t c) {
    const double p = t[r][c];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || std::abs(t[i][c]) < eps) continue;
      const double f = t[i][c];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  };
  const auto run = [&](const std::vector<double>& c, std::size_t usable) {
    while (true) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < usable; ++j) {
        double reduced = c[j];
        for (std::size_t i = 0; i < m; ++i) reduced -= c[basis[i]] * t[i][j];
        if (reduced < -1e-10) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = m;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > eps) {
          const double r = t[i][cols] / t[i][enter];
          if (r < ratio - 1e-12 || (std::abs(r - ratio) <= 1e-12 && basis[i] < basis[leave])) {
            ratio = r;
            leave = i;
          }
        }
      }
      if (leave == m) return false;  // unbounded
      pivot(leave, enter);
    }
  };
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n + m + i] = 1.0;
  run(phase1, cols);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n + m) infeasibility += t[i][cols];
  }
  if (infeasibility > 1e-8) return std::nullopt;
  // Drive remaining zero-level artificials out of the basis when possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n + m) continue;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (std::abs(t[i][j]) > 1e-9) {
        pivot(i, j);
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.cost[j];
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n + m) phase2[basis[i]] = 0.0;
  }
  if (!run(phase2, n + m)) return std::nullopt;
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] = t[i][cols];
  }
  return x;
}

/// Every achievable node count of a tree extracted from a graph given as
/// adjacency: children[v] lists, per available action, its child ids.
/// Sizes above `cap` are dropped.
inline std::vector<std::set<std::size_t>> achievable_tree_sizes(
    const std::vector<std::vector<std::vector<std::size_t>>>& children,
    std::size_t cap = 100000) {
  const std::size_t n = children.size();
  std::vector<std::set<std::size_t>> sizes(n);
  std::vector<bool> done(n, false);
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    if (done[v]) return;
    if (children[v].empty()) {
      sizes[v] = {1};
    } else {
      for (const auto& action : children[v]) {
        std::set<std::size_t> acc{1};
        for (std::size_t c : action) {
          visit(c);
          std::set<std::size_t> next;
          for (std::size_t a : acc) {
            for (std::size_t b : sizes[c]) {
              if (a + b <= cap) next.insert(a + b);
            }
          }
          acc = std::move(next);
        }
        sizes[v].insert(acc.begin(), acc.end());
      }
    }
    done[v] = true;
  };
  for (std::size_t v = 0; v < n; ++v) visit(v);
  return sizes;
}

}  // namespace oracle
