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

// Benchmark harness: solves generated instances with both pipelines and
// reports stage times and graph sizes, one row per (instance, pipeline).

#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "optdt/format.hpp"
#include "optdt/generator.hpp"
#include "optdt/pipeline.hpp"

namespace optdt {

struct BenchRow {
  std::size_t index = 0;
  std::size_t n = 0;
  double budget = 0.0;
  double phi = 0.0;
  double t_rewarding = 0.0;
  double t_full = 0.0;
  double t_reduced = 0.0;
  double t_tree = 0.0;
  double t_total = 0.0;
  std::size_t full_states = 0;
  std::size_t reduced_states = 0;
  std::size_t tree_states = 0;
  std::size_t rewarding_sets = 0;
  std::string pipeline;  // "naive" or "accelerated"
  std::string status;    // "ok", "timeout", "capacity" or "error: ..."

  bool ok() const { return status == "ok"; }
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

struct BenchOptions {
  bool naive = true;
  bool accelerated = true;
  std::optional<std::chrono::milliseconds> timeout{};
  std::size_t node_cap = default_node_cap();
};

struct BenchSpec {
  std::vector<GeneratorParams> instances;
  BenchOptions options;
};

/// Reads a bench file: {"defaults": {...}, "instances": [{...}, ...],
/// "timeout_seconds": 60, "naive": true, "accelerated": true}. Each instance
/// overrides the defaults.
inline BenchSpec bench_spec_from_json(const nlohmann::json& j) {
  BenchSpec spec;
  if (!j.is_object()) throw ValidationError("bench file must be an object", "");
  GeneratorParams defaults;
  for (const auto& [key, v] : j.items()) {
    if (key == "defaults") {
      defaults = params_from_json(v);
    } else if (key != "instances" && key != "timeout_seconds" && key != "naive" &&
               key != "accelerated") {
      throw ValidationError("unknown field \"" + key + "\"", key);
    }
  }
  try {
    if (j.contains("timeout_seconds")) {
      spec.options.timeout = std::chrono::milliseconds(
          static_cast<long long>(j.at("timeout_seconds").get<double>() * 1000.0));
    }
    if (j.contains("naive")) spec.options.naive = j.at("naive").get<bool>();
    if (j.contains("accelerated")) spec.options.accelerated = j.at("accelerated").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad bench options: ") + e.what(), "");
  }
  if (j.contains("instances")) {
    const auto& list = j.at("instances");
    if (!list.is_array()) throw ValidationError("expected a list", "instances");
    for (const auto& item : list) spec.instances.push_back(params_from_json(item, defaults));
  }
  return spec;
}

namespace detail {

inline BenchRow bench_one(std::size_t index, const Scenario& scn, bool naive,
                          const BenchOptions& options) {
  BenchRow row;
  row.index = index;
  row.n = scn.action_count();
  row.budget = scn.root_budget;
  row.pipeline = naive ? "naive" : "accelerated";
  SolveOptions so;
  so.naive = naive;
  so.node_cap = options.node_cap;
  so.timeout = options.timeout;
  try {
    const SolveResult r = solve(scn, so);
    row.phi = r.phi;
    row.t_rewarding = r.timings.rewarding_sets;
    row.t_full = r.timings.full_graph;
    row.t_reduced = r.timings.reduced_graph;
    row.t_tree = r.timings.decision_tree;
    row.t_total = r.timings.total;
    row.full_states = r.full.size();
    row.reduced_states = r.reduced.size();
    row.tree_states = r.tree.size();
    row.rewarding_sets = r.root_bundle.size();
    row.status = "ok";
  } catch (const TimeoutError&) {
    row.status = "timeout";
  } catch (const CapacityError&) {
    row.status = "capacity";
  } catch (const Error& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace detail

/// Generates and solves every instance in order. A failing instance yields
/// a row with a non-ok status and the run continues.
inline BenchReport run_bench(const std::vector<GeneratorParams>& instances,
                             const BenchOptions& options = {}) {
  BenchReport report;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    Scenario scn;
    try {
      scn = generate_instance(instances[i]);
    } catch (const Error& e) {
      BenchRow row;
      row.index = i;
      row.n = instances[i].n_actions;
      row.budget = instances[i].budget;
      row.pipeline = "generate";
      row.status = std::string("error: ") + e.what();
      report.rows.push_back(row);
      continue;
    }
    if (options.naive) report.rows.push_back(detail::bench_one(i, scn, true, options));
    if (options.accelerated) {
      report.rows.push_back(detail::bench_one(i, scn, false, options));
    }
  }
  return report;
}

inline constexpr const char* kBenchCsvHeader =
    "Index,N,B,Phi(s_root),T_P,T_FG,T_RG,T_DT,T_total,|S_FG|,|S_RG|,|S_DT|,"
    "|P(s_root)|,Pipeline,Status";

inline std::string to_csv(const BenchReport& report) {
  std::ostringstream os;
  os << kBenchCsvHeader << '\n';
  for (const auto& r : report.rows) {
    std::string status = r.status;
    for (char& c : status) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    os << r.index << ',' << r.n << ',' << format_double(r.budget) << ','
       << format_double(r.phi) << ',' << format_double(r.t_rewarding) << ','
       << format_double(r.t_full) << ',' << format_double(r.t_reduced) << ','
       << format_double(r.t_tree) << ',' << format_double(r.t_total) << ','
       << r.full_states << ',' << r.reduced_states << ',' << r.tree_states << ','
       << r.rewarding_sets << ',' << r.pipeline << ',' << status << '\n';
  }
  return os.str();
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log10(T_total) against log10(|S_FG|) over the ok
/// rows of one pipeline.
inline LogLogFit fit_loglog(const BenchReport& report,
                            const std::string& pipeline = "accelerated") {
  std::vector<double> xs, ys;
  for (const auto& r : report.rows) {
    if (!r.ok() || r.pipeline != pipeline || r.full_states == 0 || r.t_total <= 0) continue;
    xs.push_back(std::log10(static_cast<double>(r.full_states)));
    ys.push_back(std::log10(r.t_total));
  }
  LogLogFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace optdt
