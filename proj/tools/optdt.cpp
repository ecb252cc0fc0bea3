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

// Command-line front end: solve, validate, gen, bench, serve, lp-check.
//
// Exit codes: 0 success, 1 usage, 2 validation failure, 3 capacity or
// timeout, 4 internal invariant violation (including an LP mismatch).

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "optdt/optdt.hpp"
#include "optdt/service.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitInvariant = 4;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw optdt::ValidationError("cannot write " + path, "");
  out << text;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::optional<std::chrono::milliseconds> seconds_to_ms(double s) {
  if (s <= 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<long long>(s * 1000.0));
}

struct SolveArgs {
  std::string scenario;
  std::optional<double> budget;
  bool naive = false;
  bool fifo = false;
  std::string tie_break = "node-count";
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  bool emit_stats = false;
  double timeout = 0;
};

int run_solve(const SolveArgs& a) {
  optdt::Scenario scn = optdt::load_scenario(a.scenario);
  if (a.budget) {
    scn.root_budget = *a.budget;
    optdt::finalize_scenario(scn);
  }
  optdt::SolveOptions options;
  options.naive = a.naive;
  options.discipline = a.fifo ? optdt::QueueDiscipline::fifo : optdt::QueueDiscipline::lifo;
  options.tie_break =
      a.tie_break == "random" ? optdt::TieBreak::random : optdt::TieBreak::node_count;
  options.seed = a.seed;
  options.timeout = seconds_to_ms(a.timeout);
  const optdt::SolveResult r = optdt::solve(scn, options);

  std::printf("Phi(s_root) = %.9g (raw %.9g)\n", r.phi, r.phi_raw);
  if (const auto action = optdt::prescribed_action(r.tree.node(r.tree.root()))) {
    std::printf("root action: %s\n", scn.actions[*action].id.c_str());
  } else {
    std::printf("root action: none\n");
  }
  if (a.emit_stats) {
    std::printf("N = %zu\nB = %s\n", scn.action_count(),
                optdt::format_double(scn.root_budget).c_str());
    std::printf("T_P = %.6f\nT_FG = %.6f\nT_RG = %.6f\nT_DT = %.6f\nT_total = %.6f\n",
                r.timings.rewarding_sets, r.timings.full_graph, r.timings.reduced_graph,
                r.timings.decision_tree, r.timings.total);
    std::printf("|S_FG| = %zu\n|S_RG| = %zu\n|S_DT| = %zu\n|P(s_root)| = %zu\n",
                r.full.size(), r.reduced.size(), r.tree.size(), r.root_bundle.size());
  }
  if (!a.out.empty()) {
    std::string format = a.format;
    if (format.empty()) format = ends_with(a.out, ".dot") ? "dot" : "tree-json";
    write_file(a.out, optdt::export_tree(r.tree, scn, format));
  }
  return 0;
}

int run_validate(const std::string& path) {
  const optdt::Scenario scn = optdt::load_scenario(path);
  std::printf("ok: %zu actions, budget %s, %zu reward pairs\n", scn.action_count(),
              optdt::format_double(scn.root_budget).c_str(), scn.rewards.size());
  return 0;
}

int run_gen(const std::string& params_path, std::optional<std::uint64_t> seed,
            const std::string& out) {
  auto params = optdt::params_from_json(
      nlohmann::json::parse(optdt::read_text_file(params_path)));
  if (seed) params.seed = *seed;
  const std::string text = optdt::serialize_scenario(optdt::generate_instance(params));
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int run_bench_cmd(const std::string& path, const std::string& csv, double timeout) {
  auto spec = optdt::bench_spec_from_json(nlohmann::json::parse(optdt::read_text_file(path)));
  if (timeout > 0) spec.options.timeout = seconds_to_ms(timeout);
  const optdt::BenchReport report = optdt::run_bench(spec.instances, spec.options);
  const std::string text = optdt::to_csv(report);
  if (csv.empty()) {
    std::cout << text;
  } else {
    write_file(csv, text);
  }
  for (const char* pipeline : {"accelerated", "naive"}) {
    const auto fit = optdt::fit_loglog(report, pipeline);
    if (fit.points >= 2) {
      std::fprintf(stderr, "%s: log-log slope %.4f, R^2 %.4f over %zu instances\n",
                   pipeline, fit.slope, fit.r_squared, fit.points);
    }
  }
  return 0;
}

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int run_serve(const std::string& host, int port, const std::string& cors, double timeout) {
  optdt::ServiceConfig config = optdt::ServiceConfig::from_env();
  if (!cors.empty()) config.cors_origin = cors;
  if (timeout > 0) config.request_timeout = *seconds_to_ms(timeout);
  optdt::SolverService service(config);
  httplib::Server server;
  service.mount(server);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::fprintf(stderr, "listening on %s:%d\n", host.c_str(), port);
  if (!server.listen(host, port)) {
    std::fprintf(stderr, "cannot listen on %s:%d\n", host.c_str(), port);
    return kExitUsage;
  }
  return 0;
}

int run_lp_check(const std::string& path, std::optional<double> budget, bool naive) {
  optdt::Scenario scn = optdt::load_scenario(path);
  if (budget) {
    scn.root_budget = *budget;
    optdt::finalize_scenario(scn);
  }
  optdt::SolveOptions options;
  options.naive = naive;
  const optdt::SolveResult r = optdt::solve(scn, options);
  const optdt::ScoreLP lp = optdt::build_score_lp(r.full, scn);
  const optdt::LpSolution x = optdt::solve_score_lp(lp);
  const auto tight = optdt::tight_actions(lp, x);
  double worst = 0.0;
  std::size_t tight_mismatches = 0;
  for (optdt::NodeId id = 0; id < r.full.size(); ++id) {
    const auto& rec = r.full.node(id);
    worst = std::max(worst, std::abs(x[id] - *rec.score));
    if (tight[id] != rec.best_actions) ++tight_mismatches;
  }
  std::printf("states %zu, inequalities %zu, equalities %zu\n", lp.variable_count(),
              lp.count(optdt::RowSense::less_equal), lp.count(optdt::RowSense::equal));
  std::printf("max |DP - LP| = %.3g, tight-set mismatches = %zu\n", worst,
              tight_mismatches);
  if (worst > 1e-7 || tight_mismatches != 0) {
    std::printf("MISMATCH\n");
    return kExitInvariant;
  }
  std::printf("agree\n");
  return 0;
}

int env_port() {
  if (const char* p = std::getenv("OPTDT_PORT")) {
    const int v = std::atoi(p);
    if (v > 0 && v < 65536) return v;
  }
  return 8080;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal decision trees for sequential decisions with uncertain outcomes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", optdt::kVersion);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a scenario and report the optimal tree");
  solve_cmd->add_option("scenario", solve.scenario, "Scenario JSON file")->required();
  solve_cmd->add_option("--budget", solve.budget, "Override the root budget");
  solve_cmd->add_flag("--naive", solve.naive, "Build the full graph without reward pruning");
  solve_cmd->add_flag("--fifo", solve.fifo, "Expand states first-in first-out");
  solve_cmd->add_option("--tie-break", solve.tie_break, "Secondary objective")
      ->check(CLI::IsMember({"node-count", "random"}));
  solve_cmd->add_option("--seed", solve.seed, "Seed for --tie-break random");
  solve_cmd->add_option("--out", solve.out, "Write the tree (.dot or .json)");
  solve_cmd->add_option("--format", solve.format, "Tree format for --out")
      ->check(CLI::IsMember({"tree-json", "dot"}));
  solve_cmd->add_flag("--emit-stats", solve.emit_stats, "Print stage times and graph sizes");
  solve_cmd->add_option("--timeout", solve.timeout, "Time limit in seconds (0 = none)");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

  std::string gen_params;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random scenario");
  gen_cmd->add_option("params", gen_params, "Generator params JSON file")->required();
  gen_cmd->add_option("--seed", gen_seed, "Override the params seed");
  gen_cmd->add_option("--out", gen_out, "Output file (default stdout)");

  std::string bench_params;
  std::string bench_csv;
  double bench_timeout = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark generated instances");
  bench_cmd->add_option("params", bench_params, "Bench JSON file")->required();
  bench_cmd->add_option("--csv", bench_csv, "CSV output file (default stdout)");
  bench_cmd->add_option("--timeout", bench_timeout, "Per-instance time limit in seconds");

  std::string serve_host = "127.0.0.1";
  int serve_port = env_port();
  std::string serve_cors;
  double serve_timeout = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Port (default OPTDT_PORT or 8080)");
  serve_cmd->add_option("--cors-origin", serve_cors, "Allowed CORS origin");
  serve_cmd->add_option("--timeout", serve_timeout, "Request time limit in seconds");

  std::string lp_path;
  std::optional<double> lp_budget;
  bool lp_naive = false;
  auto* lp_cmd = app.add_subcommand("lp-check", "Compare DP scores with the LP");
  lp_cmd->add_option("scenario", lp_path, "Scenario JSON file")->required();
  lp_cmd->add_option("--budget", lp_budget, "Override the root budget");
  lp_cmd->add_flag("--naive", lp_naive, "Use the naive full graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*validate_cmd) return run_validate(validate_path);
    if (*gen_cmd) return run_gen(gen_params, gen_seed, gen_out);
    if (*bench_cmd) return run_bench_cmd(bench_params, bench_csv, bench_timeout);
    if (*serve_cmd) return run_serve(serve_host, serve_port, serve_cors, serve_timeout);
    if (*lp_cmd) return run_lp_check(lp_path, lp_budget, lp_naive);
  } catch (const optdt::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const optdt::DomainError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const optdt::GenerationError& e) {
    std::fprintf(stderr, "generation error: %s\n", e.what());
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const optdt::CapacityError& e) {
    std::fprintf(stderr, "capacity exceeded: %s\n", e.what());
    return kExitCapacity;
  } catch (const optdt::TimeoutError& e) {
    std::fprintf(stderr, "timed out: %s\n", e.what());
    return kExitCapacity;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInvariant;
  }
  return kExitUsage;
}
