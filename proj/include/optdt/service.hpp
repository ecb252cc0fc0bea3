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

// HTTP facade: POST /v1/solve, POST /v1/resolve, GET /v1/health.
//
// Handlers are plain functions from a request body to (status, JSON body),
// so they can be exercised without a socket; mount() wires them into a
// cpp-httplib server. Every request solves from scratch; nothing is shared
// between requests.

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "optdt/export.hpp"
#include "optdt/pipeline.hpp"
#include "optdt/scenario_io.hpp"
#include "optdt/version.hpp"

namespace optdt {

struct ServiceConfig {
  std::chrono::milliseconds request_timeout{60'000};
  std::size_t node_cap = default_node_cap();
  std::string cors_origin = "*";  // empty disables CORS headers

  /// Overrides from OPTDT_REQUEST_TIMEOUT (seconds) and OPTDT_CORS_ORIGIN.
  static ServiceConfig from_env() {
    ServiceConfig c;
    if (const char* t = std::getenv("OPTDT_REQUEST_TIMEOUT")) {
      char* end = nullptr;
      const double s = std::strtod(t, &end);
      if (end != t && s > 0) {
        c.request_timeout = std::chrono::milliseconds(static_cast<long long>(s * 1000));
      }
    }
    if (const char* o = std::getenv("OPTDT_CORS_ORIGIN")) c.cors_origin = o;
    return c;
  }
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

class SolverService {
 public:
  explicit SolverService(ServiceConfig config = {}) : config_(std::move(config)) {}

  const ServiceConfig& config() const noexcept { return config_; }

  ServiceResponse health() const {
    return {200, {{"status", "ok"}, {"version", kVersion}}};
  }

  ServiceResponse solve(std::string_view body) const {
    return guarded([&] {
      const auto req = parse_body(body);
      reject_unknown(req, {"scenario", "budget", "tie_break", "seed"});
      Scenario scn = scenario_from_json(field(req, "scenario"));
      if (req.contains("budget")) {
        const auto& b = req.at("budget");
        if (!b.is_number() || b.get<double>() < 0) {
          throw ValidationError("budget must be a non-negative number", "budget");
        }
        scn.root_budget = b.get<double>();
      }
      return run(scn, req);
    });
  }

  ServiceResponse resolve(std::string_view body) const {
    return guarded([&] {
      const auto req = parse_body(body);
      reject_unknown(req, {"scenario", "current_state", "remaining_budget", "tie_break",
                           "seed"});
      const Scenario base = scenario_from_json(field(req, "scenario"));
      const auto& cs = field(req, "current_state");
      if (!cs.is_array()) throw ValidationError("expected a list", "current_state");
      std::vector<int> entries;
      for (const auto& v : cs) {
        if (!v.is_number_integer()) {
          throw ValidationError("entries must be integers", "current_state");
        }
        entries.push_back(v.get<int>());
      }
      if (entries.size() != base.action_count()) {
        throw ValidationError("has " + std::to_string(entries.size()) +
                                  " entries, expected " +
                                  std::to_string(base.action_count()),
                              "current_state");
      }
      State state;
      try {
        state = State(std::span<const int>(entries));
      } catch (const DomainError& e) {
        throw ValidationError(e.what(), "current_state");
      }
      const auto& rb = field(req, "remaining_budget");
      if (!rb.is_number()) throw ValidationError("expected a number", "remaining_budget");
      const double budget = rb.get<double>();
      if (budget < 0 || budget > base.root_budget + kTolerance) {
        throw ValidationError("must lie in [0, scenario budget]", "remaining_budget");
      }
      Scenario sub;
      try {
        sub = rerooted(base, state, budget);
      } catch (const ValidationError& e) {
        throw ValidationError(e.what(), "current_state");
      }
      return run(sub, req);
    });
  }

  /// Registers the endpoints (and CORS handling) on `server`.
  void mount(httplib::Server& server) const {
    const auto reply = [this](httplib::Response& res, const ServiceResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
      add_cors(res);
    };
    server.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, health());
    });
    server.Post("/v1/solve", [this, reply](const httplib::Request& req,
                                           httplib::Response& res) {
      reply(res, solve(req.body));
    });
    server.Post("/v1/resolve", [this, reply](const httplib::Request& req,
                                             httplib::Response& res) {
      reply(res, resolve(req.body));
    });
    server.Options(R"(/v1/.*)", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      add_cors(res);
    });
  }

 private:
  static nlohmann::json parse_body(std::string_view body) {
    try {
      auto j = nlohmann::json::parse(body);
      if (!j.is_object()) throw ValidationError("request body must be a JSON object", "");
      return j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("malformed JSON: ") + e.what(), "");
    }
  }

  static const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError("missing field", key);
    return *it;
  }

  static void reject_unknown(const nlohmann::json& j,
                             std::initializer_list<std::string_view> known) {
    detail::reject_unknown(j, known, "");
  }

  void add_cors(httplib::Response& res) const {
    if (config_.cors_origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  }

  ServiceResponse run(const Scenario& scn, const nlohmann::json& req) const {
    SolveOptions options;
    options.node_cap = config_.node_cap;
    options.timeout = config_.request_timeout;
    if (req.contains("tie_break")) {
      const auto& t = req.at("tie_break");
      if (t == "random") {
        options.tie_break = TieBreak::random;
      } else if (t != "node-count") {
        throw ValidationError("expected \"node-count\" or \"random\"", "tie_break");
      }
    }
    if (req.contains("seed")) {
      if (!req.at("seed").is_number_unsigned()) {
        throw ValidationError("expected a non-negative integer", "seed");
      }
      options.seed = req.at("seed").get<std::uint64_t>();
    }
    const SolveResult r = optdt::solve(scn, options);
    nlohmann::json body = {
        {"tree", to_json(tree_document(r.tree, scn))},
        {"phi", r.phi},
        {"phi_raw", r.phi_raw},
        {"timings",
         {{"T_P", r.timings.rewarding_sets},
          {"T_FG", r.timings.full_graph},
          {"T_RG", r.timings.reduced_graph},
          {"T_DT", r.timings.decision_tree},
          {"T_total", r.timings.total}}},
        {"counts",
         {{"S_FG", r.full.size()},
          {"S_RG", r.reduced.size()},
          {"S_DT", r.tree.size()},
          {"P_root", r.root_bundle.size()}}}};
    return {200, std::move(body)};
  }

  template <class F>
  static ServiceResponse guarded(F&& f) {
    const auto error = [](int status, const char* kind, const std::string& message,
                          const std::string& field = {}) {
      nlohmann::json e = {{"kind", kind}, {"message", message}};
      if (!field.empty()) e["field"] = field;
      return ServiceResponse{status, {{"error", std::move(e)}}};
    };
    try {
      return f();
    } catch (const ValidationError& e) {
      return error(400, "validation", e.what(), e.field());
    } catch (const DomainError& e) {
      return error(400, "validation", e.what());
    } catch (const CapacityError& e) {
      return error(422, "capacity", e.what());
    } catch (const TimeoutError& e) {
      return error(422, "timeout", e.what());
    } catch (const std::exception& e) {
      return error(500, "internal", e.what());
    }
  }

  ServiceConfig config_;
};

}  // namespace optdt
