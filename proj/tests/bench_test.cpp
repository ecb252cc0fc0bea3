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

#include <gtest/gtest.h>

#include "optdt/bench.hpp"
#include "support/fixtures.hpp"

namespace optdt {
namespace {

TEST(BenchTest, EmptyParamsGiveEmptyReport) {
  const BenchReport report = run_bench({});
  EXPECT_TRUE(report.rows.empty());
  EXPECT_EQ(to_csv(report), std::string(kBenchCsvHeader) + "\n");
}

TEST(BenchTest, RowsSatisfySubsetChain) {
  std::vector<GeneratorParams> instances;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GeneratorParams p;
    p.n_actions = 8 + seed;
    p.budget = 5;
    p.seed = seed;
    instances.push_back(p);
  }
  const BenchReport report = run_bench(instances);
  ASSERT_EQ(report.rows.size(), 12u);
  for (std::size_t i = 0; i < report.rows.size(); i += 2) {
    const BenchRow& naive = report.rows[i];
    const BenchRow& accel = report.rows[i + 1];
    EXPECT_EQ(naive.pipeline, "naive");
    EXPECT_EQ(accel.pipeline, "accelerated");
    EXPECT_NEAR(naive.phi, accel.phi, 1e-9);
    EXPECT_LE(accel.full_states, naive.full_states);
    for (const BenchRow* r : {&naive, &accel}) {
      EXPECT_TRUE(r->ok());
      EXPECT_LE(r->tree_states, r->reduced_states);
      EXPECT_LE(r->reduced_states, r->full_states);
      for (double t : {r->t_rewarding, r->t_full, r->t_reduced, r->t_tree, r->t_total}) {
        EXPECT_GE(t, 0.0);
      }
    }
    EXPECT_EQ(naive.rewarding_sets, 0u);
    EXPECT_GE(accel.rewarding_sets, 1u);
  }
}

TEST(BenchTest, TimeoutIsRecordedPerRow) {
  GeneratorParams big;
  big.n_actions = 40;
  big.budget = 14;
  big.seed = 3;
  GeneratorParams small;
  small.n_actions = 6;
  small.seed = 4;
  BenchOptions options;
  options.timeout = std::chrono::milliseconds(1);
  options.naive = true;
  options.accelerated = false;
  const BenchReport report = run_bench({big, small}, options);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].status, "timeout");
  EXPECT_EQ(report.rows[1].index, 1u);
  EXPECT_NE(to_csv(report).find(",naive,timeout"), std::string::npos);
}

TEST(BenchTest, CsvHeaderAndFit) {
  BenchReport report;
  for (int k = 0; k < 4; ++k) {
    BenchRow r;
    r.index = static_cast<std::size_t>(k);
    r.pipeline = "accelerated";
    r.status = "ok";
    r.full_states = static_cast<std::size_t>(std::pow(10.0, 2 + k));
    r.t_total = 3e-6 * static_cast<double>(r.full_states);
    report.rows.push_back(r);
  }
  const LogLogFit fit = fit_loglog(report);
  EXPECT_EQ(fit.points, 4u);
  EXPECT_NEAR(fit.slope, 1.0, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-9);
  const std::string csv = to_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "Index,N,B,Phi(s_root),T_P,T_FG,T_RG,T_DT,T_total,|S_FG|,|S_RG|,|S_DT|,"
            "|P(s_root)|,Pipeline,Status");
}

TEST(BenchTest, SpecFile) {
  const auto spec = bench_spec_from_json(nlohmann::json::parse(
      read_text_file(fixtures::data_path("bench/scaling.json"))));
  EXPECT_GE(spec.instances.size(), 8u);
  EXPECT_THROW(bench_spec_from_json({{"instancez", 1}}), ValidationError);
}

}  // namespace
}  // namespace optdt
