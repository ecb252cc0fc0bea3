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

#include <set>

#include <gtest/gtest.h>

#include "optdt/generator.hpp"
#include "optdt/rewarding.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace optdt {
namespace {

using PairList = std::vector<ActionOutcomePair>;

std::set<PairList> as_set(const RewardingSetBundle& bundle) {
  std::set<PairList> out;
  for (const auto& s : bundle) out.insert(s.pairs);
  return out;
}

oracle::PairSet to_oracle(const PairList& pairs) {
  oracle::PairSet out;
  for (const auto& p : pairs) out.insert({p.action, p.outcome});
  return out;
}

TEST(RewardingTest, IllustrativeGoldenSets) {
  const Scenario scn = fixtures::illustrative();
  const auto bundle = enumerate_rewarding_sets(scn);
  const std::set<PairList> expected = {
      {{0, 2}, {3, 2}, {4, 2}},
      {{0, 2}, {1, 2}, {3, 2}, {5, 2}},
      {{1, 2}, {2, 2}, {3, 2}, {5, 2}},
      {{2, 2}, {6, 2}},
  };
  EXPECT_EQ(as_set(bundle), expected);
  EXPECT_EQ(filter_dominated(bundle).size(), 4u);
}

TEST(RewardingTest, TargetRewardsAndCosts) {
  const Scenario scn = fixtures::illustrative();
  for (const auto& s : enumerate_rewarding_sets(scn)) {
    EXPECT_DOUBLE_EQ(s.total_cost, static_cast<double>(s.pairs.size()));
    if (s.contains({6, 2})) {
      EXPECT_DOUBLE_EQ(s.target_reward, 1.0);
    }
    if (s.contains({4, 2})) {
      EXPECT_DOUBLE_EQ(s.target_reward, 0.5);
    }
    if (s.contains({5, 2})) {
      EXPECT_DOUBLE_EQ(s.target_reward, 0.1);
    }
  }
}

TEST(RewardingTest, CutLoopSolvesOneProgramPerSetPlusOne) {
  const Scenario scn = fixtures::illustrative();
  EnumerationStats stats;
  const auto bundle = enumerate_rewarding_sets(scn, {}, &stats);
  EXPECT_EQ(stats.iterations, bundle.size() + 1);
}

TEST(RewardingTest, IterationLimitRaisesTimeout) {
  const Scenario scn = fixtures::illustrative();
  EnumerationOptions options;
  options.max_iterations = 2;
  EXPECT_THROW(enumerate_rewarding_sets(scn, options), TimeoutError);
}

TEST(RewardingTest, DominanceRemovesSupersetWithLowerReward) {
  const Scenario scn = fixtures::illustrative();
  RewardingSetBundle bundle = {make_rewarding_set(scn, {{2, 2}, {6, 2}}),
                               make_rewarding_set(scn, {{2, 2}, {3, 2}, {6, 2}}),
                               make_rewarding_set(scn, {{0, 2}, {3, 2}, {4, 2}})};
  bundle[1].target_reward = 0.5;
  const auto kept = filter_dominated(bundle);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].pairs, bundle[0].pairs);
  EXPECT_EQ(kept[1].pairs, bundle[2].pairs);
}

TEST(RewardingTest, PropagationDropsRealizedPairs) {
  const Scenario scn = fixtures::illustrative();
  const auto bundle = root_bundle(scn);
  const State child{0, 0, 2, 0, 0, 0, 0};
  const auto next = propagate(bundle, {2, 2}, child, scn);
  const std::set<PairList> expected = {
      {{0, 2}, {3, 2}, {4, 2}},
      {{0, 2}, {1, 2}, {3, 2}, {5, 2}},
      {{1, 2}, {3, 2}, {5, 2}},
      {{6, 2}},
  };
  EXPECT_EQ(as_set(next), expected);
}

TEST(RewardingTest, PropagationDropsSetsWithOtherOutcome) {
  const Scenario scn = fixtures::illustrative();
  const auto bundle = root_bundle(scn);
  const auto next = propagate(bundle, {2, 1}, State{0, 0, 1, 0, 0, 0, 0}, scn);
  const std::set<PairList> expected = {
      {{0, 2}, {3, 2}, {4, 2}},
      {{0, 2}, {1, 2}, {3, 2}, {5, 2}},
  };
  EXPECT_EQ(as_set(next), expected);
}

TEST(RewardingTest, PropagationDropsUnaffordableAndReached) {
  const Scenario scn = fixtures::illustrative();
  const auto bundle = root_bundle(scn);
  // Two units left after a1: the full-cost check applies only to sets that
  // do not contain the realized pair.
  Scenario tight = scn;
  tight.root_budget = 3;
  const auto next = propagate(bundle, {0, 2}, State{2, 0, 0, 0, 0, 0, 0}, tight);
  EXPECT_EQ(as_set(next), (std::set<PairList>{{{3, 2}, {4, 2}},
                                              {{1, 2}, {3, 2}, {5, 2}},
                                              {{2, 2}, {6, 2}}}));
  // At reward 1 nothing can improve.
  EXPECT_TRUE(propagate(bundle, {6, 2}, State{0, 0, 2, 0, 0, 0, 2}, scn).empty());
}

TEST(RewardingTest, PruneKeepsActionsInImprovingSets) {
  const Scenario scn = fixtures::illustrative();
  const auto bundle = root_bundle(scn);
  EXPECT_EQ(prune_actions({0, 1, 2}, bundle, 0.0), (std::vector<ActionIndex>{0, 1, 2}));
  EXPECT_EQ(prune_actions({0, 1, 2}, bundle, 0.5), (std::vector<ActionIndex>{2}));
  EXPECT_TRUE(prune_actions({0, 1, 2}, {}, 0.0).empty());
}

TEST(RewardingTest, NonRootStartFixesRealizedPairs) {
  Scenario scn = fixtures::illustrative();
  scn.root_state = State{2, 0, 2, 2, 1, 0, 0};
  scn.root_budget = 2;
  finalize_scenario(scn);
  const auto bundle = enumerate_rewarding_sets(scn);
  EXPECT_EQ(as_set(bundle),
            (std::set<PairList>{{{6, 2}}, {{1, 2}, {5, 2}}}));
}

TEST(RewardingTest, MatchesBruteForceOnGeneratedScenarios) {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 30; ++seed) {
    GeneratorParams p;
    p.n_actions = 5;
    p.seed = seed;
    const Scenario scn = generate_instance(p);
    std::size_t omega = 0;
    for (const auto& a : scn.actions) omega += a.outcomes.size();
    if (omega > 12) continue;
    std::set<oracle::PairSet> got;
    for (const auto& s : enumerate_rewarding_sets(scn)) got.insert(to_oracle(s.pairs));
    EXPECT_EQ(got, oracle::brute_force_rewarding_sets(scn)) << "seed " << seed;
    ++checked;
  }
}

TEST(RewardingTest, MatchesBruteForceWithPreclusions) {
  Scenario scn = fixtures::illustrative();
  std::set<oracle::PairSet> got;
  for (const auto& s : enumerate_rewarding_sets(scn)) got.insert(to_oracle(s.pairs));
  EXPECT_EQ(got, oracle::brute_force_rewarding_sets(scn));

  // NOTOR on a7: not both (a1,2) and (a2,2).
  scn.actions[6].prereq.notor_set = {{0, 2}, {1, 2}};
  scn.actions[5].prereq.or_set = {{0, 1}, {2, 1}};
  finalize_scenario(scn);
  got.clear();
  for (const auto& s : enumerate_rewarding_sets(scn)) got.insert(to_oracle(s.pairs));
  EXPECT_EQ(got, oracle::brute_force_rewarding_sets(scn));
}

}  // namespace
}  // namespace optdt
