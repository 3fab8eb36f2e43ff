/*
 * Copyright 2026 The anovadistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "anovadistill/analytic.h"
#include "anovadistill/error.h"
#include "anovadistill/rng.h"
#include "anovadistill/screening.h"
#include "screening_cases.h"
#include "test_util.h"

namespace anovadistill {
namespace {

std::vector<IndexSet> Sets(std::initializer_list<std::vector<int>> sets) {
  std::vector<IndexSet> out;
  for (const auto& s : sets) out.emplace_back(s);
  return out;
}

ScreeningConfig Cfg(int K, uint64_t seed = 1) {
  ScreeningConfig cfg;
  cfg.K = K;
  cfg.mc.seed = seed;
  return cfg;
}

using testing::MakeRandomCase;
using testing::RandomCase;
using testing::TableScorer;

void ExpectSameResult(const ScreeningResult& a, const ScreeningResult& b) {
  EXPECT_EQ(a.V, b.V);
  ASSERT_EQ(a.levels.size(), b.levels.size());
  for (std::size_t k = 0; k < a.levels.size(); ++k) {
    EXPECT_EQ(a.levels[k].candidates, b.levels[k].candidates) << "order " << k + 1;
    EXPECT_EQ(a.levels[k].survivors, b.levels[k].survivors) << "order " << k + 1;
    EXPECT_EQ(a.levels[k].gamma, b.levels[k].gamma);
    EXPECT_EQ(a.levels[k].capped, b.levels[k].capped);
    EXPECT_EQ(a.levels[k].evals, b.levels[k].evals);
  }
  EXPECT_EQ(a.R, b.R);
}

void ExpectWellFormed(const ScreeningResult& r, const ScreeningConfig& cfg) {
  const std::set<int> v(r.V.begin(), r.V.end());
  ASSERT_EQ(static_cast<int>(r.levels.size()), cfg.K);
  for (int k = 2; k <= cfg.K; ++k) {
    const auto& prev = r.levels[k - 2].survivors;
    const std::set<IndexSet> alive(prev.begin(), prev.end());
    for (const auto& j : r.levels[k - 1].candidates) {
      for (const auto& a : Ancestors(j)) {
        EXPECT_TRUE(alive.count(a)) << j.ToString();
      }
    }
  }
  for (int k = 1; k <= cfg.K; ++k) {
    const auto& level = r.levels[k - 1];
    EXPECT_LE(static_cast<int>(level.survivors.size()), cfg.CapFor(k));
    EXPECT_TRUE(std::is_sorted(level.candidates.begin(), level.candidates.end()));
    EXPECT_TRUE(std::is_sorted(level.survivors.begin(), level.survivors.end()));
    const std::set<IndexSet> s(level.candidates.begin(), level.candidates.end());
    for (const auto& j : level.survivors) EXPECT_TRUE(s.count(j));
  }
  for (const auto& j : r.R) {
    EXPECT_LE(j.order(), cfg.K);
    for (int l : j) EXPECT_TRUE(v.count(l));
  }
}

TEST(SelectFeaturesTest, Examples) {
  const Dataset d = testing::UniformData(300, 3, 1);
  auto linear = testing::Fn(3, [](const double* x) { return x[0]; });
  EXPECT_EQ(ScreenFeatures(*linear, d, Cfg(2)), (std::vector<int>{0}));
  auto constant = testing::Fn(3, [](const double*) { return 1.5; });
  double tau0 = -1;
  EXPECT_TRUE(ScreenFeatures(*constant, d, Cfg(2), nullptr, &tau0).empty());
  EXPECT_EQ(tau0, 0.0);

  ImportanceTable t;
  t.Insert({IndexSet({0}), 1.0, 1, 0, 0});
  t.Insert({IndexSet({1}), 0.1, 1, 0, 0});
  t.Insert({IndexSet({2}), 0.5, 1, 0, 0});
  EXPECT_EQ(SelectFeatures(t, 0.1), (std::vector<int>{0, 2}));
  EXPECT_EQ(SelectFeatures(t, 0.0), (std::vector<int>{0, 1, 2}));
}

TEST(SelectFeaturesTest, F6SkipsItsUnusedCoordinate) {
  auto f6 = AnalyticPredictor::Make("F6");
  const Dataset d = GenerateUniform(f6->FeatureSpecs(), 1000, 2);
  ScreeningConfig cfg = Cfg(2);
  cfg.tau0_frac = 0.0;
  EXPECT_EQ(ScreenFeatures(*f6, d, cfg),
            (std::vector<int>{0, 1, 2, 3, 4, 5, 7, 8, 9}));
}

TEST(ScreenTest, ProductPlusLinear) {
  auto f = testing::Fn(3, [](const double* x) { return x[0] * x[1] + x[2]; });
  const Dataset d = testing::UniformData(500, 3, 3);
  const ScreeningResult r = Screen(*f, d, Cfg(2));
  EXPECT_EQ(r.V, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(r.levels[0].survivors, Sets({{0}, {1}}));
  EXPECT_EQ(r.levels[1].candidates, Sets({{0, 1}}));
  // D_01 f = 1 is constant, so nothing lies above {0,1}.
  EXPECT_TRUE(r.levels[1].survivors.empty());
  EXPECT_EQ(r.R, Sets({{0}, {1}, {2}, {0, 1}}));
}

TEST(ScreenTest, AdditiveHasNoInteractions) {
  auto f = testing::Fn(4, [](const double* x) {
    return std::sin(4 * x[0]) + std::exp(x[1]) + x[2] * x[2] * x[2] - x[3];
  });
  const Dataset d = testing::UniformData(500, 4, 4);
  for (int K = 1; K <= 4; ++K) {
    const ScreeningResult r = Screen(*f, d, Cfg(K));
    EXPECT_EQ(r.V.size(), 4u);
    for (const auto& level : r.levels) EXPECT_TRUE(level.survivors.empty());
    EXPECT_EQ(r.R, Sets({{0}, {1}, {2}, {3}}));
  }
}

TEST(ScreenTest, PureThreeWay) {
  auto f = testing::Fn(3, [](const double* x) { return x[0] * x[1] * x[2]; });
  const Dataset d = testing::UniformData(500, 3, 5);
  const ScreeningResult r = Screen(*f, d, Cfg(3));
  EXPECT_EQ(r.levels[1].survivors, Sets({{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(r.levels[2].candidates, Sets({{0, 1, 2}}));
  EXPECT_EQ(r.R, Sets({{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}}));
}

TEST(ScreenTest, ConstantGivesEmptyResult) {
  auto f = testing::Fn(3, [](const double*) { return -2.0; });
  const Dataset d = testing::UniformData(100, 3, 6);
  const ScreeningResult r = Screen(*f, d, Cfg(3));
  EXPECT_TRUE(r.V.empty());
  EXPECT_TRUE(r.R.empty());
  EXPECT_EQ(r.levels.size(), 3u);
}

TEST(ScreenTest, EvalCountsFollowCostModel) {
  auto f6 = AnalyticPredictor::Make("F6");
  const Dataset d = GenerateUniform(f6->FeatureSpecs(), 500, 7);
  ScreeningConfig cfg = Cfg(3);
  cfg.mc.m_anchor = 6;
  cfg.mc.m_comp = 5;
  const ScreeningResult r = Screen(*f6, d, cfg);
  uint64_t total = r.feature_scores.TotalEvals();
  EXPECT_EQ(total, 10u * 30u);
  for (const auto& level : r.levels) {
    EXPECT_EQ(level.evals, level.candidates.size() * 30u << level.order);
    total += level.evals;
  }
  EXPECT_EQ(r.TotalEvals(), total);
  EXPECT_EQ(f6->eval_count(), total);
}

TEST(ScreenTest, IndependentOfWorkerCount) {
  auto f = AnalyticPredictor::Make("F1");
  const Dataset d = GenerateUniform(f->FeatureSpecs(), 400, 8);
  ScreeningConfig a = Cfg(3), b = Cfg(3);
  a.mc.workers = 1;
  b.mc.workers = 6;
  const ScreeningResult ra = Screen(*f, d, a);
  const ScreeningResult rb = Screen(*f, d, b);
  EXPECT_EQ(ra.ToJson(), rb.ToJson());
}

TEST(ScreenTest, InvariantToOutputScale) {
  auto f = AnalyticPredictor::Make("F3");
  const Dataset d = GenerateUniform(f->FeatureSpecs(), 400, 9);
  const ScreeningResult base = Screen(*f, d, Cfg(3));
  for (double c : {2.0, 0.5}) {
    ScaledPredictor g(*f, c);
    const ScreeningResult scaled = Screen(g, d, Cfg(3));
    EXPECT_EQ(scaled.V, base.V);
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(scaled.levels[k].survivors, base.levels[k].survivors);
      EXPECT_EQ(scaled.levels[k].gamma, c * c * base.levels[k].gamma);
    }
    EXPECT_EQ(scaled.R, base.R);
  }
}

TEST(ScreenTest, DimensionMismatch) {
  auto f = testing::Fn(2, [](const double* x) { return x[0]; });
  const Dataset d = testing::UniformData(100, 3, 6);
  EXPECT_THROW(Screen(*f, d, Cfg(2)), InvalidArgumentError);
}

TEST(BruteForceTest, Examples) {
  ScreeningConfig cfg = Cfg(2);
  ImportanceTable total, scores;
  for (int j = 0; j < 3; ++j) {
    total.Insert({IndexSet::Single(j), 1.0, 1, 0, 0});
    scores.Insert({IndexSet::Single(j), 0.0, 1, 0, 0});
  }
  for (const auto& j : SubsetsOfSize(std::vector<int>{0, 1, 2}, 2)) scores.Insert({j, 0.0, 2, 0, 0});
  ScreeningResult r = BruteForceScreen(total, scores, cfg);
  for (const auto& level : r.levels) EXPECT_TRUE(level.survivors.empty());

  // One nonzero pair, reachable through its two nonzero singletons.
  ImportanceTable one;
  for (int j = 0; j < 3; ++j) {
    one.Insert({IndexSet::Single(j), j < 2 ? 1.0 : 0.0, 1, 0, 0});
  }
  for (const auto& j : SubsetsOfSize(std::vector<int>{0, 1, 2}, 2)) {
    one.Insert({j, j == IndexSet({0, 1}) ? 0.5 : 0.0, 2, 0, 0});
  }
  r = BruteForceScreen(total, one, cfg);
  EXPECT_EQ(r.levels[1].survivors, Sets({{0, 1}}));

  ImportanceTable partial;
  partial.Insert({IndexSet({0}), 1.0, 1, 0, 0});
  EXPECT_THROW(BruteForceScreen(total, partial, cfg), InvalidArgumentError);
}

TEST(BruteForceTest, LevelwiseMatchesOracleOnRandomTables) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomCase c = MakeRandomCase(rng);
    const ScreeningResult oracle = BruteForceScreen(c.total, c.scores, c.cfg);
    std::vector<IndexSet> asked;
    const ScreeningResult fast = ScreenInteractions(
        oracle.V, TableScorer{&c.scores, &asked}, c.cfg);
    SCOPED_TRACE("trial " + std::to_string(trial));
    ExpectSameResult(fast, oracle);
    ExpectWellFormed(fast, c.cfg);
    EXPECT_TRUE(testing::DownwardClosed(fast));
    std::size_t scored = 0;
    for (const auto& level : oracle.levels) scored += level.candidates.size();
    EXPECT_EQ(asked.size(), scored);
  }
}

TEST(BruteForceTest, ScaleInvariance) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    RandomCase c = MakeRandomCase(rng);
    for (double factor : {4.0, 0.25}) {
      const ImportanceTable total = testing::ScaledTable(c.total, factor);
      const ImportanceTable scores = testing::ScaledTable(c.scores, factor);
      const ScreeningResult a = BruteForceScreen(c.total, c.scores, c.cfg);
      const ScreeningResult b = BruteForceScreen(total, scores, c.cfg);
      EXPECT_EQ(a.V, b.V);
      for (std::size_t k = 0; k < a.levels.size(); ++k) {
        EXPECT_EQ(a.levels[k].survivors, b.levels[k].survivors);
      }
      EXPECT_EQ(a.R, b.R);
    }
  }
}

TEST(BruteForceTest, DroppingASurvivorShrinksNextCandidates) {
  Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    RandomCase c = MakeRandomCase(rng);
    c.cfg.caps.clear();
    const ScreeningResult base = BruteForceScreen(c.total, c.scores, c.cfg);
    for (int k = 1; k < c.cfg.K; ++k) {
      const auto& level = base.levels[k - 1];
      if (level.survivors.size() < 2) continue;
      // Zero out a survivor that does not hold the level maximum, so the
      // threshold at this level is unchanged.
      const double best = level.scores.MaxScore(k);
      for (const auto& drop : level.survivors) {
        if (c.scores.Score(drop) == best) continue;
        ImportanceTable edited;
        for (auto [j, e] : c.scores.entries()) {
          if (j == drop) e.score = 0.0;
          edited.Insert(e);
        }
        const ScreeningResult r = BruteForceScreen(c.total, edited, c.cfg);
        std::vector<IndexSet> expected = level.survivors;
        expected.erase(std::find(expected.begin(), expected.end(), drop));
        EXPECT_EQ(r.levels[k - 1].survivors, expected);
        const auto& before = base.levels[k].candidates;
        for (const auto& j : r.levels[k].candidates) {
          EXPECT_TRUE(std::binary_search(before.begin(), before.end(), j));
        }
        ++checked;
        break;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(ScreeningCapTest, TruncatesByScoreThenLexicographic) {
  ScreeningConfig cfg = Cfg(2);
  cfg.caps = {{2, 2}};
  ImportanceTable total, scores;
  for (int j = 0; j < 4; ++j) {
    total.Insert({IndexSet::Single(j), 1.0, 1, 0, 0});
    scores.Insert({IndexSet::Single(j), 1.0, 1, 0, 0});
  }
  const double pair_scores[] = {0.5, 0.9, 0.5, 0.9, 0.5, 0.01};
  int i = 0;
  for (const auto& j : SubsetsOfSize(std::vector<int>{0, 1, 2, 3}, 2)) {
    scores.Insert({j, pair_scores[i++], 2, 0, 0});
  }
  const ScreeningResult r = BruteForceScreen(total, scores, cfg);
  // Pairs in order: 01 02 03 12 13 23.
  EXPECT_EQ(r.levels[1].survivors, Sets({{0, 2}, {1, 2}}));
  EXPECT_EQ(r.levels[1].capped, 3);
  EXPECT_DOUBLE_EQ(r.levels[1].gamma, 0.09);
  EXPECT_EQ(r.R, Sets({{0}, {1}, {2}, {3}, {0, 2}, {1, 2}}));

  std::vector<IndexSet> sets = Sets({{1, 3}, {0, 1}, {0, 2}, {2, 3}});
  SortByScore(sets, scores);
  EXPECT_EQ(sets, Sets({{0, 2}, {0, 1}, {1, 3}, {2, 3}}));
}

TEST(ScreeningConfigTest, ValidationAndJson) {
  ScreeningConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.K = 0;
  EXPECT_THROW(cfg.Validate(), InvalidArgumentError);
  cfg.K = 5;
  EXPECT_THROW(cfg.Validate(), InvalidArgumentError);
  cfg = ScreeningConfig();
  cfg.tau = 1.0;
  EXPECT_THROW(cfg.Validate(), InvalidArgumentError);
  cfg = ScreeningConfig();
  cfg.caps[3] = 0;
  EXPECT_THROW(cfg.Validate(), InvalidArgumentError);

  ScreeningConfig a;
  a.K = 4;
  a.tau = 0.2;
  a.caps = {{2, 7}};
  a.mc.seed = 99;
  a.h.mode = BandwidthMode::kSchedule;
  ScreeningConfig b;
  ScreeningConfigFromJson(ScreeningConfigToJson(a), &b);
  EXPECT_EQ(ScreeningConfigToJson(a), ScreeningConfigToJson(b));
  EXPECT_EQ(b.CapFor(2), 7);
  EXPECT_GT(b.CapFor(3), 1000000);
  EXPECT_THROW(ScreeningConfigFromJson({{"K", "three"}}, &b),
               InvalidArgumentError);
}

TEST(ScreeningResultTest, JsonRoundTrip) {
  auto f = AnalyticPredictor::Make("F10");
  const Dataset d = GenerateUniform(f->FeatureSpecs(), 300, 10);
  ScreeningConfig cfg = Cfg(3);
  cfg.mc.m_anchor = cfg.mc.m_comp = 8;
  const ScreeningResult r = Screen(*f, d, cfg);
  const nlohmann::json doc = r.ToJson();
  for (const char* key :
       {"V", "tau0", "feature_scores", "levels", "R", "total_evals", "config"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  const ScreeningResult back = ScreeningResult::FromJson(doc);
  EXPECT_EQ(back.ToJson(), doc);
  ExpectSameResult(back, r);
  EXPECT_THROW(ScreeningResult::FromJson({{"V", {1}}}), InvalidArgumentError);
}

}  // namespace
}  // namespace anovadistill
