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
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "anovadistill/dataset.h"
#include "anovadistill/error.h"
#include "anovadistill/index_set.h"
#include "anovadistill/rng.h"
#include "test_util.h"

namespace anovadistill {
namespace {

TEST(CsvTest, MinMaxScalesContinuousColumn) {
  const Dataset d = ParseCsv("a,b\n2,7\n3,8\n4,9\n");
  ASSERT_EQ(d.n(), 3);
  ASSERT_EQ(d.p(), 2);
  EXPECT_EQ(d(0, 0), 0.0);
  EXPECT_EQ(d(1, 0), 0.5);
  EXPECT_EQ(d(2, 0), 1.0);
  EXPECT_EQ(d.specs()[0].raw_min, 2.0);
  EXPECT_EQ(d.specs()[0].raw_max, 4.0);
  EXPECT_EQ(d.specs()[0].name, "a");
}

TEST(CsvTest, BinaryHintPassesThrough) {
  const Dataset d = ParseCsv("flag,v\n1,0.5\n0,1.5\n1,2.5\n",
                             {{"flag", FeatureKind::kBinary}});
  EXPECT_TRUE(d.is_binary(0));
  EXPECT_FALSE(d.is_binary(1));
  EXPECT_EQ(d(0, 0), 1.0);
  EXPECT_EQ(d(1, 0), 0.0);
  EXPECT_EQ(d(2, 0), 1.0);
}

TEST(CsvTest, ConstantColumnRejected) {
  try {
    ParseCsv("a,b\n1,2\n1,3\n");
    FAIL() << "expected an error";
  } catch (const InvalidArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("constant feature"),
              std::string::npos);
  }
}

TEST(CsvTest, ParseFailureNamesRowAndColumn) {
  try {
    ParseCsv("a,b\n1,2\n3,oops\n", {}, "in.csv");
    FAIL() << "expected an error";
  } catch (const InvalidArgumentError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(b)"), std::string::npos) << msg;
  }
}

TEST(CsvTest, RaggedRowAndBadBinaryRejected) {
  EXPECT_THROW(ParseCsv("a,b\n1,2\n3\n"), InvalidArgumentError);
  EXPECT_THROW(ParseCsv("a,b\n1,2\n0.5,3\n", {{"a", FeatureKind::kBinary}}),
               InvalidArgumentError);
  EXPECT_THROW(ParseCsv("a,b\n1,2\n3,4\n", {{"zzz", FeatureKind::kBinary}}),
               InvalidArgumentError);
  EXPECT_THROW(ParseCsv(""), InvalidArgumentError);
  EXPECT_THROW(ParseCsv("a\n1\n"), InvalidArgumentError);
}

TEST(CsvTest, MissingFile) {
  try {
    LoadCsv("/nonexistent/data.csv");
    FAIL();
  } catch (const InvalidArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("data file not found"),
              std::string::npos);
  }
}

TEST(DatasetTest, RejectsOutOfDomainValues) {
  RowMatrix v(2, 1);
  v << 0.2, 1.5;
  EXPECT_THROW(Dataset(testing::UnitSpecs(1), v), InvalidArgumentError);
  RowMatrix b(2, 1);
  b << 0.0, 0.5;
  EXPECT_THROW(Dataset(testing::UnitSpecs(1, 0), b), InvalidArgumentError);
  RowMatrix one(1, 1);
  one << 0.5;
  EXPECT_THROW(Dataset(testing::UnitSpecs(1), one), InvalidArgumentError);
}

TEST(DatasetTest, GenerateUniformRespectsKinds) {
  const Dataset d = testing::UniformData(500, 4, 7, 2);
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_GE(d(i, j), 0.0);
      EXPECT_LT(d(i, j), 1.0);
    }
    for (int j = 2; j < 4; ++j) {
      EXPECT_TRUE(d(i, j) == 0.0 || d(i, j) == 1.0);
    }
  }
  const Dataset again = testing::UniformData(500, 4, 7, 2);
  EXPECT_EQ(d.values(), again.values());
}

TEST(ScalePointTest, Examples) {
  const std::vector<FeatureSpec> identity = testing::UnitSpecs(2);
  const double raw[] = {0.3, 0.8};
  const ScaledPoint s = ScalePoint(raw, identity);
  EXPECT_EQ(s.values[0], 0.3);
  EXPECT_EQ(s.values[1], 0.8);
  EXPECT_FALSE(s.clamped);

  const std::vector<FeatureSpec> span = {
      {"a", FeatureKind::kContinuous, 2.0, 4.0}};
  const double three[] = {3.0};
  EXPECT_EQ(ScalePoint(three, span).values[0], 0.5);
  const double five[] = {5.0};
  const ScaledPoint out = ScalePoint(five, span);
  EXPECT_EQ(out.values[0], 1.0);
  EXPECT_TRUE(out.clamped);

  const double wrong[] = {1.0, 2.0};
  EXPECT_THROW(ScalePoint(wrong, span), InvalidArgumentError);
}

TEST(ScalePointTest, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lo(-1e3, 1e3), width(1e-3, 1e3),
      u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + trial % 6;
    std::vector<FeatureSpec> specs(p);
    std::vector<double> raw(p);
    for (int j = 0; j < p; ++j) {
      specs[j].raw_min = lo(rng);
      specs[j].raw_max = specs[j].raw_min + width(rng);
      raw[j] = specs[j].raw_min + u(rng) * (specs[j].raw_max - specs[j].raw_min);
    }
    const ScaledPoint s = ScalePoint(raw, specs);
    const Eigen::VectorXd back = UnscalePoint(
        std::span<const double>(s.values.data(), s.values.size()), specs);
    for (int j = 0; j < p; ++j) {
      const double scale = std::max(
          {std::abs(raw[j]), std::abs(specs[j].raw_min),
           std::abs(specs[j].raw_max)});
      EXPECT_LE(std::abs(back[j] - raw[j]), 1e-12 * scale);
    }
  }
}

TEST(IndexSetTest, SortsAndValidates) {
  const IndexSet j({3, 0, 7});
  EXPECT_EQ(j.indices(), (std::vector<int>{0, 3, 7}));
  EXPECT_EQ(j.ToString(), "0x3x7");
  EXPECT_EQ(IndexSet().ToString(), "intercept");
  EXPECT_THROW(IndexSet({1, 1}), InvalidArgumentError);
  EXPECT_THROW(IndexSet({-1}), InvalidArgumentError);
  EXPECT_EQ(j.PositionOf(7), 2);
  EXPECT_EQ(j.PositionOf(4), -1);
  EXPECT_EQ(j.SubsetByMask(0b101), IndexSet({0, 7}));
  EXPECT_TRUE(IndexSet({0, 7}).IsSubsetOf(j));
  EXPECT_FALSE(IndexSet({1}).IsSubsetOf(j));
  EXPECT_LT(IndexSet({0, 1}), IndexSet({0, 2}));
  EXPECT_LT(IndexSet({0, 1}), IndexSet({1}));
}

TEST(AncestorsTest, Examples) {
  EXPECT_EQ(Ancestors(IndexSet({1, 2, 3})),
            (std::vector<IndexSet>{IndexSet({1, 2}), IndexSet({1, 3}),
                                   IndexSet({2, 3})}));
  EXPECT_EQ(Ancestors(IndexSet({4})), (std::vector<IndexSet>{IndexSet()}));
  EXPECT_EQ(Ancestors(IndexSet({0, 7})),
            (std::vector<IndexSet>{IndexSet({0}), IndexSet({7})}));
}

TEST(AncestorsTest, SizeAndSubsetProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 1 + UniformIndex(rng, 6);
    std::set<int> pick;
    while (static_cast<int>(pick.size()) < k) pick.insert(UniformIndex(rng, 20));
    const IndexSet j(std::vector<int>(pick.begin(), pick.end()));
    const auto anc = Ancestors(j);
    ASSERT_EQ(static_cast<int>(anc.size()), k);
    std::set<IndexSet> distinct(anc.begin(), anc.end());
    EXPECT_EQ(distinct.size(), anc.size());
    for (const auto& a : anc) {
      EXPECT_EQ(a.order(), k - 1);
      EXPECT_TRUE(a.IsSubsetOf(j));
    }
  }
}

TEST(SubsetsOfSizeTest, CountsAndOrder) {
  const std::vector<int> pool = {0, 2, 3, 5, 8};
  const auto pairs = SubsetsOfSize(pool, 2);
  EXPECT_EQ(pairs.size(), 10u);
  EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end()));
  EXPECT_EQ(pairs.front(), IndexSet({0, 2}));
  EXPECT_EQ(SubsetsOfSize(pool, 3).size(), 10u);
  EXPECT_EQ(SubsetsOfSize(pool, 5).size(), 1u);
  EXPECT_TRUE(SubsetsOfSize(pool, 6).empty());
}

TEST(RngTest, DerivedSeedsSeparateStreams) {
  const int a[] = {0, 1};
  const int b[] = {0, 2};
  EXPECT_NE(DeriveSeed(1, "x", a), DeriveSeed(1, "x", b));
  EXPECT_NE(DeriveSeed(1, "x", a), DeriveSeed(1, "y", a));
  EXPECT_NE(DeriveSeed(1, "x", a), DeriveSeed(2, "x", a));
  EXPECT_EQ(DeriveSeed(1, "x", a), DeriveSeed(1, "x", a));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const int v = UniformIndex(rng, 7);
    EXPECT_GE(v, 0);
    EXPECT_LT(v, 7);
    const double u = UniformUnit(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace anovadistill
