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
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "anovadistill/derivative.h"
#include "anovadistill/error.h"
#include "anovadistill/rng.h"
#include "test_util.h"

namespace anovadistill {
namespace {

using testing::Fn;

std::vector<FeatureKind> Continuous(int p) {
  return std::vector<FeatureKind>(p, FeatureKind::kContinuous);
}

// Nested composition of one-dimensional central differences, written
// directly from the definition for interior points.
double Recursive(const std::function<double(const std::vector<double>&)>& f,
                 std::vector<double> x, const std::vector<int>& j,
                 const std::vector<double>& h, std::size_t depth = 0) {
  if (depth == j.size()) return f(x);
  const int c = j[depth];
  const double base = x[c];
  x[c] = base + 0.5 * h[depth];
  const double plus = Recursive(f, x, j, h, depth + 1);
  x[c] = base - 0.5 * h[depth];
  const double minus = Recursive(f, x, j, h, depth + 1);
  return (plus - minus) / h[depth];
}

TEST(CentralDifferenceTest, LinearIsExact) {
  auto f = Fn(2, [](const double* x) { return 3.0 * x[0] - x[1]; });
  for (double a : {0.0, 0.2, 0.5, 0.97, 1.0}) {
    const std::vector<double> x = {a, 0.3};
    EXPECT_NEAR(CentralDifference(*f, x, 0, 0.1), 3.0, 1e-13);
    EXPECT_NEAR(CentralDifference(*f, x, 1, 0.25), -1.0, 1e-13);
  }
}

TEST(CentralDifferenceTest, QuadraticIsExact) {
  auto f = Fn(1, [](const double* x) { return x[0] * x[0]; });
  const std::vector<double> x = {0.5};
  EXPECT_NEAR(CentralDifference(*f, x, 0, 0.1), 1.0, 1e-13);
}

TEST(CentralDifferenceTest, SineErrorMatchesLeadingTerm) {
  auto f = Fn(1, [](const double* x) { return std::sin(x[0]); });
  const std::vector<double> x = {0.5};
  const double d = CentralDifference(*f, x, 0, 0.1);
  const double expected = (std::sin(0.55) - std::sin(0.45)) / 0.1;
  EXPECT_NEAR(d, expected, 1e-14);
  EXPECT_NEAR(d, 0.8772169, 1e-7);
  const double err = std::cos(0.5) - d;
  EXPECT_NEAR(err, std::cos(0.5) * 0.01 / 24.0, 1e-7);
}

TEST(CentralDifferenceTest, ConvergesAtSecondOrder) {
  auto f = Fn(2, [](const double* x) { return std::exp(x[0] + x[1]); });
  for (const auto& x : std::vector<std::vector<double>>{
           {0.4, 0.3}, {0.5, 0.5}, {0.6, 0.2}}) {
    const double truth = std::exp(x[0] + x[1]);
    const double e1 = std::abs(CentralDifference(*f, x, 0, 0.2) - truth);
    const double e2 = std::abs(CentralDifference(*f, x, 0, 0.1) - truth);
    const double e3 = std::abs(CentralDifference(*f, x, 0, 0.05) - truth);
    EXPECT_LE(e2, 0.3 * e1);
    EXPECT_LE(e3, 0.3 * e2);
  }
}

TEST(CentralDifferenceTest, BoundaryShiftKeepsSpacing) {
  const StencilPlan plan(IndexSet({0}), Continuous(2), std::vector<double>{0.1});
  const std::vector<double> x = {0.01, 0.4};
  const Stencil s = plan.Build(x);
  EXPECT_DOUBLE_EQ(s.center[0], 0.05);
  EXPECT_EQ(s.points(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s.points(1, 0), 0.1);
  EXPECT_EQ(s.points(0, 1), 0.4);
  EXPECT_DOUBLE_EQ(s.divisor, 0.1);

  const std::vector<double> top = {1.0, 0.4};
  const Stencil t = plan.Build(top);
  EXPECT_DOUBLE_EQ(t.points(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.points(0, 0), 0.9);

  // Quadratic exactness at the shifted center.
  auto f = Fn(2, [](const double* x) { return x[0] * x[0]; });
  EXPECT_NEAR(CentralDifference(*f, x, 0, 0.1), 0.1, 1e-13);
}

TEST(MixedDifferenceTest, Examples) {
  auto bilinear = Fn(3, [](const double* x) { return x[0] * x[1]; });
  auto additive = Fn(3, [](const double* x) {
    return std::sin(3 * x[0]) + std::exp(x[1]) + x[2];
  });
  auto quad_lin = Fn(3, [](const double* x) { return x[0] * x[0] * x[1]; });
  const double h[] = {0.1, 0.1};
  const IndexSet j({0, 1});
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> x = {UniformUnit(rng), UniformUnit(rng),
                                   UniformUnit(rng)};
    EXPECT_NEAR(MixedDifference(*bilinear, x, j, h), 1.0, 1e-12);
    EXPECT_NEAR(MixedDifference(*additive, x, j, h), 0.0, 1e-12);
  }
  const std::vector<double> mid = {0.5, 0.5, 0.5};
  EXPECT_NEAR(MixedDifference(*quad_lin, mid, j, h), 1.0, 1e-12);
}

TEST(MixedDifferenceTest, StencilInvariants) {
  for (int k = 1; k <= kMaxOrder; ++k) {
    std::vector<int> idx;
    std::vector<double> h;
    for (int l = 0; l < k; ++l) {
      idx.push_back(l * 2);
      h.push_back(0.05 * (l + 1));
    }
    const StencilPlan plan(IndexSet(idx), Continuous(8), h);
    const Stencil s = plan.Build(std::vector<double>(8, 0.5));
    ASSERT_EQ(s.points.rows(), 1 << k);
    double prod = 1.0;
    for (double v : h) prod *= v;
    EXPECT_DOUBLE_EQ(s.divisor, prod);
    for (int mask = 0; mask < (1 << k); ++mask) {
      const int minus = k - std::popcount(static_cast<unsigned>(mask));
      EXPECT_EQ(s.signs[mask], minus % 2 == 0 ? 1 : -1);
      for (int d = 0; d < 8; ++d) {
        EXPECT_GE(s.points(mask, d), 0.0);
        EXPECT_LE(s.points(mask, d), 1.0);
      }
    }
  }
}

TEST(MixedDifferenceTest, EvaluationCountIsTwoToTheK) {
  auto f = Fn(5, [](const double* x) { return x[0] * x[1] * x[2] * x[3]; });
  const std::vector<double> x(5, 0.5);
  const BandwidthSchedule h;
  for (int k = 1; k <= 4; ++k) {
    std::vector<int> idx(k);
    for (int l = 0; l < k; ++l) idx[l] = l;
    const uint64_t before = f->eval_count();
    MixedDifference(*f, x, IndexSet(idx), h);
    EXPECT_EQ(f->eval_count() - before, 1u << k);
  }
}

TEST(MixedDifferenceTest, MatchesRecursiveComposition) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), pos(0.3, 0.7),
      bw(0.02, 0.2);
  std::uniform_int_distribution<int> deg(0, 3);
  const int p = 5;
  for (int trial = 0; trial < 200; ++trial) {
    // Random sum of monomials in 5 variables.
    std::vector<std::pair<double, std::vector<int>>> terms;
    for (int t = 0; t < 6; ++t) {
      std::vector<int> powers(p);
      for (int& e : powers) e = deg(rng);
      terms.emplace_back(coef(rng), powers);
    }
    auto poly = [terms](const double* x) {
      double s = 0.0;
      for (const auto& [c, e] : terms) {
        double m = c;
        for (int d = 0; d < 5; ++d) m *= std::pow(x[d], e[d]);
        s += m;
      }
      return s;
    };
    auto f = Fn(p, poly);
    const int k = 1 + trial % 4;
    std::vector<int> idx = {0, 1, 2, 3, 4};
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<double> h(k), x(p);
    for (double& v : h) v = bw(rng);
    for (double& v : x) v = pos(rng);
    const double flat = MixedDifference(*f, x, IndexSet(idx), h);
    const double nested = Recursive(
        [&](const std::vector<double>& v) { return poly(v.data()); }, x, idx,
        h);
    EXPECT_LE(std::abs(flat - nested),
              1e-12 * std::max(1.0, std::abs(nested)))
        << "trial " << trial;
  }
}

TEST(MixedDifferenceTest, OrderInvariant) {
  auto f = Fn(4, [](const double* x) {
    return std::sin(x[0] * x[2]) * std::exp(x[3]) + x[1];
  });
  const std::vector<double> x = {0.3, 0.6, 0.45, 0.8};
  const BandwidthSchedule h;
  const double a = MixedDifference(*f, x, IndexSet(std::vector<int>{0, 2, 3}), h);
  const double b = MixedDifference(*f, x, IndexSet(std::vector<int>{3, 0, 2}), h);
  const double c = MixedDifference(*f, x, IndexSet(std::vector<int>{2, 3, 0}), h);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(MixedDifferenceTest, Rejections) {
  auto f = Fn(6, [](const double* x) { return x[0]; });
  const std::vector<double> x(6, 0.5);
  const BandwidthSchedule h;
  EXPECT_THROW(MixedDifference(*f, x, IndexSet(), h), InvalidArgumentError);
  EXPECT_THROW(MixedDifference(*f, x, IndexSet({0, 1, 2, 3, 4}), h),
               InvalidArgumentError);
  EXPECT_THROW(MixedDifference(*f, x, IndexSet({7}), h), InvalidArgumentError);
  const double zero_h[] = {0.0};
  EXPECT_THROW(MixedDifference(*f, x, IndexSet({0}), zero_h),
               InvalidArgumentError);
  const std::vector<double> short_x(3, 0.5);
  EXPECT_THROW(MixedDifference(*f, short_x, IndexSet({0}), h),
               InvalidArgumentError);
}

TEST(BandwidthScheduleTest, ConstantAndSchedule) {
  BandwidthSchedule c;
  EXPECT_EQ(c.ForOrder(1), 0.1);
  EXPECT_EQ(c.ForOrder(3), 0.1);
  BandwidthSchedule s{BandwidthMode::kSchedule, 0.01};
  EXPECT_EQ(s.ForOrder(1), 0.01);
  EXPECT_NEAR(s.ForOrder(2), 0.1, 1e-15);
  EXPECT_NEAR(s.ForOrder(3), std::pow(0.01, 0.25), 1e-15);
  EXPECT_THROW((BandwidthSchedule{BandwidthMode::kConstant, 0.0}).Validate(),
               InvalidArgumentError);
  EXPECT_THROW((BandwidthSchedule{BandwidthMode::kConstant, 1.5}).Validate(),
               InvalidArgumentError);
  EXPECT_EQ(ParseBandwidthMode("schedule"), BandwidthMode::kSchedule);
  EXPECT_THROW(ParseBandwidthMode("adaptive"), InvalidArgumentError);
}

TEST(BinaryDifferenceTest, XorIsMinusTwoEverywhere) {
  auto xor_f = Fn(4, [](const double* x) {
    return x[0] + x[1] - 2.0 * x[0] * x[1];
  });
  // Same, plus a term in the complement: exact up to the rounding of 1 + r.
  auto shifted = Fn(4, [](const double* x) {
    return x[0] + x[1] - 2.0 * x[0] * x[1] + std::sin(5 * x[2]) * x[3];
  });
  const auto kinds = std::vector<FeatureKind>{
      FeatureKind::kBinary, FeatureKind::kBinary, FeatureKind::kContinuous,
      FeatureKind::kContinuous};
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> x = {static_cast<double>(t % 2),
                                   static_cast<double>((t / 2) % 2),
                                   UniformUnit(rng), UniformUnit(rng)};
    EXPECT_EQ(BinaryPartialDifference(*xor_f, x, IndexSet({0, 1}), kinds),
              -2.0);
    EXPECT_NEAR(BinaryPartialDifference(*shifted, x, IndexSet({0, 1}), kinds),
                -2.0, 1e-15);
  }
}

TEST(BinaryDifferenceTest, AdditiveAndSingle) {
  auto add = Fn(2, [](const double* x) { return 3 * x[0] - 7 * x[1]; });
  auto single = Fn(2, [](const double* x) { return x[0]; });
  const auto kinds = std::vector<FeatureKind>(2, FeatureKind::kBinary);
  const std::vector<double> x = {0.0, 1.0};
  EXPECT_EQ(BinaryPartialDifference(*add, x, IndexSet({0, 1}), kinds), 0.0);
  EXPECT_EQ(BinaryPartialDifference(*single, x, IndexSet({0}), kinds), 1.0);
  const auto mixed =
      std::vector<FeatureKind>{FeatureKind::kBinary, FeatureKind::kContinuous};
  try {
    BinaryPartialDifference(*add, x, IndexSet({0, 1}), mixed);
    FAIL();
  } catch (const InvalidArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("is not binary"), std::string::npos);
  }
}

TEST(PartialDifferenceTest, ComposesBinaryAndContinuous) {
  // b * x^2: binary step over b times the central difference over x.
  auto f = Fn(2, [](const double* x) { return x[0] * x[1] * x[1]; });
  const auto kinds =
      std::vector<FeatureKind>{FeatureKind::kBinary, FeatureKind::kContinuous};
  const std::vector<double> x = {0.0, 0.5};
  EXPECT_NEAR(PartialDifference(*f, x, IndexSet({0, 1}), kinds, {}), 1.0,
              1e-13);
  const StencilPlan plan(IndexSet({0, 1}), kinds, BandwidthSchedule{});
  EXPECT_DOUBLE_EQ(plan.divisor(), 0.1);
  EXPECT_EQ(plan.size(), 4);
}

}  // namespace
}  // namespace anovadistill
