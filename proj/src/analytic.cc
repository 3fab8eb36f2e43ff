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

#include "anovadistill/analytic.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "anovadistill/error.h"

namespace anovadistill {
namespace {

constexpr double kPi = std::numbers::pi;

// Formulas use the 1-based names x1..x10 of the benchmark table.
double F1(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x7 = x[6], x8 = x[7], x9 = x[8], x10 = x[9];
  return std::pow(kPi, x1 * x2) * std::sqrt(2.0 * x3) - std::asin(x4) +
         std::log(x3 + x5) - (x9 / x10) * std::sqrt(x7 / x8) - x2 * x7;
}

double F2(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x7 = x[6], x8 = x[7], x9 = x[8], x10 = x[9];
  return std::pow(kPi, x1 * x2) * std::sqrt(2.0 * std::abs(x3)) -
         std::asin(0.5 * x4) + std::log(std::abs(x3 + x5) + 1.0) +
         x9 / (1.0 + std::abs(x10)) *
             std::sqrt(std::abs(x7) / (1.0 + std::abs(x8))) -
         x2 * x7;
}

// x3^(2|x4|) is read as (x3^2)^|x4| so that it is real for negative x3.
double F3(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x7 = x[6], x8 = x[7], x9 = x[8], x10 = x[9];
  return std::exp(std::abs(x1 - x2)) + std::abs(x2 * x3) -
         std::pow(x3 * x3, std::abs(x4)) +
         std::log(x4 * x4 + x5 * x5 + x7 * x7 + x8 * x8) + x9 +
         1.0 / (1.0 + x10 * x10);
}

double F4(const double* x) {
  const double x1 = x[0], x4 = x[3];
  return F3(x) + (x1 * x4) * (x1 * x4);
}

double F5(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x6 = x[5], x7 = x[6], x8 = x[7], x9 = x[8], x10 = x[9];
  return 1.0 / (1.0 + x1 * x1 + x2 * x2 + x3 * x3) +
         std::sqrt(std::exp(x4 + x5)) + std::abs(x6 + x7) + x8 * x9 * x10;
}

double F6(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x6 = x[5], x8 = x[7], x9 = x[8], x10 = x[9];
  return std::exp(std::abs(x1 * x2) + 1.0) - std::exp(std::abs(x3 + x4) + 1.0) +
         std::cos(x5 + x6 - x8) + std::sqrt(x8 * x8 + x9 * x9 + x10 * x10);
}

double F7(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x6 = x[5], x7 = x[6], x8 = x[7], x9 = x[8];
  const double a = std::atan(x1) + std::atan(x2);
  const double prod = x4 * x5 * x6 * x7 * x8;
  double sum = 0.0;
  for (int i = 0; i < 10; ++i) sum += x[i];
  return a * a + std::max(x3 * x4 + x6, 0.0) - 1.0 / (1.0 + prod * prod) +
         std::pow(std::abs(x7) / (1.0 + std::abs(x9)), 5) + sum;
}

double F8(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x6 = x[5], x7 = x[6], x8 = x[7], x9 = x[8], x10 = x[9];
  return x1 * x2 + std::pow(2.0, x3 + x5 + x6) +
         std::pow(2.0, x3 + x4 + x5 + x7) + std::sin(x7 * std::sin(x8 + x9)) +
         std::acos(0.9 * x10);
}

double F9(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x6 = x[5], x7 = x[6], x8 = x[7], x9 = x[8], x10 = x[9];
  const double prod = x6 * x7 * x8;
  return std::tanh(x1 * x2 + x3 * x4) * std::sqrt(std::abs(x5)) +
         std::exp(x5 + x6) + std::log(prod * prod + 1.0) + x9 * x10 +
         1.0 / (1.0 + std::abs(x10));
}

double F10(const double* x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double x7 = x[6], x9 = x[8];
  return std::sinh(x1 + x2) + std::acos(std::tanh(x3 + x5 + x7)) +
         std::cos(x4 + x5) + 1.0 / std::cos(x7 * x9);
}

using Formula = double (*)(const double*);
constexpr Formula kFormulas[] = {F1, F2, F3, F4, F5, F6, F7, F8, F9, F10};

int ParseSuiteName(const std::string& name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(c));
  if (lower.size() >= 2 && lower[0] == 'f') {
    const std::string digits = lower.substr(1);
    if (std::all_of(digits.begin(), digits.end(),
                    [](char c) { return std::isdigit(c); })) {
      const int index = std::stoi(digits);
      if (index >= 1 && index <= 10 && std::to_string(index) == digits) {
        return index;
      }
    }
  }
  throw InvalidArgumentError("unknown analytic function \"" + name +
                             "\" (expected F1..F10)");
}

}  // namespace

std::vector<double> HaltonPoint(int index, int dim) {
  static constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                    23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > 16) throw InvalidArgumentError("Halton dimension above 16");
  std::vector<double> out(dim);
  for (int d = 0; d < dim; ++d) {
    const int base = kPrimes[d];
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    out[d] = r;
  }
  return out;
}

std::vector<IndexSet> DetectPairInteractions(
    const std::function<double(std::span<const double>)>& f_unit, int p,
    const PairOracleOptions& options) {
  const double half = 0.5 * options.step;
  const double width = 1.0 - 2.0 * options.margin;
  std::vector<std::vector<double>> points;
  points.reserve(options.points);
  for (int i = 0; i < options.points; ++i) {
    // Skip index 0, which sits on the corner of the cube.
    auto u = HaltonPoint(i + 1, p);
    for (double& v : u) v = options.margin + width * v;
    points.push_back(std::move(u));
  }
  std::vector<IndexSet> pairs;
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      double sum_sq = 0.0;
      for (const auto& base : points) {
        std::vector<double> x = base;
        double cross = 0.0;
        for (int corner = 0; corner < 4; ++corner) {
          const int sa = (corner & 1) ? 1 : -1;
          const int sb = (corner & 2) ? 1 : -1;
          x[a] = base[a] + sa * half;
          x[b] = base[b] + sb * half;
          cross += sa * sb * f_unit(x);
        }
        cross /= options.step * options.step;
        sum_sq += cross * cross;
      }
      if (sum_sq / options.points > options.threshold) {
        pairs.push_back(IndexSet({a, b}));
      }
    }
  }
  return pairs;
}

std::unique_ptr<AnalyticPredictor> AnalyticPredictor::Make(
    const std::string& name) {
  return std::unique_ptr<AnalyticPredictor>(
      new AnalyticPredictor(ParseSuiteName(name)));
}

std::vector<std::string> AnalyticPredictor::SuiteNames() {
  std::vector<std::string> names;
  for (int i = 1; i <= 10; ++i) names.push_back("F" + std::to_string(i));
  return names;
}

AnalyticPredictor::AnalyticPredictor(int index)
    : Predictor(PredictorKind::kAnalytic, kDim, "F" + std::to_string(index)),
      index_(index),
      box_(kDim) {
  if (index == 1) {
    for (int j : {3, 4, 7, 9}) box_[j] = {0.6, 1.0};
  } else {
    for (auto& interval : box_) interval = {-1.0, 1.0};
  }
}

double AnalyticPredictor::EvaluateRaw(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != kDim) {
    throw InvalidArgumentError("analytic functions take 10 inputs");
  }
  return kFormulas[index_ - 1](x.data());
}

std::vector<double> AnalyticPredictor::ToBox(
    std::span<const double> unit) const {
  std::vector<double> x(kDim);
  for (int j = 0; j < kDim; ++j) {
    x[j] = box_[j].lo + unit[j] * (box_[j].hi - box_[j].lo);
  }
  return x;
}

std::vector<FeatureSpec> AnalyticPredictor::FeatureSpecs() const {
  std::vector<FeatureSpec> specs(kDim);
  for (int j = 0; j < kDim; ++j) {
    specs[j] = {"x" + std::to_string(j + 1), FeatureKind::kContinuous,
                box_[j].lo, box_[j].hi};
  }
  return specs;
}

const std::vector<IndexSet>& AnalyticPredictor::TruePairs() const {
  std::call_once(pairs_once_, [this] {
    true_pairs_ = DetectPairInteractions(
        [this](std::span<const double> unit) {
          return EvaluateRaw(ToBox(unit));
        },
        kDim);
  });
  return true_pairs_;
}

Eigen::VectorXd AnalyticPredictor::DoEvaluate(const RowMatrix& points) {
  const Formula formula = kFormulas[index_ - 1];
  Eigen::VectorXd out(points.rows());
  double x[kDim];
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (int j = 0; j < kDim; ++j) {
      x[j] = box_[j].lo + points(i, j) * (box_[j].hi - box_[j].lo);
    }
    out[i] = formula(x);
  }
  return out;
}

}  // namespace anovadistill
