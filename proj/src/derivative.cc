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

#include "anovadistill/derivative.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "anovadistill/error.h"

namespace anovadistill {
namespace {

void CheckPoint(std::span<const double> x, int p) {
  if (static_cast<int>(x.size()) != p) {
    throw InvalidArgumentError("dimension mismatch: point has " +
                               std::to_string(x.size()) +
                               " coordinates, expected " + std::to_string(p));
  }
}

}  // namespace

const char* BandwidthModeName(BandwidthMode mode) {
  return mode == BandwidthMode::kSchedule ? "schedule" : "constant";
}

BandwidthMode ParseBandwidthMode(const std::string& name) {
  if (name == "constant") return BandwidthMode::kConstant;
  if (name == "schedule") return BandwidthMode::kSchedule;
  throw InvalidArgumentError("unknown bandwidth mode \"" + name + "\"");
}

double BandwidthSchedule::ForOrder(int k) const {
  if (k < 1) throw InvalidArgumentError("bandwidth order must be >= 1");
  if (mode == BandwidthMode::kConstant) return h1;
  return std::pow(h1, 1.0 / std::ldexp(1.0, k - 1));
}

void BandwidthSchedule::Validate() const {
  if (!(h1 > 0.0) || h1 > 1.0) {
    throw InvalidArgumentError("bandwidth h must lie in (0, 1]");
  }
}

StencilPlan::StencilPlan(const IndexSet& j, std::span<const FeatureKind> kinds,
                         std::vector<double> h)
    : j_(j), h_(std::move(h)) {
  if (static_cast<int>(h_.size()) != j_.order()) {
    throw InvalidArgumentError("one bandwidth per stencil coordinate required");
  }
  Init(kinds);
}

StencilPlan::StencilPlan(const IndexSet& j, std::span<const FeatureKind> kinds,
                         const BandwidthSchedule& schedule)
    : j_(j) {
  schedule.Validate();
  if (j.order() >= 1) {
    h_.assign(j.order(), schedule.ForOrder(j.order()));
  }
  Init(kinds);
}

void StencilPlan::Init(std::span<const FeatureKind> kinds) {
  const int k = j_.order();
  if (k < 1) throw InvalidArgumentError("difference over an empty index set");
  if (k > kMaxOrder) {
    throw InvalidArgumentError("interaction order " + std::to_string(k) +
                               " exceeds the maximum of " +
                               std::to_string(kMaxOrder));
  }
  p_ = static_cast<int>(kinds.size());
  if (j_.indices().back() >= p_) {
    throw InvalidArgumentError("index set " + j_.ToString() +
                               " out of range for p=" + std::to_string(p_));
  }
  binary_.resize(k);
  divisor_ = 1.0;
  for (int l = 0; l < k; ++l) {
    binary_[l] = kinds[j_[l]] == FeatureKind::kBinary;
    if (binary_[l]) continue;
    if (!(h_[l] > 0.0) || h_[l] > 1.0) {
      throw InvalidArgumentError("bandwidth must lie in (0, 1]");
    }
    divisor_ *= h_[l];
  }
  signs_.resize(size());
  for (int mask = 0; mask < size(); ++mask) {
    const int minus = k - std::popcount(static_cast<unsigned>(mask));
    signs_[mask] = (minus % 2 == 0) ? 1 : -1;
  }
}

void StencilPlan::Fill(std::span<const double> x, RowMatrix& out,
                       Eigen::Index first) const {
  CheckPoint(x, p_);
  const int k = j_.order();
  double lo[kMaxOrder], hi[kMaxOrder];
  for (int l = 0; l < k; ++l) {
    if (binary_[l]) {
      lo[l] = 0.0;
      hi[l] = 1.0;
    } else {
      const double half = 0.5 * h_[l];
      const double c = std::clamp(x[j_[l]], half, 1.0 - half);
      lo[l] = c - half;
      hi[l] = c + half;
    }
  }
  for (int mask = 0; mask < size(); ++mask) {
    auto row = out.row(first + mask);
    for (int d = 0; d < p_; ++d) row[d] = x[d];
    for (int l = 0; l < k; ++l) row[j_[l]] = (mask >> l) & 1 ? hi[l] : lo[l];
  }
}

// Pairwise along the last coordinate first, one division per level, which is
// the operation order of the nested one-dimensional differences.
double StencilPlan::Combine(const double* values) const {
  double buf[1 << kMaxOrder];
  std::copy(values, values + size(), buf);
  for (int l = j_.order() - 1; l >= 0; --l) {
    const int half = 1 << l;
    for (int m = 0; m < half; ++m) {
      buf[m] = buf[m + half] - buf[m];
      if (!binary_[l]) buf[m] /= h_[l];
    }
  }
  return buf[0];
}

Stencil StencilPlan::Build(std::span<const double> x) const {
  Stencil s;
  s.points.resize(size(), p_);
  Fill(x, s.points, 0);
  s.center = Eigen::Map<const Eigen::VectorXd>(x.data(), p_);
  for (int l = 0; l < j_.order(); ++l) {
    s.center[j_[l]] = binary_[l] ? 0.5
                                 : 0.5 * (s.points(0, j_[l]) +
                                          s.points(size() - 1, j_[l]));
  }
  s.signs = signs_;
  s.divisor = divisor_;
  return s;
}

namespace {

double Apply(Predictor& pred, std::span<const double> x,
             const StencilPlan& plan) {
  RowMatrix points(plan.size(), pred.dim());
  plan.Fill(x, points, 0);
  const Eigen::VectorXd y = pred.EvaluateBatch(points);
  return plan.Combine(y.data());
}

std::vector<FeatureKind> AllContinuous(int p) {
  return std::vector<FeatureKind>(p, FeatureKind::kContinuous);
}

}  // namespace

double CentralDifference(Predictor& pred, std::span<const double> x, int j,
                         double h) {
  const auto kinds = AllContinuous(pred.dim());
  return Apply(pred, x, StencilPlan(IndexSet::Single(j), kinds, {h}));
}

double MixedDifference(Predictor& pred, std::span<const double> x,
                       const IndexSet& j, std::span<const double> h) {
  const auto kinds = AllContinuous(pred.dim());
  return Apply(pred, x,
               StencilPlan(j, kinds, std::vector<double>(h.begin(), h.end())));
}

double MixedDifference(Predictor& pred, std::span<const double> x,
                       const IndexSet& j, const BandwidthSchedule& schedule) {
  const auto kinds = AllContinuous(pred.dim());
  return Apply(pred, x, StencilPlan(j, kinds, schedule));
}

double BinaryPartialDifference(Predictor& pred, std::span<const double> x,
                               const IndexSet& j,
                               std::span<const FeatureKind> kinds) {
  for (int l : j) {
    if (l >= static_cast<int>(kinds.size()) ||
        kinds[l] != FeatureKind::kBinary) {
      throw InvalidArgumentError("feature " + std::to_string(l) +
                                 " is not binary");
    }
  }
  return Apply(pred, x, StencilPlan(j, kinds, std::vector<double>(j.order(), 1.0)));
}

double PartialDifference(Predictor& pred, std::span<const double> x,
                         const IndexSet& j, std::span<const FeatureKind> kinds,
                         const BandwidthSchedule& schedule) {
  return Apply(pred, x, StencilPlan(j, kinds, schedule));
}

}  // namespace anovadistill
