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

#include "anovadistill/grid_component.h"

#include <algorithm>
#include <cmath>

#include "anovadistill/error.h"

namespace anovadistill {
namespace {

std::vector<int> ShapeOf(const std::vector<std::vector<double>>& knots) {
  std::vector<int> shape;
  for (const auto& k : knots) shape.push_back(static_cast<int>(k.size()));
  return shape;
}

// Product of shape[from..to).
int Extent(const std::vector<int>& shape, int from, int to) {
  int n = 1;
  for (int a = from; a < to; ++a) n *= shape[a];
  return n;
}

}  // namespace

AxisLocation LocateOnKnots(const std::vector<double>& knots, double v) {
  const int m = static_cast<int>(knots.size());
  if (v <= knots.front()) return {0, 0.0};
  if (v >= knots.back()) return {m - 2, 1.0};
  const int hi = static_cast<int>(
      std::upper_bound(knots.begin(), knots.end(), v) - knots.begin());
  const int lo = hi - 1;
  return {lo, (v - knots[lo]) / (knots[hi] - knots[lo])};
}

std::vector<double> UniformKnots(int m) {
  if (m < 2) throw InvalidArgumentError("a grid axis needs at least 2 knots");
  std::vector<double> k(m);
  for (int i = 0; i < m; ++i) k[i] = static_cast<double>(i) / (m - 1);
  k.back() = 1.0;
  return k;
}

std::vector<double> MergeKnots(const std::vector<double>& a,
                               const std::vector<double>& b) {
  std::vector<double> out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GridComponent::GridComponent(IndexSet j, std::vector<std::vector<double>> knots,
                             Eigen::VectorXd coefs)
    : ComponentFunction(std::move(j)),
      knots_(std::move(knots)),
      shape_(ShapeOf(knots_)),
      coefs_(std::move(coefs)) {
  if (static_cast<int>(knots_.size()) != order()) {
    throw InvalidArgumentError("one knot vector per component axis required");
  }
  for (const auto& k : knots_) {
    if (k.size() < 2) {
      throw InvalidArgumentError("a grid axis needs at least 2 knots");
    }
    for (std::size_t i = 1; i < k.size(); ++i) {
      if (!(k[i] > k[i - 1])) {
        throw InvalidArgumentError("knots must be strictly increasing");
      }
    }
  }
  if (coefs_.size() != Extent(shape_, 0, order())) {
    throw InvalidArgumentError("coefficient count does not match the grid");
  }
}

GridComponent GridComponent::Tabulate(
    IndexSet j, std::vector<std::vector<double>> knots,
    const std::function<double(std::span<const double>)>& g) {
  const auto shape = ShapeOf(knots);
  const int k = static_cast<int>(shape.size());
  const int total = Extent(shape, 0, k);
  Eigen::VectorXd coefs(total);
  std::vector<double> local(k);
  for (int flat = 0; flat < total; ++flat) {
    int rest = flat;
    for (int a = k - 1; a >= 0; --a) {
      local[a] = knots[a][rest % shape[a]];
      rest /= shape[a];
    }
    coefs[flat] = g(local);
  }
  return GridComponent(std::move(j), std::move(knots), std::move(coefs));
}

int GridComponent::LocalBasisAt(const double* local, int* idx,
                                double* w) const {
  const int k = order();
  AxisLocation loc[8];
  for (int a = 0; a < k; ++a) loc[a] = LocateOnKnots(knots_[a], local[a]);
  const int corners = 1 << k;
  for (int c = 0; c < corners; ++c) {
    int flat = 0;
    double weight = 1.0;
    for (int a = 0; a < k; ++a) {
      const bool up = (c >> a) & 1;
      flat = flat * shape_[a] + loc[a].lo + (up ? 1 : 0);
      weight *= up ? loc[a].w_hi : 1.0 - loc[a].w_hi;
    }
    idx[c] = flat;
    w[c] = weight;
  }
  return corners;
}

int GridComponent::BasisAt(std::span<const double> x, int* idx,
                           double* w) const {
  double local[8];
  for (int a = 0; a < order(); ++a) local[a] = x[set()[a]];
  return LocalBasisAt(local, idx, w);
}

double GridComponent::Evaluate(std::span<const double> x) const {
  int idx[16];
  double w[16];
  const int n = BasisAt(x, idx, w);
  double sum = 0.0;
  for (int c = 0; c < n; ++c) sum += w[c] * coefs_[idx[c]];
  return sum;
}

GridComponent GridComponent::RefinedTo(
    const std::vector<std::vector<double>>& knots) const {
  for (int a = 0; a < order(); ++a) {
    for (double t : knots_[a]) {
      if (!std::binary_search(knots[a].begin(), knots[a].end(), t)) {
        throw InvalidArgumentError("refined knots must contain the originals");
      }
    }
  }
  return Tabulate(set(), knots, [this](std::span<const double> local) {
    int idx[16];
    double w[16];
    const int n = LocalBasisAt(local.data(), idx, w);
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += w[c] * coefs_[idx[c]];
    return sum;
  });
}

nlohmann::json GridComponent::ToJson() const {
  return {{"j", set().indices()},
          {"backend", "grid"},
          {"knots", knots_},
          {"coefs", std::vector<double>(coefs_.data(),
                                        coefs_.data() + coefs_.size())}};
}

GridComponent GridComponent::FromJson(const nlohmann::json& doc) {
  const auto c = doc.at("coefs").get<std::vector<double>>();
  return GridComponent(IndexSet(doc.at("j").get<std::vector<int>>()),
                       doc.at("knots").get<std::vector<std::vector<double>>>(),
                       Eigen::Map<const Eigen::VectorXd>(
                           c.data(), static_cast<Eigen::Index>(c.size())));
}

Eigen::VectorXd ContractAxis(const Eigen::VectorXd& t,
                             const std::vector<int>& shape, int axis,
                             const Eigen::VectorXd& w) {
  const int k = static_cast<int>(shape.size());
  const int outer = Extent(shape, 0, axis);
  const int m = shape[axis];
  const int inner = Extent(shape, axis + 1, k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(outer * inner);
  for (int o = 0; o < outer; ++o) {
    for (int a = 0; a < m; ++a) {
      const double wa = w[a];
      const double* src = t.data() + (o * m + a) * inner;
      double* dst = out.data() + o * inner;
      for (int i = 0; i < inner; ++i) dst[i] += wa * src[i];
    }
  }
  return out;
}

Eigen::VectorXd CenterAxis(const Eigen::VectorXd& t,
                           const std::vector<int>& shape, int axis,
                           const Eigen::VectorXd& w) {
  const int k = static_cast<int>(shape.size());
  const int outer = Extent(shape, 0, axis);
  const int m = shape[axis];
  const int inner = Extent(shape, axis + 1, k);
  const Eigen::VectorXd mean = ContractAxis(t, shape, axis, w);
  Eigen::VectorXd out = t;
  for (int o = 0; o < outer; ++o) {
    for (int a = 0; a < m; ++a) {
      double* dst = out.data() + (o * m + a) * inner;
      const double* mu = mean.data() + o * inner;
      for (int i = 0; i < inner; ++i) dst[i] -= mu[i];
    }
  }
  return out;
}

}  // namespace anovadistill
