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

#ifndef ANOVADISTILL_DERIVATIVE_H_
#define ANOVADISTILL_DERIVATIVE_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anovadistill/dataset.h"
#include "anovadistill/index_set.h"
#include "anovadistill/predictor.h"

namespace anovadistill {

// Highest supported interaction order.
inline constexpr int kMaxOrder = 4;

enum class BandwidthMode { kConstant, kSchedule };

const char* BandwidthModeName(BandwidthMode mode);
BandwidthMode ParseBandwidthMode(const std::string& name);

// Per-order bandwidths. Constant mode uses h1 for every order; schedule mode
// uses h_k = h1^(1/2^(k-1)).
struct BandwidthSchedule {
  BandwidthMode mode = BandwidthMode::kConstant;
  double h1 = 0.1;

  double ForOrder(int k) const;
  void Validate() const;
};

// A tensor-product difference stencil around one point. Row `mask` of
// `points` takes the plus side on coordinate position l when bit l of mask
// is set. Continuous coordinates step by +-h/2 around a center shifted so the
// whole stencil lies in [0,1]; binary coordinates take the values 1 and 0.
struct Stencil {
  Eigen::VectorXd center;
  RowMatrix points;
  std::vector<int> signs;
  double divisor = 1.0;
};

// Precomputed layout of the stencil for one index set.
class StencilPlan {
 public:
  // One bandwidth per element of j (ignored for binary coordinates).
  StencilPlan(const IndexSet& j, std::span<const FeatureKind> kinds,
              std::vector<double> h);
  StencilPlan(const IndexSet& j, std::span<const FeatureKind> kinds,
              const BandwidthSchedule& schedule);

  const IndexSet& set() const { return j_; }
  int size() const { return 1 << j_.order(); }
  double divisor() const { return divisor_; }
  int sign(int mask) const { return signs_[mask]; }

  // Writes size() rows starting at row `first` of `out`.
  void Fill(std::span<const double> x, RowMatrix& out, Eigen::Index first) const;
  // Signed sum of size() consecutive outputs divided by the divisor, reduced
  // one coordinate at a time.
  double Combine(const double* values) const;
  Stencil Build(std::span<const double> x) const;

 private:
  void Init(std::span<const FeatureKind> kinds);

  IndexSet j_;
  int p_ = 0;
  std::vector<double> h_;
  std::vector<bool> binary_;
  std::vector<int> signs_;
  double divisor_ = 1.0;
};

// (f(x + h/2 e_j) - f(x - h/2 e_j)) / h with the boundary-shifted center.
double CentralDifference(Predictor& pred, std::span<const double> x, int j,
                         double h);

// Continuous mixed difference over j, one bandwidth per element of j, as a
// single batch of 2^|j| evaluations.
double MixedDifference(Predictor& pred, std::span<const double> x,
                       const IndexSet& j, std::span<const double> h);
double MixedDifference(Predictor& pred, std::span<const double> x,
                       const IndexSet& j, const BandwidthSchedule& schedule);

// Inclusion-exclusion difference: sum over subsets j' of j of
// (-1)^|j \ j'| f(x : x_j' = 1, x_{j\j'} = 0). Every coordinate of j must be
// binary.
double BinaryPartialDifference(Predictor& pred, std::span<const double> x,
                               const IndexSet& j,
                               std::span<const FeatureKind> kinds);

// General operator: central steps on continuous coordinates, binary
// differences on binary ones.
double PartialDifference(Predictor& pred, std::span<const double> x,
                         const IndexSet& j, std::span<const FeatureKind> kinds,
                         const BandwidthSchedule& schedule);

}  // namespace anovadistill

#endif  // ANOVADISTILL_DERIVATIVE_H_
