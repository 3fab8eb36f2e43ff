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

#ifndef ANOVADISTILL_ANALYTIC_H_
#define ANOVADISTILL_ANALYTIC_H_

#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "anovadistill/dataset.h"
#include "anovadistill/index_set.h"
#include "anovadistill/predictor.h"

namespace anovadistill {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Options of the mixed-partial pair detector used to derive ground truth.
struct PairOracleOptions {
  int points = 512;
  // Full step of the cross stencil, in unit-cube coordinates.
  double step = 0.02;
  // A pair interacts when the mean squared cross difference exceeds this.
  double threshold = 1e-6;
  // Points are placed in [margin, 1 - margin]^p.
  double margin = 0.02;
};

// Quasi-random point `index` of the Halton sequence in [0,1)^dim (first
// `dim` prime bases). Supports dim <= 16.
std::vector<double> HaltonPoint(int index, int dim);

// Returns every pair {a,b} whose cross difference of `f_unit` (a function on
// [0,1]^p) has mean square above the threshold over Halton points.
std::vector<IndexSet> DetectPairInteractions(
    const std::function<double(std::span<const double>)>& f_unit, int p,
    const PairOracleOptions& options = {});

// The ten synthetic regression functions F1..F10 of the interaction-detection
// benchmark, on p = 10 inputs. Inputs are unit-cube points; each coordinate
// is mapped affinely onto the function's sampling box before evaluation.
class AnalyticPredictor : public Predictor {
 public:
  // `name` is "F1".."F10" (case-insensitive).
  static std::unique_ptr<AnalyticPredictor> Make(const std::string& name);
  static std::vector<std::string> SuiteNames();

  static constexpr int kDim = 10;

  int function_index() const { return index_; }
  const std::vector<Interval>& box() const { return box_; }

  // The formula evaluated at a point given in box coordinates.
  double EvaluateRaw(std::span<const double> x) const;
  // Unit cube -> sampling box.
  std::vector<double> ToBox(std::span<const double> unit) const;
  // x1..x10, continuous, with raw ranges equal to the sampling box.
  std::vector<FeatureSpec> FeatureSpecs() const;

  // Ground-truth interacting pairs, computed once with
  // DetectPairInteractions.
  const std::vector<IndexSet>& TruePairs() const;

 protected:
  Eigen::VectorXd DoEvaluate(const RowMatrix& points) override;

 private:
  explicit AnalyticPredictor(int index);

  int index_;
  std::vector<Interval> box_;
  mutable std::once_flag pairs_once_;
  mutable std::vector<IndexSet> true_pairs_;
};

}  // namespace anovadistill

#endif  // ANOVADISTILL_ANALYTIC_H_
