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

#ifndef ANOVADISTILL_GRID_COMPONENT_H_
#define ANOVADISTILL_GRID_COMPONENT_H_

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "anovadistill/component.h"

namespace anovadistill {

// Hat-function location of a value on a knot vector: the value lies in
// [knots[lo], knots[lo+1]] with interpolation weight `w_hi` on lo+1.
struct AxisLocation {
  int lo = 0;
  double w_hi = 0.0;
};

AxisLocation LocateOnKnots(const std::vector<double>& knots, double v);

// m equally spaced knots on [0,1].
std::vector<double> UniformKnots(int m);

// Sorted union of two knot vectors (exact duplicates merged).
std::vector<double> MergeKnots(const std::vector<double>& a,
                               const std::vector<double>& b);

// Tensor product of piecewise-linear hat bases. Coefficients are the values
// at the grid nodes, stored row-major with the last axis fastest.
class GridComponent : public ComponentFunction {
 public:
  GridComponent(IndexSet j, std::vector<std::vector<double>> knots,
                Eigen::VectorXd coefs);

  // Samples g (a function of the component's own coordinates, in set order)
  // at every grid node.
  static GridComponent Tabulate(
      IndexSet j, std::vector<std::vector<double>> knots,
      const std::function<double(std::span<const double>)>& g);

  const std::vector<std::vector<double>>& knots() const { return knots_; }
  const Eigen::VectorXd& coefs() const { return coefs_; }
  const std::vector<int>& shape() const { return shape_; }
  int num_coefs() const { return static_cast<int>(coefs_.size()); }

  double Evaluate(std::span<const double> x) const override;
  std::string backend() const override { return "grid"; }
  nlohmann::json ToJson() const override;
  static GridComponent FromJson(const nlohmann::json& doc);

  // Up to 2^k nonzero basis functions at x (a full p-vector); returns the
  // count written to idx/w, which must hold 2^order() entries.
  int BasisAt(std::span<const double> x, int* idx, double* w) const;
  // Same with the component's own coordinates, in set order.
  int LocalBasisAt(const double* local, int* idx, double* w) const;

  // Exact re-expression on finer knot vectors (each a superset of the
  // current knots).
  GridComponent RefinedTo(const std::vector<std::vector<double>>& knots) const;

 private:
  std::vector<std::vector<double>> knots_;
  std::vector<int> shape_;
  Eigen::VectorXd coefs_;
};

// Row-major tensor helpers used by the identifiability transform.
// Returns sum_a w[a] * t[..., a, ...] along `axis`.
Eigen::VectorXd ContractAxis(const Eigen::VectorXd& t,
                             const std::vector<int>& shape, int axis,
                             const Eigen::VectorXd& w);
// Returns t - 1 (x) ContractAxis(t, axis, w).
Eigen::VectorXd CenterAxis(const Eigen::VectorXd& t,
                           const std::vector<int>& shape, int axis,
                           const Eigen::VectorXd& w);

}  // namespace anovadistill

#endif  // ANOVADISTILL_GRID_COMPONENT_H_
