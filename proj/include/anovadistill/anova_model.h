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

#ifndef ANOVADISTILL_ANOVA_MODEL_H_
#define ANOVADISTILL_ANOVA_MODEL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "anovadistill/component.h"
#include "anovadistill/dataset.h"
#include "anovadistill/grid_component.h"
#include "anovadistill/index_set.h"
#include "anovadistill/predictor.h"

namespace anovadistill {

enum class Backend { kGrid, kFeedforward };

const char* BackendName(Backend backend);
Backend ParseBackend(const std::string& name);

struct FitOptions {
  Backend backend = Backend::kGrid;

  // Grid basis: knots per axis for order 1, order 2, orders 3-4.
  int knots_main = 16;
  int knots_pair = 8;
  int knots_high = 5;
  double ridge = 1e-6;
  double tolerance = 1e-8;
  int max_refinements = 8;

  // Feedforward backend.
  std::vector<int> hidden = {64, 32};
  double learning_rate = 1e-3;
  int batch_size = 1024;
  double weight_decay = 7.483e-9;
  int epochs = 200;
  uint64_t seed = 0;
  // Node counts used to tabulate networks before the identifiability
  // transform (order 1, order 2, orders 3-4).
  std::vector<int> tabulation_knots = {65, 33, 9};

  // Apply the identifiability transform after fitting.
  bool identify = true;

  int KnotsForOrder(int order) const;
  void Validate() const;
};

nlohmann::json FitOptionsToJson(const FitOptions& options);
void FitOptionsFromJson(const nlohmann::json& doc, FitOptions* options);

struct FitDiagnostics {
  std::string solver;
  int parameters = 0;
  int iterations = 0;
  double train_mse = 0.0;
  double target_variance = 0.0;
  double grad_norm = 0.0;
  // Largest change of the surrogate at a training row caused by tabulation
  // and the identifiability transform.
  double transform_change = 0.0;
};

// f_R(x) = beta0 + sum_j f_j(x_j) on the scaled domain.
class AnovaModel {
 public:
  using ComponentPtr = std::shared_ptr<const ComponentFunction>;

  AnovaModel() = default;
  AnovaModel(std::vector<FeatureSpec> specs, double beta0);

  int p() const { return static_cast<int>(specs_.size()); }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  double beta0() const { return beta0_; }
  void set_beta0(double beta0) { beta0_ = beta0; }
  const std::map<IndexSet, ComponentPtr>& components() const {
    return components_;
  }
  const ComponentFunction* Find(const IndexSet& j) const;
  void SetComponent(ComponentPtr component);

  bool identifiable() const { return identifiable_; }
  void set_identifiable(bool v) { identifiable_ = v; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }
  FitDiagnostics& mutable_diagnostics() { return diagnostics_; }
  // Component count per order (index = order).
  std::vector<int> CountByOrder() const;

  double Predict(std::span<const double> x) const;
  Eigen::VectorXd PredictBatch(const RowMatrix& points) const;
  std::map<IndexSet, double> PredictComponents(std::span<const double> x) const;

 private:
  void CheckPoint(std::span<const double> x) const;

  std::vector<FeatureSpec> specs_;
  double beta0_ = 0.0;
  std::map<IndexSet, ComponentPtr> components_;
  bool identifiable_ = false;
  FitDiagnostics diagnostics_;
};

// Fits f_R to the black-box outputs at the data rows. R may be empty (the
// constant model). Applies the identifiability transform when
// options.identify is set.
AnovaModel Fit(Predictor& pred, const Dataset& data,
               const std::vector<IndexSet>& R, const FitOptions& options);

// Same, with targets supplied directly.
AnovaModel FitToTargets(const Dataset& data, const Eigen::VectorXd& targets,
                        const std::vector<IndexSet>& R,
                        const FitOptions& options);

// Rewrites the model so that every component has zero empirical mean over
// each of its own variables (means over the data rows), moving the removed
// parts into lower-order components and beta0. Feedforward components are
// first tabulated onto grids.
AnovaModel IdentifiableTransform(const AnovaModel& model, const Dataset& data,
                                 const FitOptions& options = {});

// Empirical mean of each hat basis function of `knots` at column `feature`.
Eigen::VectorXd MarginalWeights(const Dataset& data, int feature,
                                const std::vector<double>& knots);

// Population variance of each component over the data rows.
std::map<IndexSet, double> ComponentImportance(const AnovaModel& model,
                                               const Dataset& data);

// phi_l(x) = sum of components containing l; zero for absent features.
Eigen::VectorXd AnovaShapLocal(const AnovaModel& model,
                               std::span<const double> x);
// Population variance of phi_l over the data rows.
Eigen::VectorXd AnovaShapGlobal(const AnovaModel& model, const Dataset& data);

// Divides by the largest entry (all zeros stay zero).
Eigen::VectorXd MaxNormalize(const Eigen::VectorXd& v);
std::map<IndexSet, double> MaxNormalize(const std::map<IndexSet, double>& v);

struct PartialDependenceTable {
  IndexSet j;
  // Raw-unit coordinates, one column per element of j.
  RowMatrix raw_grid;
  RowMatrix scaled_grid;
  Eigen::VectorXd values;
};

// Evaluates component j on a uniform grid of `resolution` points per
// continuous axis ({0,1} for binary axes).
PartialDependenceTable PartialDependence(const AnovaModel& model,
                                         const IndexSet& j, int resolution);

double RSquared(const Eigen::VectorXd& target, const Eigen::VectorXd& fitted);

}  // namespace anovadistill

#endif  // ANOVADISTILL_ANOVA_MODEL_H_
