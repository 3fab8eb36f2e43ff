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

#ifndef ANOVADISTILL_MLP_COMPONENT_H_
#define ANOVADISTILL_MLP_COMPONENT_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "anovadistill/component.h"
#include "anovadistill/dataset.h"

namespace anovadistill {

// Fully connected ReLU network with a scalar linear output. Parameters live
// in one flat vector: for each layer, the weight matrix (out x in, row-major)
// followed by the bias.
class MlpNetwork {
 public:
  struct Cache {
    // Post-activation outputs per layer; acts[0] is the input.
    std::vector<RowMatrix> acts;
  };

  MlpNetwork(int inputs, std::vector<int> hidden, uint64_t seed);
  MlpNetwork(int inputs, std::vector<int> hidden, Eigen::VectorXd params);

  int inputs() const { return inputs_; }
  const std::vector<int>& hidden() const { return hidden_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& mutable_params() { return params_; }
  // Mask of parameters that are weights (1) rather than biases (0).
  Eigen::VectorXd WeightMask() const;

  double Forward(const double* input) const;
  // Rows of `in` are inputs. Fills `cache` when non-null.
  Eigen::VectorXd ForwardBatch(const RowMatrix& in, Cache* cache) const;
  // Adds d(sum_i dout_i * out_i)/d(params) to `grad`.
  void BackwardBatch(const Cache& cache, const Eigen::VectorXd& dout,
                     Eigen::VectorXd& grad) const;

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    int offset = 0;
  };
  void Layout();

  int inputs_;
  std::vector<int> hidden_;
  std::vector<Layer> layers_;
  Eigen::VectorXd params_;
};

class MlpComponent : public ComponentFunction {
 public:
  MlpComponent(IndexSet j, MlpNetwork net);

  const MlpNetwork& network() const { return net_; }
  MlpNetwork& mutable_network() { return net_; }

  double Evaluate(std::span<const double> x) const override;
  std::string backend() const override { return "feedforward"; }
  nlohmann::json ToJson() const override;
  static MlpComponent FromJson(const nlohmann::json& doc);

 private:
  MlpNetwork net_;
};

}  // namespace anovadistill

#endif  // ANOVADISTILL_MLP_COMPONENT_H_
