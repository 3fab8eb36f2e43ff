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

#include "anovadistill/mlp_component.h"

#include <cmath>

#include "anovadistill/error.h"
#include "anovadistill/rng.h"

namespace anovadistill {
namespace {

using WeightMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;
using MutableWeightMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;

}  // namespace

MlpNetwork::MlpNetwork(int inputs, std::vector<int> hidden, uint64_t seed)
    : inputs_(inputs), hidden_(std::move(hidden)) {
  Layout();
  // He-normal weights, zero biases.
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const Layer& l : layers_) {
    const double scale = std::sqrt(2.0 / l.in);
    for (int i = 0; i < l.in * l.out; ++i) {
      params_[l.offset + i] = scale * normal(rng);
    }
  }
}

MlpNetwork::MlpNetwork(int inputs, std::vector<int> hidden,
                       Eigen::VectorXd params)
    : inputs_(inputs), hidden_(std::move(hidden)) {
  Layout();
  if (params.size() != params_.size()) {
    throw InvalidArgumentError("network parameter count mismatch");
  }
  params_ = std::move(params);
}

void MlpNetwork::Layout() {
  if (inputs_ < 1) throw InvalidArgumentError("network needs an input");
  int in = inputs_, offset = 0;
  std::vector<int> widths = hidden_;
  widths.push_back(1);
  for (int w : widths) {
    if (w < 1) throw InvalidArgumentError("hidden widths must be positive");
    layers_.push_back({in, w, offset});
    offset += in * w + w;
    in = w;
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

Eigen::VectorXd MlpNetwork::WeightMask() const {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(params_.size());
  for (const Layer& l : layers_) mask.segment(l.offset, l.in * l.out).setOnes();
  return mask;
}

double MlpNetwork::Forward(const double* input) const {
  RowMatrix in = Eigen::Map<const RowMatrix>(input, 1, inputs_);
  return ForwardBatch(in, nullptr)[0];
}

Eigen::VectorXd MlpNetwork::ForwardBatch(const RowMatrix& in,
                                         Cache* cache) const {
  RowMatrix a = in;
  if (cache != nullptr) {
    cache->acts.clear();
    cache->acts.push_back(a);
  }
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const Layer& l = layers_[li];
    WeightMap W(params_.data() + l.offset, l.out, l.in);
    Eigen::Map<const Eigen::RowVectorXd> b(
        params_.data() + l.offset + l.in * l.out, l.out);
    RowMatrix z = a * W.transpose();
    z.rowwise() += b;
    if (li + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
    if (cache != nullptr) cache->acts.push_back(a);
  }
  return a.col(0);
}

void MlpNetwork::BackwardBatch(const Cache& cache, const Eigen::VectorXd& dout,
                               Eigen::VectorXd& grad) const {
  RowMatrix delta = dout;
  for (int li = static_cast<int>(layers_.size()) - 1; li >= 0; --li) {
    const Layer& l = layers_[li];
    const RowMatrix& input = cache.acts[li];
    MutableWeightMap gW(grad.data() + l.offset, l.out, l.in);
    Eigen::Map<Eigen::RowVectorXd> gb(grad.data() + l.offset + l.in * l.out,
                                      l.out);
    gW.noalias() += delta.transpose() * input;
    gb += delta.colwise().sum();
    if (li == 0) break;
    WeightMap W(params_.data() + l.offset, l.out, l.in);
    RowMatrix back = delta * W;
    // ReLU derivative from the stored activation of the previous layer.
    delta = back.cwiseProduct(
        (input.array() > 0.0).cast<double>().matrix());
  }
}

MlpComponent::MlpComponent(IndexSet j, MlpNetwork net)
    : ComponentFunction(std::move(j)), net_(std::move(net)) {
  if (net_.inputs() != order()) {
    throw InvalidArgumentError("network inputs must match the component order");
  }
}

double MlpComponent::Evaluate(std::span<const double> x) const {
  double local[8];
  for (int a = 0; a < order(); ++a) local[a] = x[set()[a]];
  return net_.Forward(local);
}

nlohmann::json MlpComponent::ToJson() const {
  const auto& p = net_.params();
  return {{"j", set().indices()},
          {"backend", "feedforward"},
          {"hidden", net_.hidden()},
          {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

MlpComponent MlpComponent::FromJson(const nlohmann::json& doc) {
  IndexSet j(doc.at("j").get<std::vector<int>>());
  const auto p = doc.at("params").get<std::vector<double>>();
  MlpNetwork net(j.order(), doc.at("hidden").get<std::vector<int>>(),
                 Eigen::Map<const Eigen::VectorXd>(
                     p.data(), static_cast<Eigen::Index>(p.size())));
  return MlpComponent(std::move(j), std::move(net));
}

}  // namespace anovadistill
