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

#include "anovadistill/predictor.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "anovadistill/error.h"

namespace anovadistill {
namespace {

std::string RowKey(const RowMatrix& points, Eigen::Index row) {
  std::string key(static_cast<std::size_t>(points.cols()) * sizeof(double),
                  '\0');
  std::memcpy(key.data(), points.data() + row * points.cols(), key.size());
  return key;
}

}  // namespace

bool EvalCache::Lookup(const std::string& key, double* value) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = values_.find(key);
  if (it == values_.end()) {
    ++stats_.misses;
    return false;
  }
  ++stats_.hits;
  *value = it->second;
  return true;
}

void EvalCache::Insert(const std::string& key, double value) {
  std::lock_guard<std::mutex> lock(mutex_);
  values_.emplace(key, value);
}

EvalCache::Stats EvalCache::stats() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return stats_;
}

void EvalCache::Clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  values_.clear();
  stats_ = {};
}

Predictor::Predictor(PredictorKind kind, int dim, std::string name)
    : kind_(kind), dim_(dim), name_(std::move(name)) {
  if (dim < 1) throw InvalidArgumentError("predictor dimension must be >= 1");
}

Eigen::VectorXd Predictor::EvaluateBatch(const RowMatrix& points) {
  if (points.rows() == 0) return Eigen::VectorXd();
  if (points.cols() != dim_) {
    throw InvalidArgumentError(
        "dimension mismatch: batch has " + std::to_string(points.cols()) +
        " columns, predictor " + name_ + " expects " + std::to_string(dim_));
  }
  if (!points.allFinite()) {
    throw InvalidArgumentError("non-finite input passed to predictor " +
                               name_);
  }
  if (!cache_enabled_) return EvaluateUncached(points);

  Eigen::VectorXd out(points.rows());
  std::vector<Eigen::Index> miss_rows;
  std::vector<std::string> miss_keys;
  std::unordered_map<std::string, std::size_t> pending;
  std::vector<std::pair<Eigen::Index, std::size_t>> duplicates;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::string key = RowKey(points, i);
    if (cache_.Lookup(key, &out[i])) continue;
    const auto it = pending.find(key);
    if (it != pending.end()) {
      duplicates.emplace_back(i, it->second);
      continue;
    }
    pending.emplace(key, miss_rows.size());
    miss_rows.push_back(i);
    miss_keys.push_back(std::move(key));
  }
  if (!miss_rows.empty()) {
    RowMatrix misses(static_cast<Eigen::Index>(miss_rows.size()), dim_);
    for (std::size_t m = 0; m < miss_rows.size(); ++m) {
      misses.row(static_cast<Eigen::Index>(m)) = points.row(miss_rows[m]);
    }
    const Eigen::VectorXd values = EvaluateUncached(misses);
    for (std::size_t m = 0; m < miss_rows.size(); ++m) {
      out[miss_rows[m]] = values[static_cast<Eigen::Index>(m)];
      cache_.Insert(miss_keys[m], values[static_cast<Eigen::Index>(m)]);
    }
  }
  for (const auto& [row, miss] : duplicates) out[row] = out[miss_rows[miss]];
  return out;
}

Eigen::VectorXd Predictor::EvaluateUncached(const RowMatrix& points) {
  Eigen::VectorXd values = DoEvaluate(points);
  if (values.size() != points.rows()) {
    throw PredictorError("predictor " + name_ + " returned " +
                         std::to_string(values.size()) + " outputs for " +
                         std::to_string(points.rows()) + " rows");
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::string row;
      for (Eigen::Index j = 0; j < points.cols(); ++j) {
        row += (j ? "," : "") + std::to_string(points(i, j));
      }
      throw PredictorError("predictor " + name_ +
                           " produced a non-finite output at batch row " +
                           std::to_string(i) + " [" + row + "]");
    }
  }
  eval_count_.fetch_add(static_cast<uint64_t>(points.rows()));
  return values;
}

CallbackPredictor::CallbackPredictor(int dim, BatchFunction fn,
                                     std::string name)
    : Predictor(PredictorKind::kInMemory, dim, std::move(name)),
      fn_(std::move(fn)) {}

Eigen::VectorXd CallbackPredictor::DoEvaluate(const RowMatrix& points) {
  return fn_(points);
}

std::unique_ptr<Predictor> MakeRowPredictor(
    int dim, std::function<double(const double*)> fn, std::string name) {
  return std::make_unique<CallbackPredictor>(
      dim,
      [fn = std::move(fn)](const RowMatrix& points) {
        Eigen::VectorXd out(points.rows());
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
          out[i] = fn(points.data() + i * points.cols());
        }
        return out;
      },
      std::move(name));
}

ScaledPredictor::ScaledPredictor(Predictor& base, double factor)
    : Predictor(base.kind(), base.dim(), base.name() + "*scaled"),
      base_(base),
      factor_(factor) {}

Eigen::VectorXd ScaledPredictor::DoEvaluate(const RowMatrix& points) {
  return factor_ * base_.EvaluateBatch(points);
}

}  // namespace anovadistill
