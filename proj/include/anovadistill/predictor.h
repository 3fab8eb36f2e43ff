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

#ifndef ANOVADISTILL_PREDICTOR_H_
#define ANOVADISTILL_PREDICTOR_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include <Eigen/Core>

#include "anovadistill/dataset.h"

namespace anovadistill {

enum class PredictorKind { kAnalytic, kExternal, kInMemory };

// Memoizes outputs keyed by the exact bit pattern of an input row.
class EvalCache {
 public:
  struct Stats {
    uint64_t hits = 0;
    uint64_t misses = 0;
  };

  bool Lookup(const std::string& key, double* value);
  void Insert(const std::string& key, double value);
  Stats stats() const;
  void Clear();

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, double> values_;
  Stats stats_;
};

// The black box f: a batch-evaluable map from [0,1]^p to the reals.
// EvaluateBatch may be called concurrently; results always correspond to their
// own inputs.
class Predictor {
 public:
  virtual ~Predictor() = default;
  Predictor(const Predictor&) = delete;
  Predictor& operator=(const Predictor&) = delete;

  int dim() const { return dim_; }
  PredictorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // Validates the batch, consults the cache when enabled, and counts every
  // row actually sent to the model. Throws PredictorError on non-finite
  // outputs, naming the offending row.
  Eigen::VectorXd EvaluateBatch(const RowMatrix& points);

  // Number of rows evaluated by the underlying model (cache misses only).
  uint64_t eval_count() const { return eval_count_.load(); }

  void EnableCache(bool enabled) { cache_enabled_ = enabled; }
  bool cache_enabled() const { return cache_enabled_; }
  EvalCache::Stats cache_stats() const { return cache_.stats(); }

 protected:
  Predictor(PredictorKind kind, int dim, std::string name);

  // Evaluates a non-empty batch of validated rows. Must return one output per
  // row.
  virtual Eigen::VectorXd DoEvaluate(const RowMatrix& points) = 0;

 private:
  Eigen::VectorXd EvaluateUncached(const RowMatrix& points);

  PredictorKind kind_;
  int dim_;
  std::string name_;
  std::atomic<uint64_t> eval_count_{0};
  bool cache_enabled_ = false;
  EvalCache cache_;
};

using BatchFunction = std::function<Eigen::VectorXd(const RowMatrix&)>;

// In-process predictor backed by a callable.
class CallbackPredictor : public Predictor {
 public:
  CallbackPredictor(int dim, BatchFunction fn, std::string name = "callback");

 protected:
  Eigen::VectorXd DoEvaluate(const RowMatrix& points) override;

 private:
  BatchFunction fn_;
};

// Convenience for per-row closures such as test functions.
std::unique_ptr<Predictor> MakeRowPredictor(
    int dim, std::function<double(const double*)> fn,
    std::string name = "callback");

// Wraps another predictor and multiplies its outputs by a constant.
class ScaledPredictor : public Predictor {
 public:
  ScaledPredictor(Predictor& base, double factor);

 protected:
  Eigen::VectorXd DoEvaluate(const RowMatrix& points) override;

 private:
  Predictor& base_;
  double factor_;
};

}  // namespace anovadistill

#endif  // ANOVADISTILL_PREDICTOR_H_
