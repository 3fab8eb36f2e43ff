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

#ifndef ANOVADISTILL_COMPONENT_H_
#define ANOVADISTILL_COMPONENT_H_

#include <span>
#include <string>

#include "json.hpp"

#include "anovadistill/index_set.h"

namespace anovadistill {

// One fitted term f_j of the ANOVA surrogate. Implementations are immutable.
class ComponentFunction {
 public:
  explicit ComponentFunction(IndexSet j) : j_(std::move(j)) {}
  virtual ~ComponentFunction() = default;

  const IndexSet& set() const { return j_; }
  int order() const { return j_.order(); }

  // `x` is a full scaled p-vector; only the coordinates in set() are read.
  virtual double Evaluate(std::span<const double> x) const = 0;
  virtual std::string backend() const = 0;
  virtual nlohmann::json ToJson() const = 0;

 private:
  IndexSet j_;
};

}  // namespace anovadistill

#endif  // ANOVADISTILL_COMPONENT_H_
