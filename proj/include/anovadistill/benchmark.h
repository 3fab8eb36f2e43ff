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

#ifndef ANOVADISTILL_BENCHMARK_H_
#define ANOVADISTILL_BENCHMARK_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "anovadistill/anova_model.h"
#include "anovadistill/derivative.h"
#include "anovadistill/importance.h"
#include "anovadistill/index_set.h"

namespace anovadistill {

// Area under the ROC curve of `scores` for the positive `labels`, with tied
// scores counted as one half. Returns 0.5 when one class is empty.
double Auroc(const std::vector<double>& scores, const std::vector<bool>& labels);

struct BenchmarkOptions {
  std::vector<std::string> functions = {"F1", "F2", "F3", "F4", "F5",
                                        "F6", "F7", "F8", "F9", "F10"};
  int n = 3000;
  uint64_t seed = 0;
  McConfig mc;
  BandwidthSchedule h;
  // Features enter the surrogate when their total effect exceeds this
  // fraction of the largest one. Zero keeps every feature the function uses.
  double tau0_frac = 0.0;
  // Pairwise surrogate whose component importances rank the pairs.
  FitOptions fit;

  void Validate() const;
};

nlohmann::json BenchmarkOptionsToJson(const BenchmarkOptions& options);

struct PairRecord {
  IndexSet j;
  bool truth = false;
  // Variance of the fitted pair component (0 for pairs outside V).
  double importance = 0.0;
  // Interaction score of the pair.
  double score = 0.0;
};

struct FunctionResult {
  std::string name;
  // Pairs ranked by component importance.
  double auroc = 0.0;
  // Pairs ranked by interaction score.
  double auroc_score_rank = 0.0;
  std::vector<int> V;
  std::vector<IndexSet> true_pairs;
  std::vector<PairRecord> pairs;
  double fit_r2 = 0.0;
  uint64_t evals = 0;
};

struct BenchmarkReport {
  std::vector<FunctionResult> results;
  double average_auroc = 0.0;
  double average_auroc_score_rank = 0.0;
  nlohmann::json config;

  nlohmann::json ToJson() const;
};

// For each analytic function: uniform rows on its sampling box, total
// effects and Step 1-1 selection, interaction scores of all pairs, then a
// surrogate with every selected main effect and every pair of selected
// features whose identifiable component variances rank the pairs.
BenchmarkReport RunBenchmark(const BenchmarkOptions& options);

FunctionResult RunBenchmarkFunction(const std::string& name,
                                    const BenchmarkOptions& options);

}  // namespace anovadistill

#endif  // ANOVADISTILL_BENCHMARK_H_
