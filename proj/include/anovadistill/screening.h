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

#ifndef ANOVADISTILL_SCREENING_H_
#define ANOVADISTILL_SCREENING_H_

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "json.hpp"

#include "anovadistill/dataset.h"
#include "anovadistill/derivative.h"
#include "anovadistill/importance.h"
#include "anovadistill/index_set.h"
#include "anovadistill/predictor.h"

namespace anovadistill {

struct ScreeningConfig {
  int K = 3;
  double tau = 0.1;
  double tau0_frac = 0.01;
  // Maximum surviving sets per order; orders without an entry are uncapped.
  std::map<int, int> caps = {{2, 300}, {3, 100}, {4, 20}};
  McConfig mc;
  BandwidthSchedule h;

  void Validate() const;
  int CapFor(int order) const;
};

nlohmann::json ScreeningConfigToJson(const ScreeningConfig& cfg);
// Fields missing from `doc` keep the values already in `cfg`.
void ScreeningConfigFromJson(const nlohmann::json& doc, ScreeningConfig* cfg);

struct ScreeningLevel {
  int order = 0;
  // S_k, lexicographic.
  std::vector<IndexSet> candidates;
  // C_k after thresholding and capping, lexicographic.
  std::vector<IndexSet> survivors;
  double gamma = 0.0;
  // Sets that passed the threshold but were dropped by the cap.
  int capped = 0;
  uint64_t evals = 0;
  ImportanceTable scores;
};

struct ScreeningResult {
  // Step 1-1.
  std::vector<int> V;
  double tau0 = 0.0;
  ImportanceTable feature_scores;
  // levels[k-1] holds order k; always K entries.
  std::vector<ScreeningLevel> levels;
  // Candidate terms: the singletons of V and, per order k >= 2, the sets of
  // S_k (those whose ancestors all survived), capped like C_k.
  std::vector<IndexSet> R;
  nlohmann::json config;

  uint64_t TotalEvals() const;
  nlohmann::json ToJson() const;
  static ScreeningResult FromJson(const nlohmann::json& doc);
};

// Scores a list of candidate sets.
using Scorer =
    std::function<ImportanceTable(const std::vector<IndexSet>& candidates)>;

// V = {j : score(j) > tau0_frac * max score}; empty when every score is 0.
std::vector<int> SelectFeatures(const ImportanceTable& total_effects,
                                double tau0_frac, double* tau0 = nullptr);

// Step 1-1 with total effects estimated from the predictor.
std::vector<int> ScreenFeatures(Predictor& pred, const Dataset& data,
                                const ScreeningConfig& cfg,
                                ImportanceTable* total_effects = nullptr,
                                double* tau0 = nullptr);

// Level-wise Apriori screening over V. Only the sets of each S_k are scored.
ScreeningResult ScreenInteractions(const std::vector<int>& V,
                                   const Scorer& scorer,
                                   const ScreeningConfig& cfg);

// Full Step 1: total effects, V, then interaction levels.
ScreeningResult Screen(Predictor& pred, const Dataset& data,
                       const ScreeningConfig& cfg);

// Oracle: given total effects for every feature and interaction scores for
// every subset of V up to order K, enumerates each level exhaustively.
ScreeningResult BruteForceScreen(const ImportanceTable& total_effects,
                                 const ImportanceTable& scores,
                                 const ScreeningConfig& cfg);

// Orders sets by descending score, then lexicographically.
void SortByScore(std::vector<IndexSet>& sets, const ImportanceTable& scores);

}  // namespace anovadistill

#endif  // ANOVADISTILL_SCREENING_H_
