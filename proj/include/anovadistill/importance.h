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

#ifndef ANOVADISTILL_IMPORTANCE_H_
#define ANOVADISTILL_IMPORTANCE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"

#include "anovadistill/dataset.h"
#include "anovadistill/derivative.h"
#include "anovadistill/index_set.h"
#include "anovadistill/predictor.h"

namespace anovadistill {

struct McConfig {
  int m_anchor = 30;
  int m_comp = 30;
  uint64_t seed = 0;
  // Use every data row as anchor and as complement instead of subsampling.
  bool exhaustive = false;
  // Worker threads for ScoreBatch; 0 means hardware concurrency.
  int workers = 0;

  void Validate() const;
};

struct ScoreEntry {
  IndexSet j;
  double score = 0.0;
  int order = 0;
  // Rows submitted to the predictor for this estimate.
  uint64_t evals = 0;
  // Monte-Carlo standard error over the outer draws.
  double std_error = 0.0;
};

// Scores keyed by index set.
class ImportanceTable {
 public:
  void Insert(ScoreEntry entry);
  bool Contains(const IndexSet& j) const { return entries_.count(j) > 0; }
  const ScoreEntry* Find(const IndexSet& j) const;
  double Score(const IndexSet& j) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<IndexSet, ScoreEntry>& entries() const { return entries_; }
  // Largest score among entries of the given order (0 if none).
  double MaxScore(int order) const;
  uint64_t TotalEvals() const;

  nlohmann::json ToJson() const;
  static ImportanceTable FromJson(const nlohmann::json& doc);

  nlohmann::json config;

 private:
  std::map<IndexSet, ScoreEntry> entries_;
};

// Estimate of E_{X_{j^c}}[Var_{X_j} f]: each of m_comp complement rows is held
// fixed while coordinate j takes m_anchor values drawn from its empirical
// marginal; unbiased variances are averaged.
ScoreEntry TotalEffectScore(Predictor& pred, const Dataset& data, int j,
                            const McConfig& mc);

// Estimate of E_{X_j}[Var_{X_{j^c}} D_j f]: m_anchor j-blocks drawn from data
// rows, each paired with m_comp fresh complement blocks from independent
// rows; unbiased variance of the partial difference over complements,
// averaged over anchors. Estimates below (64 ulp * max|f| * 2^k / prod h)^2
// are reported as 0.
ScoreEntry InteractionScore(Predictor& pred, const Dataset& data,
                            const IndexSet& j, const McConfig& mc,
                            const BandwidthSchedule& h);

enum class ScoreKind { kInteraction, kTotalEffect };

// Scores every candidate (singletons for kTotalEffect) in parallel. Each
// candidate draws from its own seed stream, so results do not depend on the
// worker count. The first failure in candidate order is rethrown with the
// failing set named.
ImportanceTable ScoreBatch(Predictor& pred, const Dataset& data,
                           const std::vector<IndexSet>& candidates,
                           const McConfig& mc, const BandwidthSchedule& h,
                           ScoreKind kind = ScoreKind::kInteraction);

// Runs fn(i) for i in [0, n) on up to `workers` threads (0: hardware).
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

int ResolveWorkers(int workers);

nlohmann::json McConfigToJson(const McConfig& mc);

}  // namespace anovadistill

#endif  // ANOVADISTILL_IMPORTANCE_H_
