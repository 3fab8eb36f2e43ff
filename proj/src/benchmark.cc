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

#include "anovadistill/benchmark.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "anovadistill/analytic.h"
#include "anovadistill/error.h"
#include "anovadistill/rng.h"
#include "anovadistill/screening.h"

namespace anovadistill {

using json = nlohmann::json;

double Auroc(const std::vector<double>& scores,
             const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgumentError("scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with mid-ranks.
  double rank_sum = 0.0;
  std::size_t pos = 0, positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t e = i;
    while (e < n && scores[order[e]] == scores[order[i]]) ++e;
    const double mid = 0.5 * static_cast<double>(i + 1 + e);
    for (std::size_t t = i; t < e; ++t) {
      if (labels[order[t]]) {
        rank_sum += mid;
        ++positives;
      }
    }
    i = e;
  }
  pos = positives;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return 0.5;
  const double u = rank_sum - 0.5 * static_cast<double>(pos) * (pos + 1);
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

void BenchmarkOptions::Validate() const {
  if (n < 2) throw InvalidArgumentError("benchmark needs n >= 2");
  if (functions.empty()) throw InvalidArgumentError("no benchmark functions");
  mc.Validate();
  h.Validate();
  fit.Validate();
  if (!(tau0_frac >= 0.0 && tau0_frac < 1.0)) {
    throw InvalidArgumentError("benchmark tau0_frac must lie in [0, 1)");
  }
}

json BenchmarkOptionsToJson(const BenchmarkOptions& o) {
  return {{"functions", o.functions},
          {"n", o.n},
          {"seed", o.seed},
          {"mc", McConfigToJson(o.mc)},
          {"h", o.h.h1},
          {"bandwidth_mode", BandwidthModeName(o.h.mode)},
          {"tau0_frac", o.tau0_frac},
          {"fit", FitOptionsToJson(o.fit)}};
}

FunctionResult RunBenchmarkFunction(const std::string& name,
                                    const BenchmarkOptions& options) {
  auto pred = AnalyticPredictor::Make(name);
  FunctionResult r;
  r.name = pred->name();
  const int idx[] = {pred->function_index()};
  const Dataset data = GenerateUniform(
      pred->FeatureSpecs(), options.n,
      DeriveSeed(options.seed, "benchmark-data", idx));
  McConfig mc = options.mc;
  mc.seed = DeriveSeed(options.seed, "benchmark-mc", idx);

  std::vector<IndexSet> singles, pairs;
  for (int a = 0; a < data.p(); ++a) {
    singles.push_back(IndexSet::Single(a));
    for (int b = a + 1; b < data.p(); ++b) pairs.push_back(IndexSet({a, b}));
  }
  const ImportanceTable total =
      ScoreBatch(*pred, data, singles, mc, options.h, ScoreKind::kTotalEffect);
  r.V = SelectFeatures(total, options.tau0_frac);
  const ImportanceTable scores = ScoreBatch(*pred, data, pairs, mc, options.h);

  std::vector<IndexSet> terms;
  for (int v : r.V) terms.push_back(IndexSet::Single(v));
  for (const auto& j : SubsetsOfSize(r.V, 2)) terms.push_back(j);
  const Eigen::VectorXd y = pred->EvaluateBatch(data.values());
  const AnovaModel model = FitToTargets(data, y, terms, options.fit);
  const auto importance = ComponentImportance(model, data);
  r.fit_r2 = RSquared(y, model.PredictBatch(data.values()));

  r.true_pairs = pred->TruePairs();
  const std::set<IndexSet> truth(r.true_pairs.begin(), r.true_pairs.end());
  std::vector<double> by_importance, by_score;
  std::vector<bool> labels;
  for (const auto& j : pairs) {
    PairRecord rec;
    rec.j = j;
    rec.truth = truth.count(j) > 0;
    const auto it = importance.find(j);
    rec.importance = it == importance.end() ? 0.0 : it->second;
    rec.score = scores.Score(j);
    by_importance.push_back(rec.importance);
    by_score.push_back(rec.score);
    labels.push_back(rec.truth);
    r.pairs.push_back(rec);
  }
  r.auroc = Auroc(by_importance, labels);
  r.auroc_score_rank = Auroc(by_score, labels);
  r.evals = total.TotalEvals() + scores.TotalEvals() +
            static_cast<uint64_t>(data.n());
  return r;
}

BenchmarkReport RunBenchmark(const BenchmarkOptions& options) {
  options.Validate();
  BenchmarkReport report;
  report.config = BenchmarkOptionsToJson(options);
  for (const auto& name : options.functions) {
    report.results.push_back(RunBenchmarkFunction(name, options));
  }
  for (const auto& r : report.results) {
    report.average_auroc += r.auroc;
    report.average_auroc_score_rank += r.auroc_score_rank;
  }
  report.average_auroc /= report.results.size();
  report.average_auroc_score_rank /= report.results.size();
  return report;
}

json BenchmarkReport::ToJson() const {
  json fns = json::array();
  for (const auto& r : results) {
    json pairs = json::array();
    for (const auto& p : r.pairs) {
      pairs.push_back({{"j", p.j.indices()},
                       {"truth", p.truth},
                       {"importance", p.importance},
                       {"score", p.score}});
    }
    json truth = json::array();
    for (const auto& j : r.true_pairs) truth.push_back(j.indices());
    fns.push_back({{"name", r.name},
                   {"auroc", r.auroc},
                   {"auroc_score_rank", r.auroc_score_rank},
                   {"V", r.V},
                   {"true_pairs", truth},
                   {"fit_r2", r.fit_r2},
                   {"evals", r.evals},
                   {"pairs", pairs}});
  }
  return {{"functions", fns},
          {"average_auroc", average_auroc},
          {"average_auroc_score_rank", average_auroc_score_rank},
          {"config", config}};
}

}  // namespace anovadistill
