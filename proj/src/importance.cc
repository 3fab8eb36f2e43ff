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

#include "anovadistill/importance.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "anovadistill/error.h"
#include "anovadistill/rng.h"

namespace anovadistill {
namespace {

constexpr double kRoundoffUlps = 64.0;

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

// Unbiased variance of v[0..m).
// Shifted by v[0] so that equal values give exactly zero.
double SampleVariance(const double* v, int m) {
  double mean = 0.0;
  for (int i = 0; i < m; ++i) mean += v[i] - v[0];
  mean /= m;
  double ss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double d = (v[i] - v[0]) - mean;
    ss += d * d;
  }
  return ss / (m - 1);
}

Moments MeanAndError(const std::vector<double>& v) {
  Moments out;
  const int m = static_cast<int>(v.size());
  for (double x : v) out.mean += x;
  out.mean /= m;
  if (m > 1) out.std_error = std::sqrt(SampleVariance(v.data(), m) / m);
  return out;
}

// Row indices for the outer and inner draws.
struct Design {
  int outer = 0;
  int inner = 0;
  std::vector<int> outer_rows;
  // inner_rows[o * inner + i]
  std::vector<int> inner_rows;
};

Design MakeDesign(int n, int outer, int inner, bool exhaustive, uint64_t seed) {
  Design d;
  if (exhaustive) {
    d.outer = d.inner = n;
    d.outer_rows.resize(n);
    d.inner_rows.resize(static_cast<std::size_t>(n) * n);
    for (int o = 0; o < n; ++o) {
      d.outer_rows[o] = o;
      for (int i = 0; i < n; ++i) d.inner_rows[o * n + i] = i;
    }
    return d;
  }
  d.outer = outer;
  d.inner = inner;
  Rng rng(seed);
  d.outer_rows.resize(outer);
  d.inner_rows.resize(static_cast<std::size_t>(outer) * inner);
  for (int o = 0; o < outer; ++o) {
    d.outer_rows[o] = UniformIndex(rng, n);
    for (int i = 0; i < inner; ++i) d.inner_rows[o * inner + i] = UniformIndex(rng, n);
  }
  return d;
}

}  // namespace

void McConfig::Validate() const {
  if (!exhaustive && (m_anchor < 2 || m_comp < 2)) {
    throw InvalidArgumentError("m_anchor and m_comp must be >= 2");
  }
  if (workers < 0) throw InvalidArgumentError("workers must be >= 0");
}

nlohmann::json McConfigToJson(const McConfig& mc) {
  return {{"m_anchor", mc.m_anchor},
          {"m_comp", mc.m_comp},
          {"seed", mc.seed},
          {"exhaustive", mc.exhaustive},
          {"variance_mode", "unbiased"}};
}

void ImportanceTable::Insert(ScoreEntry entry) {
  const IndexSet key = entry.j;
  if (!entries_.emplace(key, std::move(entry)).second) {
    throw InvalidArgumentError("duplicate candidate " + key.ToString());
  }
}

const ScoreEntry* ImportanceTable::Find(const IndexSet& j) const {
  const auto it = entries_.find(j);
  return it == entries_.end() ? nullptr : &it->second;
}

double ImportanceTable::Score(const IndexSet& j) const {
  const ScoreEntry* e = Find(j);
  if (e == nullptr) {
    throw InvalidArgumentError("no score for " + j.ToString());
  }
  return e->score;
}

double ImportanceTable::MaxScore(int order) const {
  double best = 0.0;
  for (const auto& [j, e] : entries_) {
    if (e.order == order) best = std::max(best, e.score);
  }
  return best;
}

uint64_t ImportanceTable::TotalEvals() const {
  uint64_t total = 0;
  for (const auto& [j, e] : entries_) total += e.evals;
  return total;
}

nlohmann::json ImportanceTable::ToJson() const {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& [j, e] : entries_) {
    scores.push_back({{"j", j.indices()},
                      {"score", e.score},
                      {"order", e.order},
                      {"evals", e.evals},
                      {"std_error", e.std_error}});
  }
  return {{"scores", scores},
          {"config", config.is_null() ? nlohmann::json::object() : config}};
}

ImportanceTable ImportanceTable::FromJson(const nlohmann::json& doc) {
  ImportanceTable table;
  try {
    for (const auto& s : doc.at("scores")) {
      ScoreEntry e;
      e.j = IndexSet(s.at("j").get<std::vector<int>>());
      e.score = s.at("score").get<double>();
      e.order = s.value("order", e.j.order());
      e.evals = s.value("evals", uint64_t{0});
      e.std_error = s.value("std_error", 0.0);
      table.Insert(std::move(e));
    }
    if (doc.contains("config")) table.config = doc["config"];
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("malformed importance table: ") +
                               e.what());
  }
  return table;
}

ScoreEntry TotalEffectScore(Predictor& pred, const Dataset& data, int j,
                            const McConfig& mc) {
  mc.Validate();
  if (j < 0 || j >= data.p()) {
    throw InvalidArgumentError("feature index " + std::to_string(j) +
                               " out of range");
  }
  if (pred.dim() != data.p()) {
    throw InvalidArgumentError("dimension mismatch between data and predictor");
  }
  const int idx[] = {j};
  const Design d = MakeDesign(data.n(), mc.m_comp, mc.m_anchor, mc.exhaustive,
                              DeriveSeed(mc.seed, "total-effect", idx));
  RowMatrix points(static_cast<Eigen::Index>(d.outer) * d.inner, data.p());
  for (int o = 0; o < d.outer; ++o) {
    const auto base = data.row(d.outer_rows[o]);
    for (int i = 0; i < d.inner; ++i) {
      auto row = points.row(o * d.inner + i);
      for (int c = 0; c < data.p(); ++c) row[c] = base[c];
      row[j] = data(d.inner_rows[o * d.inner + i], j);
    }
  }
  const Eigen::VectorXd y = pred.EvaluateBatch(points);
  std::vector<double> variances(d.outer);
  for (int o = 0; o < d.outer; ++o) {
    variances[o] = SampleVariance(y.data() + o * d.inner, d.inner);
  }
  const Moments m = MeanAndError(variances);
  ScoreEntry e;
  e.j = IndexSet::Single(j);
  e.order = 1;
  e.score = m.mean;
  e.std_error = m.std_error;
  e.evals = static_cast<uint64_t>(points.rows());
  return e;
}

ScoreEntry InteractionScore(Predictor& pred, const Dataset& data,
                            const IndexSet& j, const McConfig& mc,
                            const BandwidthSchedule& h) {
  mc.Validate();
  if (pred.dim() != data.p()) {
    throw InvalidArgumentError("dimension mismatch between data and predictor");
  }
  const auto kinds = data.kinds();
  const StencilPlan plan(j, kinds, h);
  const Design d =
      MakeDesign(data.n(), mc.m_anchor, mc.m_comp, mc.exhaustive,
                 DeriveSeed(mc.seed, "interaction", j.indices()));
  const int s = plan.size();
  const int p = data.p();
  RowMatrix points(static_cast<Eigen::Index>(d.outer) * d.inner * s, p);
  std::vector<double> x(p);
  for (int o = 0; o < d.outer; ++o) {
    const auto anchor = data.row(d.outer_rows[o]);
    for (int i = 0; i < d.inner; ++i) {
      const auto comp = data.row(d.inner_rows[o * d.inner + i]);
      for (int c = 0; c < p; ++c) x[c] = comp[c];
      for (int l : j) x[l] = anchor[l];
      plan.Fill(x, points, static_cast<Eigen::Index>(o * d.inner + i) * s);
    }
  }
  const Eigen::VectorXd y = pred.EvaluateBatch(points);
  std::vector<double> diffs(d.inner);
  std::vector<double> variances(d.outer);
  for (int o = 0; o < d.outer; ++o) {
    for (int i = 0; i < d.inner; ++i) {
      diffs[i] = plan.Combine(y.data() +
                              static_cast<std::ptrdiff_t>(o * d.inner + i) * s);
    }
    variances[o] = SampleVariance(diffs.data(), d.inner);
  }
  Moments m = MeanAndError(variances);
  // Below the floating-point resolution of the stencil the estimate is noise.
  const double ymax = y.size() > 0 ? y.cwiseAbs().maxCoeff() : 0.0;
  const double resolution = kRoundoffUlps *
                            std::numeric_limits<double>::epsilon() * ymax * s /
                            plan.divisor();
  if (m.mean <= resolution * resolution) m = Moments{};
  ScoreEntry e;
  e.j = j;
  e.order = j.order();
  e.score = m.mean;
  e.std_error = m.std_error;
  e.evals = static_cast<uint64_t>(points.rows());
  return e;
}

int ResolveWorkers(int workers) {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  const int threads = std::min(ResolveWorkers(workers), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

ImportanceTable ScoreBatch(Predictor& pred, const Dataset& data,
                           const std::vector<IndexSet>& candidates,
                           const McConfig& mc, const BandwidthSchedule& h,
                           ScoreKind kind) {
  mc.Validate();
  std::set<IndexSet> seen;
  for (const auto& j : candidates) {
    if (!seen.insert(j).second) {
      throw InvalidArgumentError("duplicate candidate " + j.ToString());
    }
    if (kind == ScoreKind::kTotalEffect && j.order() != 1) {
      throw InvalidArgumentError("total effects are defined for single features");
    }
  }
  const int n = static_cast<int>(candidates.size());
  std::vector<ScoreEntry> results(n);
  std::vector<std::exception_ptr> errors(n);
  ParallelFor(n, mc.workers, [&](int i) {
    try {
      results[i] = kind == ScoreKind::kTotalEffect
                       ? TotalEffectScore(pred, data, candidates[i][0], mc)
                       : InteractionScore(pred, data, candidates[i], mc, h);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  int failed = 0, first = -1;
  for (int i = 0; i < n; ++i) {
    if (errors[i]) {
      ++failed;
      if (first < 0) first = i;
    }
  }
  if (first >= 0) {
    const std::string prefix =
        "scoring " + candidates[first].ToString() + " failed" +
        (failed > 1 ? " (" + std::to_string(failed) + " candidates failed)"
                    : std::string()) +
        ": ";
    try {
      std::rethrow_exception(errors[first]);
    } catch (const PredictorError& e) {
      throw PredictorError(prefix + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(prefix + e.what());
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError(prefix + e.what());
    }
  }
  ImportanceTable table;
  for (auto& r : results) table.Insert(std::move(r));
  table.config = McConfigToJson(mc);
  table.config["h"] = h.h1;
  table.config["bandwidth_mode"] = BandwidthModeName(h.mode);
  return table;
}

}  // namespace anovadistill
