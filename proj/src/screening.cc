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

#include "anovadistill/screening.h"

#include <algorithm>
#include <limits>
#include <set>

#include "anovadistill/error.h"

namespace anovadistill {
namespace {

using json = nlohmann::json;

json SetsToJson(const std::vector<IndexSet>& sets) {
  json out = json::array();
  for (const auto& s : sets) out.push_back(s.indices());
  return out;
}

std::vector<IndexSet> SetsFromJson(const json& doc) {
  std::vector<IndexSet> out;
  for (const auto& s : doc) out.emplace_back(s.get<std::vector<int>>());
  return out;
}

// Applies the threshold and the cap to scored candidates of one level.
void Select(const ScreeningConfig& cfg, ScreeningLevel& level) {
  double best = 0.0;
  for (const auto& j : level.candidates) {
    best = std::max(best, level.scores.Score(j));
  }
  level.gamma = cfg.tau * best;
  std::vector<IndexSet> pass;
  for (const auto& j : level.candidates) {
    if (level.scores.Score(j) > level.gamma) pass.push_back(j);
  }
  const int cap = cfg.CapFor(level.order);
  if (static_cast<int>(pass.size()) > cap) {
    SortByScore(pass, level.scores);
    level.capped = static_cast<int>(pass.size()) - cap;
    pass.resize(cap);
  }
  std::sort(pass.begin(), pass.end());
  level.survivors = std::move(pass);
}

std::vector<IndexSet> CappedTerms(const ScreeningConfig& cfg,
                                  const ScreeningLevel& level) {
  std::vector<IndexSet> terms = level.candidates;
  const int cap = cfg.CapFor(level.order);
  if (static_cast<int>(terms.size()) > cap) {
    SortByScore(terms, level.scores);
    terms.resize(cap);
    std::sort(terms.begin(), terms.end());
  }
  return terms;
}

void AssembleR(const ScreeningConfig& cfg, ScreeningResult& result) {
  result.R.clear();
  for (int v : result.V) result.R.push_back(IndexSet::Single(v));
  for (const auto& level : result.levels) {
    if (level.order < 2) continue;
    for (auto& j : CappedTerms(cfg, level)) result.R.push_back(std::move(j));
  }
}

}  // namespace

void ScreeningConfig::Validate() const {
  if (K < 1 || K > kMaxOrder) {
    throw InvalidArgumentError("K must lie in [1, " +
                               std::to_string(kMaxOrder) + "]");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgumentError("tau must lie in (0, 1)");
  }
  if (!(tau0_frac >= 0.0 && tau0_frac < 1.0)) {
    throw InvalidArgumentError("tau0_frac must lie in [0, 1)");
  }
  for (const auto& [order, cap] : caps) {
    if (cap < 1) throw InvalidArgumentError("caps must be positive");
  }
  mc.Validate();
  h.Validate();
}

int ScreeningConfig::CapFor(int order) const {
  const auto it = caps.find(order);
  return it == caps.end() ? std::numeric_limits<int>::max() : it->second;
}

json ScreeningConfigToJson(const ScreeningConfig& cfg) {
  json caps = json::object();
  for (const auto& [order, cap] : cfg.caps) caps[std::to_string(order)] = cap;
  return {{"K", cfg.K},
          {"tau", cfg.tau},
          {"tau0_frac", cfg.tau0_frac},
          {"caps", caps},
          {"mc", McConfigToJson(cfg.mc)},
          {"h", cfg.h.h1},
          {"bandwidth_mode", BandwidthModeName(cfg.h.mode)}};
}

void ScreeningConfigFromJson(const json& doc, ScreeningConfig* cfg) {
  try {
    if (doc.contains("K")) cfg->K = doc["K"].get<int>();
    if (doc.contains("tau")) cfg->tau = doc["tau"].get<double>();
    if (doc.contains("tau0_frac")) cfg->tau0_frac = doc["tau0_frac"].get<double>();
    if (doc.contains("caps")) {
      cfg->caps.clear();
      for (const auto& [order, cap] : doc["caps"].items()) {
        cfg->caps[std::stoi(order)] = cap.get<int>();
      }
    }
    if (doc.contains("h")) cfg->h.h1 = doc["h"].get<double>();
    if (doc.contains("bandwidth_mode")) {
      cfg->h.mode = ParseBandwidthMode(doc["bandwidth_mode"].get<std::string>());
    }
    if (doc.contains("mc")) {
      const json& mc = doc["mc"];
      if (mc.contains("m_anchor")) cfg->mc.m_anchor = mc["m_anchor"].get<int>();
      if (mc.contains("m_comp")) cfg->mc.m_comp = mc["m_comp"].get<int>();
      if (mc.contains("seed")) cfg->mc.seed = mc["seed"].get<uint64_t>();
      if (mc.contains("exhaustive")) {
        cfg->mc.exhaustive = mc["exhaustive"].get<bool>();
      }
      if (mc.contains("workers")) cfg->mc.workers = mc["workers"].get<int>();
    }
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad screening config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw InvalidArgumentError(std::string("bad screening config: ") + e.what());
  }
}

uint64_t ScreeningResult::TotalEvals() const {
  uint64_t total = feature_scores.TotalEvals();
  for (const auto& level : levels) total += level.evals;
  return total;
}

json ScreeningResult::ToJson() const {
  json lv = json::array();
  for (const auto& level : levels) {
    lv.push_back({{"order", level.order},
                  {"gamma", level.gamma},
                  {"S_size", level.candidates.size()},
                  {"C_size", level.survivors.size()},
                  {"capped", level.capped},
                  {"evals", level.evals},
                  {"S", SetsToJson(level.candidates)},
                  {"C", SetsToJson(level.survivors)},
                  {"scores", level.scores.ToJson()["scores"]}});
  }
  return {{"V", V},
          {"tau0", tau0},
          {"feature_scores", feature_scores.ToJson()["scores"]},
          {"levels", lv},
          {"R", SetsToJson(R)},
          {"total_evals", TotalEvals()},
          {"config", config.is_null() ? json::object() : config}};
}

ScreeningResult ScreeningResult::FromJson(const json& doc) {
  ScreeningResult r;
  try {
    r.V = doc.at("V").get<std::vector<int>>();
    r.tau0 = doc.value("tau0", 0.0);
    if (doc.contains("feature_scores")) {
      r.feature_scores =
          ImportanceTable::FromJson({{"scores", doc["feature_scores"]}});
    }
    for (const auto& l : doc.at("levels")) {
      ScreeningLevel level;
      level.order = l.at("order").get<int>();
      level.gamma = l.value("gamma", 0.0);
      level.capped = l.value("capped", 0);
      level.evals = l.value("evals", uint64_t{0});
      level.candidates = SetsFromJson(l.at("S"));
      level.survivors = SetsFromJson(l.at("C"));
      if (l.contains("scores")) {
        level.scores = ImportanceTable::FromJson({{"scores", l["scores"]}});
      }
      r.levels.push_back(std::move(level));
    }
    r.R = SetsFromJson(doc.at("R"));
    if (doc.contains("config")) r.config = doc["config"];
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed screening result: ") +
                               e.what());
  }
  return r;
}

void SortByScore(std::vector<IndexSet>& sets, const ImportanceTable& scores) {
  std::stable_sort(sets.begin(), sets.end(),
                   [&](const IndexSet& a, const IndexSet& b) {
                     const double sa = scores.Score(a), sb = scores.Score(b);
                     if (sa != sb) return sa > sb;
                     return a < b;
                   });
}

std::vector<int> SelectFeatures(const ImportanceTable& total_effects,
                                double tau0_frac, double* tau0) {
  double best = 0.0;
  for (const auto& [j, e] : total_effects.entries()) best = std::max(best, e.score);
  const double threshold = tau0_frac * best;
  if (tau0 != nullptr) *tau0 = threshold;
  std::vector<int> V;
  if (best <= 0.0) return V;
  for (const auto& [j, e] : total_effects.entries()) {
    if (e.score > threshold) V.push_back(j[0]);
  }
  return V;
}

std::vector<int> ScreenFeatures(Predictor& pred, const Dataset& data,
                                const ScreeningConfig& cfg,
                                ImportanceTable* total_effects, double* tau0) {
  cfg.Validate();
  std::vector<IndexSet> singles;
  for (int j = 0; j < data.p(); ++j) singles.push_back(IndexSet::Single(j));
  ImportanceTable table =
      ScoreBatch(pred, data, singles, cfg.mc, cfg.h, ScoreKind::kTotalEffect);
  const auto V = SelectFeatures(table, cfg.tau0_frac, tau0);
  if (total_effects != nullptr) *total_effects = std::move(table);
  return V;
}

ScreeningResult ScreenInteractions(const std::vector<int>& V,
                                   const Scorer& scorer,
                                   const ScreeningConfig& cfg) {
  cfg.Validate();
  ScreeningResult result;
  result.V = V;
  std::sort(result.V.begin(), result.V.end());
  result.config = ScreeningConfigToJson(cfg);

  std::vector<IndexSet> candidates;
  for (int v : result.V) candidates.push_back(IndexSet::Single(v));
  for (int k = 1; k <= cfg.K; ++k) {
    ScreeningLevel level;
    level.order = k;
    level.candidates = candidates;
    if (!candidates.empty()) {
      level.scores = scorer(candidates);
      level.evals = level.scores.TotalEvals();
      Select(cfg, level);
    }
    // Join step: (k+1)-sets whose ancestors all survived.
    std::vector<IndexSet> next;
    if (k < cfg.K && level.survivors.size() > static_cast<std::size_t>(k)) {
      const std::set<IndexSet> alive(level.survivors.begin(),
                                     level.survivors.end());
      for (const auto& a : level.survivors) {
        for (int v : result.V) {
          if (v <= a.indices().back()) continue;
          std::vector<int> grown = a.indices();
          grown.push_back(v);
          IndexSet j(std::move(grown));
          bool ok = true;
          for (const auto& anc : Ancestors(j)) {
            if (!alive.count(anc)) {
              ok = false;
              break;
            }
          }
          if (ok) next.push_back(std::move(j));
        }
      }
      std::sort(next.begin(), next.end());
    }
    result.levels.push_back(std::move(level));
    candidates = std::move(next);
  }
  AssembleR(cfg, result);
  return result;
}

ScreeningResult Screen(Predictor& pred, const Dataset& data,
                       const ScreeningConfig& cfg) {
  cfg.Validate();
  if (pred.dim() != data.p()) {
    throw InvalidArgumentError("dimension mismatch: predictor expects p=" +
                               std::to_string(pred.dim()) + ", data has p=" +
                               std::to_string(data.p()));
  }
  ImportanceTable total_effects;
  double tau0 = 0.0;
  const auto V = ScreenFeatures(pred, data, cfg, &total_effects, &tau0);
  ScreeningResult result = ScreenInteractions(
      V,
      [&](const std::vector<IndexSet>& candidates) {
        return ScoreBatch(pred, data, candidates, cfg.mc, cfg.h);
      },
      cfg);
  result.feature_scores = std::move(total_effects);
  result.tau0 = tau0;
  return result;
}

ScreeningResult BruteForceScreen(const ImportanceTable& total_effects,
                                 const ImportanceTable& scores,
                                 const ScreeningConfig& cfg) {
  cfg.Validate();
  ScreeningResult result;
  result.V = SelectFeatures(total_effects, cfg.tau0_frac, &result.tau0);
  result.feature_scores = total_effects;
  result.config = ScreeningConfigToJson(cfg);
  std::set<IndexSet> previous;
  for (int k = 1; k <= cfg.K; ++k) {
    ScreeningLevel level;
    level.order = k;
    for (const auto& j : SubsetsOfSize(result.V, k)) {
      bool ok = true;
      if (k >= 2) {
        for (std::size_t pos = 0; pos < j.size() && ok; ++pos) {
          ok = previous.count(j.WithoutPosition(pos)) > 0;
        }
      }
      if (!ok) continue;
      const ScoreEntry* e = scores.Find(j);
      if (e == nullptr) {
        throw InvalidArgumentError("score table incomplete: missing " +
                                   j.ToString());
      }
      level.candidates.push_back(j);
      level.scores.Insert(*e);
      level.evals += e->evals;
    }
    if (!level.candidates.empty()) Select(cfg, level);
    previous = std::set<IndexSet>(level.survivors.begin(),
                                  level.survivors.end());
    result.levels.push_back(std::move(level));
  }
  AssembleR(cfg, result);
  return result;
}

}  // namespace anovadistill
