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

#ifndef ANOVADISTILL_TESTS_SCREENING_CASES_H_
#define ANOVADISTILL_TESTS_SCREENING_CASES_H_

#include <set>
#include <vector>

#include "anovadistill/error.h"
#include "anovadistill/rng.h"
#include "anovadistill/screening.h"

namespace anovadistill::testing {

// Scorer backed by a complete table; records what was asked for.
struct TableScorer {
  const ImportanceTable* table;
  std::vector<IndexSet>* asked;

  ImportanceTable operator()(const std::vector<IndexSet>& cands) const {
    ImportanceTable out;
    for (const auto& j : cands) {
      asked->push_back(j);
      const ScoreEntry* e = table->Find(j);
      if (e == nullptr) throw InvalidArgumentError("missing " + j.ToString());
      out.Insert(*e);
    }
    return out;
  }
};

struct RandomCase {
  ScreeningConfig cfg;
  ImportanceTable total;
  ImportanceTable scores;
};

// p in [2, 8], K in [1, 4], random caps, scores drawn partly from a few
// fixed levels so that ties are common.
inline RandomCase MakeRandomCase(Rng& rng) {
  RandomCase c;
  const int p = 2 + UniformIndex(rng, 7);
  c.cfg.K = 1 + UniformIndex(rng, 4);
  c.cfg.tau = 0.05 + 0.5 * UniformUnit(rng);
  c.cfg.tau0_frac = UniformIndex(rng, 2) ? 0.0 : 0.2 * UniformUnit(rng);
  c.cfg.caps.clear();
  if (UniformIndex(rng, 2)) {
    for (int k = 2; k <= 4; ++k) c.cfg.caps[k] = 1 + UniformIndex(rng, 5);
  }
  std::vector<int> all(p);
  for (int j = 0; j < p; ++j) {
    all[j] = j;
    const double te = UniformIndex(rng, 5) == 0 ? 0.0 : UniformUnit(rng);
    c.total.Insert({IndexSet::Single(j), te, 1, 10, 0.0});
  }
  const double levels[] = {0.0, 0.25, 0.5, 1.0};
  for (int k = 1; k <= c.cfg.K; ++k) {
    for (const auto& j : SubsetsOfSize(all, k)) {
      const double s = UniformIndex(rng, 2) ? levels[UniformIndex(rng, 4)]
                                            : UniformUnit(rng);
      c.scores.Insert({j, s, k, uint64_t{100} << k, 0.0});
    }
  }
  return c;
}

inline ImportanceTable ScaledTable(const ImportanceTable& t, double factor) {
  ImportanceTable out;
  for (auto [j, e] : t.entries()) {
    e.score *= factor;
    out.Insert(e);
  }
  return out;
}

inline bool SameSelection(const ScreeningResult& a, const ScreeningResult& b) {
  if (a.V != b.V || a.R != b.R || a.levels.size() != b.levels.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.levels.size(); ++k) {
    const auto& x = a.levels[k];
    const auto& y = b.levels[k];
    if (x.candidates != y.candidates || x.survivors != y.survivors ||
        x.capped != y.capped) {
      return false;
    }
  }
  return true;
}

// Every S_k member has all ancestors in C_{k-1}; every R member lies in V.
inline bool DownwardClosed(const ScreeningResult& r) {
  for (std::size_t k = 1; k < r.levels.size(); ++k) {
    const auto& prev = r.levels[k - 1].survivors;
    const std::set<IndexSet> alive(prev.begin(), prev.end());
    for (const auto& j : r.levels[k].candidates) {
      for (const auto& a : Ancestors(j)) {
        if (!alive.count(a)) return false;
      }
    }
  }
  const std::set<int> v(r.V.begin(), r.V.end());
  for (const auto& j : r.R) {
    for (int l : j) {
      if (!v.count(l)) return false;
    }
  }
  return true;
}

}  // namespace anovadistill::testing

#endif  // ANOVADISTILL_TESTS_SCREENING_CASES_H_
