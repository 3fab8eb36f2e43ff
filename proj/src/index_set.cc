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

#include "anovadistill/index_set.h"

#include <algorithm>
#include <functional>

#include "anovadistill/error.h"

namespace anovadistill {

IndexSet::IndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (!indices_.empty() && indices_.front() < 0) {
    throw InvalidArgumentError("negative feature index " +
                               std::to_string(indices_.front()));
  }
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InvalidArgumentError("duplicate feature index in index set");
  }
}

bool IndexSet::Contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

int IndexSet::PositionOf(int index) const {
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return -1;
  return static_cast<int>(it - indices_.begin());
}

IndexSet IndexSet::WithoutPosition(std::size_t position) const {
  IndexSet out;
  out.indices_.reserve(indices_.size() - 1);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i != position) out.indices_.push_back(indices_[i]);
  }
  return out;
}

IndexSet IndexSet::SubsetByMask(unsigned mask) const {
  IndexSet out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (mask & (1u << i)) out.indices_.push_back(indices_[i]);
  }
  return out;
}

bool IndexSet::IsSubsetOf(const IndexSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

std::string IndexSet::ToString() const {
  if (indices_.empty()) return "intercept";
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(indices_[i]);
  }
  return out;
}

std::size_t IndexSetHash::operator()(const IndexSet& set) const {
  std::size_t h = 0xcbf29ce484222325ull;
  for (int i : set) {
    h ^= std::hash<int>()(i) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::vector<IndexSet> Ancestors(const IndexSet& j) {
  std::vector<IndexSet> out;
  out.reserve(j.size());
  // Removing positions from last to first yields lexicographic order.
  for (std::size_t pos = j.size(); pos-- > 0;) {
    out.push_back(j.WithoutPosition(pos));
  }
  return out;
}

std::vector<IndexSet> SubsetsOfSize(std::span<const int> pool, int k) {
  std::vector<IndexSet> out;
  const int n = static_cast<int>(pool.size());
  if (k < 0 || k > n) return out;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<int> indices(k);
    for (int i = 0; i < k; ++i) indices[i] = pool[pick[i]];
    out.emplace_back(std::move(indices));
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int m = i + 1; m < k; ++m) pick[m] = pick[m - 1] + 1;
  }
  return out;
}

}  // namespace anovadistill
