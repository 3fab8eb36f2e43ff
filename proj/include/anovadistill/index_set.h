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

#ifndef ANOVADISTILL_INDEX_SET_H_
#define ANOVADISTILL_INDEX_SET_H_

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace anovadistill {

// A sorted, duplicate-free set of 0-based feature indices naming one ANOVA
// term. The default-constructed (empty) set is only used as the sentinel
// ancestor of singletons and as the intercept key.
class IndexSet {
 public:
  IndexSet() = default;
  // Sorts the input; throws InvalidArgumentError on negative or repeated
  // indices.
  explicit IndexSet(std::vector<int> indices);
  IndexSet(std::initializer_list<int> indices)
      : IndexSet(std::vector<int>(indices)) {}

  static IndexSet Single(int index) { return IndexSet({index}); }

  int order() const { return static_cast<int>(indices_.size()); }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  const std::vector<int>& indices() const { return indices_; }

  bool Contains(int index) const;
  // Position of `index` inside the set, or -1.
  int PositionOf(int index) const;
  // The set with the element at `position` removed.
  IndexSet WithoutPosition(std::size_t position) const;
  // Subset selected by a bit mask over positions.
  IndexSet SubsetByMask(unsigned mask) const;
  bool IsSubsetOf(const IndexSet& other) const;

  // "0x3x7"; the empty set renders as "intercept".
  std::string ToString() const;

  // Lexicographic on the index list.
  auto operator<=>(const IndexSet&) const = default;
  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<int> indices_;
};

struct IndexSetHash {
  std::size_t operator()(const IndexSet& set) const;
};

// A(j): every subset of j with exactly one element removed, in
// lexicographic order. A singleton's only ancestor is the empty set.
std::vector<IndexSet> Ancestors(const IndexSet& j);

// All k-element subsets of `pool` (which must be sorted and duplicate-free),
// in lexicographic order.
std::vector<IndexSet> SubsetsOfSize(std::span<const int> pool, int k);

}  // namespace anovadistill

#endif  // ANOVADISTILL_INDEX_SET_H_
