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

#ifndef ANOVADISTILL_RNG_H_
#define ANOVADISTILL_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace anovadistill {

using Rng = std::mt19937_64;

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent stream seed for (seed, tag, indices). Used so that each scored
// index set draws the same samples regardless of scheduling.
inline uint64_t DeriveSeed(uint64_t seed, std::string_view tag,
                           std::span<const int> indices = {}) {
  uint64_t h = SplitMix64(seed);
  for (char c : tag) h = SplitMix64(h ^ static_cast<unsigned char>(c));
  h = SplitMix64(h ^ (0x100 + indices.size()));
  for (int i : indices) h = SplitMix64(h ^ static_cast<uint64_t>(i));
  return h;
}

// Uniform integer in [0, n); the multiply-shift map keeps the sequence
// identical across standard library implementations.
inline int UniformIndex(Rng& rng, int n) {
  return static_cast<int>(
      (static_cast<unsigned __int128>(rng()) * static_cast<uint64_t>(n)) >> 64);
}

// Uniform double in [0, 1).
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace anovadistill

#endif  // ANOVADISTILL_RNG_H_
