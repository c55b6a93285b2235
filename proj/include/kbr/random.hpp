// Copyright 2026 The kbreason Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace kbr {

// mt19937_64 has a fully specified output sequence. The std distributions do
// not, so draws go through the helpers below to keep datasets byte-identical
// across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for work item `index` of `stream`, independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                          std::uint64_t index);

inline Rng make_rng(std::uint64_t root, std::uint64_t stream,
                    std::uint64_t index) {
  return Rng(derive_seed(root, stream, index));
}

/// FNV-1a, 64 bit. Stable across platforms, unlike std::hash; used to key
/// per-item streams by id or fact.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform double in [0, 1) with 53 bits of precision.
double uniform_unit(Rng& rng);

inline bool bernoulli(Rng& rng, double p) { return uniform_unit(rng) < p; }

template <class T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

template <class T>
const T& pick(const std::vector<T>& values, Rng& rng) {
  return values[uniform_index(rng, values.size())];
}

/// Stream identifiers so that unrelated generators never share seeds.
namespace streams {
inline constexpr std::uint64_t kTaxonomy = 1;
inline constexpr std::uint64_t kHypothesisOnly = 2;
inline constexpr std::uint64_t kMeronymy = 3;
inline constexpr std::uint64_t kControlled = 4;
inline constexpr std::uint64_t kCounting = 5;
inline constexpr std::uint64_t kSplit = 6;
inline constexpr std::uint64_t kAblation = 7;
inline constexpr std::uint64_t kBeliefs = 8;
inline constexpr std::uint64_t kViews = 9;
inline constexpr std::uint64_t kIntervention = 10;
}  // namespace streams

}  // namespace kbr
