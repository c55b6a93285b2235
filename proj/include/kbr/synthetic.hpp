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

#include <cstdint>
#include <iosfwd>

#include "kbr/kb.hpp"

namespace kbr {

// Shape of a generated fixture KB. Every tree is a separate connected
// component: root class, mid classes, leaf entities, plus part chains and
// size facts hanging off the leaves. Counting sets live in their own
// components.
struct SyntheticKbOptions {
  std::size_t trees = 200;
  std::size_t mids_per_tree = 4;
  std::size_t leaves_per_mid = 8;
  std::size_t properties_per_mid = 6;
  std::size_t properties_per_root = 2;
  std::size_t organs_per_mid = 2;
  std::size_t tissues_per_organ = 2;
  std::size_t counting_sets_per_predicate = 20;
  // 0 cycles K through 1..5; otherwise every set has this K.
  int counting_k = 0;
  std::uint64_t seed = 1;
};

KnowledgeBase make_synthetic_kb(const SyntheticKbOptions& options,
                                const PredicateRegistry& registry = PredicateRegistry::builtin());

/// Writes the KB back out as TSV using surface forms, so reloading it
/// yields the same triples.
void write_tsv(std::ostream& out, const KnowledgeBase& kb);

}  // namespace kbr
