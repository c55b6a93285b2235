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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kbr/example.hpp"
#include "kbr/parallel.hpp"

namespace kbr {

/// Evaluation setups. Each names a view of an example that only moves
/// statements between context and withheld (or swaps the hypothesis subject
/// for SELECTIVITY); ids and labels are untouched.
///
///   AS_IS                   unchanged (hand-written or template sets)
///   NO_CONTEXT              every context statement moves to withheld
///   RELEVANT_REMOVED        relevant hypernym/property statements move to withheld
///   EXPLICIT                every withheld statement moves into the context
///   IMPLICIT                hypernym-tagged statements move to withheld
///   SELECTIVITY             hypothesis subject replaced by a nonsense word
///   COUNTING_FULL           unchanged
///   COUNTING_DROP_QUANTITY  the quantity fact is removed
enum class Setup {
  AsIs,
  NoContext,
  RelevantRemoved,
  Explicit,
  Implicit,
  Selectivity,
  CountingFull,
  CountingDropQuantity,
};

std::string_view to_string(Setup s);
/// Accepts the upper-case names above; throws Error otherwise.
Setup setup_from_string(std::string_view name);
std::span<const Setup> all_setups();

/// Statements that move gain nothing and lose nothing; context order is
/// preserved except for EXPLICIT, which reshuffles with the example seed.
Example apply_view(Setup setup, const Example& example, const Verbalizer& verbalizer,
                   std::uint64_t seed);
std::vector<Example> apply_view(Setup setup, std::span<const Example> examples,
                                const Verbalizer& verbalizer, std::uint64_t seed,
                                Execution exec = Execution::Parallel);

}  // namespace kbr
