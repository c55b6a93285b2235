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

#include "kbr/views.hpp"

#include <array>

#include "kbr/counting.hpp"
#include "kbr/error.hpp"
#include "kbr/random.hpp"
#include "kbr/taxonomy.hpp"

namespace kbr {

namespace {

constexpr std::array<std::pair<Setup, std::string_view>, 8> kNames = {{
    {Setup::AsIs, "AS_IS"},
    {Setup::NoContext, "NO_CONTEXT"},
    {Setup::RelevantRemoved, "RELEVANT_REMOVED"},
    {Setup::Explicit, "EXPLICIT"},
    {Setup::Implicit, "IMPLICIT"},
    {Setup::Selectivity, "SELECTIVITY"},
    {Setup::CountingFull, "COUNTING_FULL"},
    {Setup::CountingDropQuantity, "COUNTING_DROP_QUANTITY"},
}};

constexpr std::array<Setup, 8> kAll = {Setup::AsIs,        Setup::NoContext,
                                       Setup::RelevantRemoved, Setup::Explicit,
                                       Setup::Implicit,    Setup::Selectivity,
                                       Setup::CountingFull, Setup::CountingDropQuantity};

template <class Pred>
void withhold_if(Example& e, Pred pred) {
  std::vector<Statement> kept;
  for (auto& s : e.context) (pred(s) ? e.withheld : kept).push_back(std::move(s));
  e.context = std::move(kept);
}

// Per-example stream so views do not depend on dataset order.
Rng view_rng(const Example& e, std::uint64_t seed) {
  return make_rng(seed ^ e.meta.seed, streams::kViews, fnv1a(e.id));
}

}  // namespace

std::string_view to_string(Setup s) {
  for (const auto& [setup, name] : kNames) {
    if (setup == s) return name;
  }
  return "?";
}

Setup setup_from_string(std::string_view name) {
  for (const auto& [setup, n] : kNames) {
    if (n == name) return setup;
  }
  std::string known;
  for (const auto& [_, n] : kNames) known += (known.empty() ? "" : ", ") + std::string(n);
  throw Error("unknown setup '" + std::string(name) + "' (known: " + known + ")");
}

std::span<const Setup> all_setups() { return kAll; }

Example apply_view(Setup setup, const Example& example, const Verbalizer& verbalizer,
                   std::uint64_t seed) {
  Example e = example;
  e.meta.extra["view"] = std::string(to_string(setup));
  switch (setup) {
    case Setup::NoContext:
      withhold_if(e, [](const Statement&) { return true; });
      break;
    case Setup::RelevantRemoved:
      withhold_if(e, [](const Statement& s) {
        return s.tag == StatementTag::RelevantHypernym || s.tag == StatementTag::RelevantProperty;
      });
      break;
    case Setup::Explicit: {
      for (auto& s : e.withheld) e.context.push_back(std::move(s));
      e.withheld.clear();
      Rng rng = view_rng(e, seed);
      shuffle(e.context, rng);
      break;
    }
    case Setup::Implicit:
      withhold_if(e, [](const Statement& s) { return is_hypernym_tag(s.tag); });
      break;
    case Setup::Selectivity: {
      Rng rng = view_rng(e, seed);
      e = make_selectivity_variant(e, default_nonsense_lexicon(), verbalizer, rng);
      break;
    }
    case Setup::AsIs:
    case Setup::CountingFull:
      break;
    case Setup::CountingDropQuantity:
      e = drop_quantity_fact(std::move(e));
      break;
  }
  return e;
}

std::vector<Example> apply_view(Setup setup, std::span<const Example> examples,
                                const Verbalizer& verbalizer, std::uint64_t seed,
                                Execution exec) {
  std::vector<Example> out(examples.size());
  for_each_index(examples.size(), exec, [&](std::size_t i) {
    out[i] = apply_view(setup, examples[i], verbalizer, seed);
  });
  return out;
}

}  // namespace kbr
