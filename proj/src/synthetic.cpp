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

#include "kbr/synthetic.hpp"

#include <array>
#include <cctype>
#include <ostream>

#include "kbr/error.hpp"

namespace kbr {

namespace {

// Two-letter syllables decompose uniquely, so distinct indices give
// distinct words.
constexpr std::array<const char*, 16> kSyllables = {"ka", "lo", "mi", "re", "to", "vu",
                                                    "ze", "pa", "du", "fi", "go", "be",
                                                    "ni", "su", "te", "wa"};

class NameSource {
 public:
  explicit NameSource(std::uint64_t offset) : next_(offset) {}

  std::string word() {
    std::uint64_t n = next_++;
    std::string out;
    for (int i = 0; i < 4; ++i) {
      out += kSyllables[n % kSyllables.size()];
      n /= kSyllables.size();
    }
    if (n != 0) throw GenerationError("synthetic name space exhausted");
    return out;
  }

 private:
  std::uint64_t next_;
};

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

class Builder {
 public:
  explicit Builder(const PredicateRegistry& registry) : registry_(registry) {}

  void fact(const std::string& s, const std::string& p, const std::string& o, bool truth) {
    triples_.push_back({s, p, o, truth, "synthetic"});
  }
  std::string entity(std::string surface) {
    std::string id = normalize_entity(surface);
    surfaces_.record(id, surface);
    return id;
  }
  KnowledgeBase finish() {
    return KnowledgeBase(registry_, std::move(triples_), std::move(surfaces_));
  }

 private:
  const PredicateRegistry& registry_;
  std::vector<Triple> triples_;
  SurfaceForms surfaces_;
};

}  // namespace

KnowledgeBase make_synthetic_kb(const SyntheticKbOptions& options,
                                const PredicateRegistry& registry) {
  const std::string isa = registry.hypernym();
  const auto property_predicates = registry.with_role(PredicateRole::Property);
  const auto meronym_predicates = registry.with_role(PredicateRole::Meronym);
  const auto size_predicates = registry.with_role(PredicateRole::Size);
  const auto member_predicates = registry.with_role(PredicateRole::Member);
  if (property_predicates.empty()) throw GenerationError("registry has no property predicate");
  const std::string has_part =
      registry.contains("HasPart") ? "HasPart"
      : meronym_predicates.empty() ? std::string()
                                   : meronym_predicates.front();
  const std::string larger = size_predicates.empty() ? std::string() : size_predicates.front();

  Rng rng = make_rng(options.seed, 0, 0);
  NameSource names(uniform_index(rng, 1024));
  Builder b(registry);
  std::size_t property_cursor = 0;
  auto next_property = [&] {
    return property_predicates[property_cursor++ % property_predicates.size()];
  };

  for (std::size_t t = 0; t < options.trees; ++t) {
    const std::string root = b.entity(names.word());
    for (std::size_t r = 0; r < options.properties_per_root; ++r) {
      b.fact(root, next_property(), b.entity(names.word()), true);
    }
    std::vector<std::string> mids;
    std::vector<std::vector<std::pair<std::string, std::string>>> mid_props;
    for (std::size_t m = 0; m < options.mids_per_tree; ++m) {
      mids.push_back(b.entity(names.word()));
      b.fact(mids.back(), isa, root, true);
      auto& props = mid_props.emplace_back();
      for (std::size_t p = 0; p < options.properties_per_mid; ++p) {
        props.emplace_back(next_property(), b.entity(names.word()));
        b.fact(mids.back(), props.back().first, props.back().second, true);
      }
      if (!has_part.empty()) {
        for (std::size_t o = 0; o < options.organs_per_mid; ++o) {
          const std::string organ = b.entity(names.word());
          b.fact(mids.back(), has_part, organ, true);
          for (std::size_t x = 0; x < options.tissues_per_organ; ++x) {
            b.fact(organ, has_part, b.entity(names.word()), true);
          }
        }
      }
    }
    // One false property per mid, borrowed from a sibling.
    if (mids.size() > 1) {
      for (std::size_t m = 0; m < mids.size(); ++m) {
        const auto& sibling = mid_props[(m + 1) % mids.size()];
        if (sibling.empty()) continue;
        const auto& [p, o] = sibling[uniform_index(rng, sibling.size())];
        b.fact(mids[m], p, o, false);
      }
    }
    for (std::size_t m = 0; m < mids.size(); ++m) {
      std::vector<std::string> leaves;
      for (std::size_t l = 0; l < options.leaves_per_mid; ++l) {
        leaves.push_back(b.entity(names.word()));
        b.fact(leaves.back(), isa, mids[m], true);
        if (mids.size() > 1) {
          std::size_t other = (m + 1 + uniform_index(rng, mids.size() - 1)) % mids.size();
          b.fact(leaves.back(), isa, mids[other], false);
        }
        if (!has_part.empty()) b.fact(leaves.back(), has_part, b.entity(names.word()), true);
      }
      if (!larger.empty()) {
        for (std::size_t l = 0; l + 1 < leaves.size(); ++l) {
          b.fact(leaves[l], larger, leaves[l + 1], true);
          b.fact(leaves[l + 1], larger, leaves[l], false);
        }
      }
    }
  }

  for (const auto& member : member_predicates) {
    for (std::size_t n = 0; n < options.counting_sets_per_predicate; ++n) {
      const int k = options.counting_k > 0 ? options.counting_k : static_cast<int>(1 + n % 5);
      auto quantity = registry.quantity_predicate(k);
      if (!quantity) throw GenerationError("no quantity predicate for count " + std::to_string(k));
      const std::string group = b.entity("The " + capitalized(names.word()));
      b.fact(group, *quantity, member, true);
      for (int i = 0; i < k; ++i) {
        const std::string person =
            b.entity(capitalized(names.word()) + " " + capitalized(names.word()));
        b.fact(person, member, group, true);
      }
    }
  }
  return b.finish();
}

void write_tsv(std::ostream& out, const KnowledgeBase& kb) {
  const auto& reg = kb.registry();
  for (const auto& t : kb.triples()) {
    const bool quantity = reg.at(t.predicate).role == PredicateRole::Quantity;
    out << kb.surfaces().surface(t.subject) << '\t' << t.predicate << '\t'
        << (quantity ? t.object : kb.surfaces().surface(t.object)) << '\t'
        << (t.truth ? "true" : "false") << '\t' << t.source << '\n';
  }
}

}  // namespace kbr
