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

// Random small theories over a fixed vocabulary, for equivalence checks.

#include <string>
#include <vector>

#include "kbr/random.hpp"
#include "kbr/statement.hpp"

namespace kbr::testing {

struct RandomTheory {
  std::vector<Statement> statements;
  Triple hypothesis;
};

inline RandomTheory random_theory(Rng& rng, std::size_t max_statements = 12) {
  static const std::vector<std::string> entities = {"e0", "e1", "e2", "e3", "e4"};
  static const std::vector<std::string> classes = {"c0", "c1", "c2", "c3"};
  static const std::vector<std::string> objects = {"p0", "p1", "p2"};
  static const std::vector<std::string> bands = {"b0", "b1"};
  static const std::vector<std::string> groups = {"group-1", "group-2"};

  auto node = [&]() -> const std::string& {
    return bernoulli(rng, 0.5) ? pick(entities, rng) : pick(classes, rng);
  };
  auto truth = [&] { return bernoulli(rng, 0.8); };

  auto random_fact = [&]() -> Triple {
    switch (uniform_index(rng, 7)) {
      case 0:
      case 1:
        return {node(), "IsA", pick(classes, rng), truth(), {}};
      case 2:
        return {node(), "has", pick(objects, rng), truth(), {}};
      case 3:
        return {node(), "HasPart", node(), truth(), {}};
      case 4:
        return {node(), "larger than", node(), truth(), {}};
      case 5:
        return {pick(entities, rng), "band member", pick(bands, rng), truth(), {}};
      default:
        return {pick(bands, rng), bernoulli(rng, 0.5) ? "has-2" : "has-3", "band member",
                truth(), {}};
    }
  };

  RandomTheory theory;
  const std::size_t n = 1 + uniform_index(rng, max_statements);
  for (std::size_t i = 0; i < n; ++i) {
    if (bernoulli(rng, 0.2)) {
      ConditionalRule rule;
      switch (uniform_index(rng, 3)) {
        case 0:
          rule = {"IsA", pick(classes, rng), pick(groups, rng), bernoulli(rng, 0.5)};
          break;
        case 1:
          rule = {"HasPart", node(), pick(groups, rng), bernoulli(rng, 0.5)};
          break;
        default:
          rule = {"larger than", node(), pick(groups, rng), bernoulli(rng, 0.5)};
          break;
      }
      theory.statements.push_back(Statement{"rule", StatementTag::ControlledRule, rule});
    } else {
      Triple t = random_fact();
      if (t.subject == t.object) t.object = t.object == "c0" ? "c1" : "c0";
      theory.statements.push_back(Statement{"fact", StatementTag::Plain, t});
    }
  }
  if (bernoulli(rng, 0.3)) {
    theory.hypothesis = {pick(entities, rng), "band member", pick(bands, rng), true, {}};
  } else if (bernoulli(rng, 0.3)) {
    theory.hypothesis = {node(), "IsA", pick(groups, rng), true, {}};
  } else {
    theory.hypothesis = random_fact();
    theory.hypothesis.truth = true;
  }
  return theory;
}

}  // namespace kbr::testing
