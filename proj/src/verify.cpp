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

#include "kbr/verify.hpp"

#include <algorithm>
#include <optional>

#include <nlohmann/json.hpp>

namespace kbr {

namespace {

bool any_raw(std::span<const Statement> statements) {
  return std::any_of(statements.begin(), statements.end(),
                     [](const Statement& s) { return s.is_raw(); });
}

}  // namespace

VerifyOutcome check_example(const Example& e, const Verbalizer& verbalizer) {
  VerifyOutcome out;
  if (!e.hypothesis.is_fact() || any_raw(e.context) || any_raw(e.withheld)) {
    out.status = VerifyStatus::Skipped;
    out.reason = "raw statement";
    return out;
  }
  const auto& registry = verbalizer.registry();
  std::vector<Statement> full = e.all_statements();
  const bool dropped = e.meta.flag(flags::kQuantityDropped);
  if (dropped) {
    const auto it = e.meta.extra.find("dropped_quantity");
    if (it == e.meta.extra.end() || !it->is_string()) {
      out.status = VerifyStatus::Fail;
      out.reason = "quantity dropped but not recorded";
      return out;
    }
    full.push_back(verbalizer.parse_any(it->get<std::string>(), StatementTag::QuantityFact));
  }
  const Triple& h = e.hypothesis.fact();
  auto fail = [&](std::string why) {
    out.status = VerifyStatus::Fail;
    out.reason = std::move(why);
    return out;
  };
  try {
    out.full = entail(full, h, registry);
    const Truth expected = e.label ? Truth::True : Truth::False;
    if (out.full.value != expected) {
      return fail("label " + std::string(e.label ? "true" : "false") + " but oracle says " +
                  std::string(to_string(out.full.value)));
    }
    const bool implicit = !e.withheld.empty() || dropped;
    const bool saturated = e.meta.kind == "counting" && e.meta.k && e.meta.K &&
                           *e.meta.k == *e.meta.K && !dropped;
    if (implicit || saturated) {
      out.alone = entail(e.context, h, registry).value;
      if (implicit && out.alone != Truth::Unknown) {
        return fail("context alone is " + std::string(to_string(out.alone)) +
                    ", expected Unknown");
      }
      if (saturated && out.alone != Truth::False) {
        return fail("k = K but context alone is " + std::string(to_string(out.alone)));
      }
    }
  } catch (const Error& ex) {
    out.oracle_error = true;
    return fail(ex.what());
  }
  return out;
}

bool verify_example(const Example& e, const Verbalizer& verbalizer) {
  const VerifyOutcome o = check_example(e, verbalizer);
  if (o.status == VerifyStatus::Skipped) {
    throw Error("example " + e.id + " cannot be verified: " + o.reason);
  }
  if (o.oracle_error) {
    throw Error("example " + e.id + ": " + o.reason);
  }
  return o.status == VerifyStatus::Pass;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& f : failures) failed.push_back({{"id", f.id}, {"reason", f.reason}});
  return {{"checked", checked}, {"skipped", skipped}, {"failures", std::move(failed)}};
}

VerifyReport verify_dataset(std::span<const Example> examples, const Verbalizer& verbalizer,
                            Execution exec) {
  std::vector<VerifyOutcome> outcomes(examples.size());
  for_each_index(examples.size(), exec,
                 [&](std::size_t i) { outcomes[i] = check_example(examples[i], verbalizer); });
  VerifyReport report;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    switch (outcomes[i].status) {
      case VerifyStatus::Skipped:
        ++report.skipped;
        break;
      case VerifyStatus::Fail:
        ++report.checked;
        report.failures.push_back({examples[i].id, outcomes[i].reason});
        break;
      case VerifyStatus::Pass:
        ++report.checked;
        break;
    }
  }
  return report;
}

}  // namespace kbr
