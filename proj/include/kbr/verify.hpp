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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kbr/example.hpp"
#include "kbr/parallel.hpp"
#include "kbr/reasoner.hpp"

namespace kbr {

enum class VerifyStatus { Pass, Fail, Skipped };

struct VerifyOutcome {
  VerifyStatus status = VerifyStatus::Pass;
  std::string reason;  // empty on Pass
  Verdict full;        // entail(context + withheld)
  Truth alone = Truth::Unknown;
  bool oracle_error = false;
};

/// Oracle check of one example:
///   - entail(context + withheld [+ dropped quantity fact]) equals the label;
///   - with implicit knowledge (withheld facts or a dropped quantity fact)
///     the context alone is Unknown;
///   - a counting example with k = K and its quantity fact in place is
///     already False from the context alone.
/// Examples with raw statements cannot be checked and come back Skipped.
/// Oracle errors (contradictions) are reported as Fail with the message.
VerifyOutcome check_example(const Example& example, const Verbalizer& verbalizer);

/// Pass/fail form; throws Error naming the example on oracle errors or when
/// the example cannot be checked.
bool verify_example(const Example& example, const Verbalizer& verbalizer);

struct VerifyFailure {
  std::string id;
  std::string reason;
};

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<VerifyFailure> failures;  // in dataset order

  bool ok() const { return failures.empty(); }
  nlohmann::json to_json() const;
};

VerifyReport verify_dataset(std::span<const Example> examples, const Verbalizer& verbalizer,
                            Execution exec = Execution::Parallel);

}  // namespace kbr
