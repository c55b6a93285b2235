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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kbr/example.hpp"
#include "kbr/label_rule.hpp"

namespace kbr {

/// Slots bound together. A single-slot group lists plain values; a
/// correlated group lists tuples substituted jointly.
struct BindingGroup {
  std::vector<std::string> slots;
  std::vector<std::vector<RuleValue>> rows;
};

/// Patterns use "{SLOT}" placeholders. Expansion walks the cross product of
/// the binding groups, first group outermost.
struct SkillTemplate {
  std::string name;
  std::vector<std::string> skills;
  std::string hypothesis;
  std::vector<std::string> context;
  std::vector<BindingGroup> bindings;
  LabelRule label;

  /// Throws LoadError naming the first unbound slot or malformed group.
  void validate() const;
  std::size_t combinations() const;
};

SkillTemplate skill_template_from_json(const nlohmann::json& j);
std::vector<SkillTemplate> load_skill_templates(std::istream& in, std::string_view origin);
std::vector<SkillTemplate> load_skill_templates(const std::filesystem::path& path);

/// "{NAME} is {AGE}" with NAME=John, AGE=30 -> "John is 30". Integral
/// numbers print without a fraction.
std::string fill_pattern(std::string_view pattern, const Bindings& bindings);

/// One example per binding combination; ids "skill-<name>-NNNNNNN".
std::vector<Example> expand_template(const SkillTemplate& t, const Verbalizer& verbalizer);

/// Hand-authored example file; every record needs a non-empty meta.skills.
std::vector<Example> load_manual_multiskill(std::istream& in, std::string_view origin,
                                            const Verbalizer& verbalizer);
std::vector<Example> load_manual_multiskill(const std::filesystem::path& path,
                                            const Verbalizer& verbalizer);

/// Examples per skill tag, plus "count" for the total: the manifest format.
nlohmann::json skill_census(std::span<const Example> examples);

}  // namespace kbr
