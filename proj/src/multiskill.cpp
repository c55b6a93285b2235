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

#include "kbr/multiskill.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "kbr/error.hpp"

namespace kbr {

namespace {

using nlohmann::json;

RuleValue value_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>();
  throw LoadError("binding values must be numbers, strings or booleans, got " + j.dump());
}

json value_to_json(const RuleValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

std::string render(const RuleValue& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    if (std::floor(*d) == *d && std::fabs(*d) < 1e15) {
      std::snprintf(buf, sizeof buf, "%.0f", *d);
    } else {
      std::snprintf(buf, sizeof buf, "%g", *d);
    }
    return buf;
  }
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

// Placeholder names in order of appearance.
std::vector<std::string> placeholders(std::string_view pattern) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = pattern.find('{', pos)) != std::string_view::npos) {
    const auto close = pattern.find('}', pos);
    if (close == std::string_view::npos) {
      throw LoadError("unclosed '{' in pattern '" + std::string(pattern) + "'");
    }
    std::string name(pattern.substr(pos + 1, close - pos - 1));
    if (name.empty()) throw LoadError("empty placeholder in pattern '" + std::string(pattern) + "'");
    out.push_back(std::move(name));
    pos = close + 1;
  }
  return out;
}

}  // namespace

void SkillTemplate::validate() const {
  const std::string where = "template '" + name + "': ";
  std::set<std::string> bound;
  for (const auto& g : bindings) {
    if (g.slots.empty()) throw LoadError(where + "binding group without slots");
    if (g.rows.empty()) throw LoadError(where + "slot '" + g.slots.front() + "' has no values");
    for (const auto& s : g.slots) {
      if (!bound.insert(s).second) throw LoadError(where + "slot '" + s + "' bound twice");
    }
    for (const auto& row : g.rows) {
      if (row.size() != g.slots.size()) {
        throw LoadError(where + "tuple for slots starting '" + g.slots.front() + "' has " +
                        std::to_string(row.size()) + " values, expected " +
                        std::to_string(g.slots.size()));
      }
    }
  }
  std::vector<std::string> used = placeholders(hypothesis);
  for (const auto& c : context) {
    auto more = placeholders(c);
    used.insert(used.end(), more.begin(), more.end());
  }
  used.insert(used.end(), label.slots().begin(), label.slots().end());
  for (const auto& s : used) {
    if (!bound.contains(s)) throw LoadError(where + "unbound slot '" + s + "'");
  }
}

std::size_t SkillTemplate::combinations() const {
  std::size_t n = 1;
  for (const auto& g : bindings) n *= g.rows.size();
  return n;
}

SkillTemplate skill_template_from_json(const json& j) {
  SkillTemplate t;
  try {
    t.name = j.at("name").get<std::string>();
    t.skills = j.at("skills").get<std::vector<std::string>>();
    t.hypothesis = j.at("hypothesis").get<std::string>();
    t.context = j.value("context", std::vector<std::string>{});
    for (const auto& g : j.at("bindings")) {
      BindingGroup group;
      if (g.contains("slot")) {
        group.slots = {g.at("slot").get<std::string>()};
        for (const auto& v : g.at("values")) group.rows.push_back({value_from_json(v)});
      } else {
        group.slots = g.at("slots").get<std::vector<std::string>>();
        for (const auto& row : g.at("tuples")) {
          std::vector<RuleValue> values;
          for (const auto& v : row) values.push_back(value_from_json(v));
          group.rows.push_back(std::move(values));
        }
      }
      t.bindings.push_back(std::move(group));
    }
    t.label = LabelRule::parse(j.at("label").get<std::string>());
  } catch (const json::exception& e) {
    throw LoadError("template '" + t.name + "': " + e.what());
  }
  t.validate();
  return t;
}

std::vector<SkillTemplate> load_skill_templates(std::istream& in, std::string_view origin) {
  std::vector<SkillTemplate> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(skill_template_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw LoadError(std::string(origin) + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SkillTemplate> load_skill_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return load_skill_templates(in, path.string());
}

std::string fill_pattern(std::string_view pattern, const Bindings& bindings) {
  std::string out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const auto open = pattern.find('{', pos);
    if (open == std::string_view::npos) {
      out += pattern.substr(pos);
      break;
    }
    out += pattern.substr(pos, open - pos);
    const auto close = pattern.find('}', open);
    if (close == std::string_view::npos) {
      throw Error("unclosed '{' in pattern '" + std::string(pattern) + "'");
    }
    const std::string name(pattern.substr(open + 1, close - open - 1));
    auto it = bindings.find(name);
    if (it == bindings.end()) throw Error("unbound slot '" + name + "'");
    out += render(it->second);
    pos = close + 1;
  }
  return out;
}

std::vector<Example> expand_template(const SkillTemplate& t, const Verbalizer& verbalizer) {
  t.validate();
  const std::size_t total = t.combinations();
  std::vector<Example> out;
  out.reserve(total);
  std::vector<std::size_t> digit(t.bindings.size(), 0);
  for (std::size_t index = 0; index < total; ++index) {
    Bindings b;
    json record = json::object();
    for (std::size_t g = 0; g < t.bindings.size(); ++g) {
      const auto& group = t.bindings[g];
      const auto& row = group.rows[digit[g]];
      for (std::size_t s = 0; s < group.slots.size(); ++s) {
        b[group.slots[s]] = row[s];
        record[group.slots[s]] = value_to_json(row[s]);
      }
    }

    Example e;
    e.id = make_id("skill-" + t.name, index);
    e.hypothesis = verbalizer.parse_any(fill_pattern(t.hypothesis, b));
    for (const auto& c : t.context) e.context.push_back(verbalizer.parse_any(fill_pattern(c, b)));
    e.label = t.label.evaluate(b);
    e.meta.kind = "multiskill";
    e.meta.split = "test";
    e.meta.skills = t.skills;
    e.meta.extra["template"] = t.name;
    e.meta.extra["bindings"] = std::move(record);
    out.push_back(std::move(e));

    // Odometer step, last group fastest.
    for (std::size_t g = t.bindings.size(); g-- > 0;) {
      if (++digit[g] < t.bindings[g].rows.size()) break;
      digit[g] = 0;
    }
  }
  return out;
}

std::vector<Example> load_manual_multiskill(std::istream& in, std::string_view origin,
                                            const Verbalizer& verbalizer) {
  std::vector<Example> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(n) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw LoadError(where + e.what());
    }
    const std::string id = j.value("id", std::string("<no id>"));
    const auto meta = j.find("meta");
    if (meta == j.end() || !meta->contains("skills") || !(*meta)["skills"].is_array() ||
        (*meta)["skills"].empty()) {
      throw LoadError(where + "example " + id + " has no skills");
    }
    try {
      out.push_back(example_from_json(j, verbalizer));
    } catch (const std::exception& e) {
      throw LoadError(where + "example " + id + ": " + e.what());
    }
  }
  return out;
}

std::vector<Example> load_manual_multiskill(const std::filesystem::path& path,
                                            const Verbalizer& verbalizer) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return load_manual_multiskill(in, path.string(), verbalizer);
}

json skill_census(std::span<const Example> examples) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : examples) {
    for (const auto& s : e.meta.skills) ++counts[s];
  }
  return json{{"count", examples.size()}, {"skills", counts}};
}

}  // namespace kbr
