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

#include "kbr/example.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "kbr/error.hpp"

namespace kbr {

using nlohmann::json;

std::vector<Statement> Example::all_statements() const {
  std::vector<Statement> out = context;
  out.insert(out.end(), withheld.begin(), withheld.end());
  return out;
}

bool Example::has_tag(StatementTag tag) const {
  auto match = [tag](const Statement& s) { return s.tag == tag; };
  return std::any_of(context.begin(), context.end(), match) ||
         std::any_of(withheld.begin(), withheld.end(), match);
}

json to_json(const Example& e) {
  json context = json::array();
  json tags = json::array();
  json polarities = json::array();
  for (const auto& s : e.context) {
    context.push_back(s.text);
    tags.push_back(std::string(to_string(s.tag)));
    if (s.is_rule()) polarities.push_back(s.rule().polarity);
  }
  json withheld = json::array();
  json withheld_tags = json::array();
  for (const auto& s : e.withheld) {
    withheld.push_back(s.text);
    withheld_tags.push_back(std::string(to_string(s.tag)));
  }

  json meta = e.meta.extra.is_object() ? e.meta.extra : json::object();
  meta["tags"] = std::move(tags);
  meta["withheld_tags"] = std::move(withheld_tags);
  meta["kind"] = e.meta.kind;
  meta["split"] = e.meta.split;
  meta["skills"] = e.meta.skills;
  meta["seed"] = e.meta.seed;
  if (e.meta.k) meta["k"] = *e.meta.k;
  if (e.meta.K) meta["K"] = *e.meta.K;
  if (e.meta.c) meta["c"] = *e.meta.c;
  if (!e.meta.ordering.empty()) meta["ordering"] = e.meta.ordering;
  if (!polarities.empty()) meta["polarities"] = std::move(polarities);
  for (const auto& [name, value] : e.meta.flags) meta[name] = value;

  return json{{"id", e.id},
              {"hypothesis", e.hypothesis.text},
              {"context", std::move(context)},
              {"withheld", std::move(withheld)},
              {"answer", e.label ? 1 : 0},
              {"meta", std::move(meta)}};
}

namespace {

constexpr const char* kReservedMeta[] = {"tags", "withheld_tags", "kind",     "split",
                                         "skills", "seed",        "k",        "K",
                                         "c",    "ordering",      "polarities"};

bool is_flag_name(const std::string& key) {
  for (const char* name : {flags::kHypernymsRemoved, flags::kDistractorsRemoved,
                           flags::kQuantityDropped, flags::kSelectivity, flags::kIntervened,
                           flags::kWithDistractors}) {
    if (key == name) return true;
  }
  return false;
}

std::vector<Statement> read_statements(const json& texts, const json* tags,
                                       const Verbalizer& verbalizer, const std::string& field) {
  std::vector<Statement> out;
  if (tags != nullptr && tags->size() != texts.size()) {
    throw LoadError(field + " has " + std::to_string(texts.size()) + " statements but " +
                    std::to_string(tags->size()) + " tags");
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    StatementTag tag = StatementTag::Plain;
    if (tags != nullptr) tag = tag_from_string((*tags)[i].get<std::string>());
    out.push_back(verbalizer.parse_any(texts[i].get<std::string>(), tag));
  }
  return out;
}

}  // namespace

Example example_from_json(const json& j, const Verbalizer& verbalizer) {
  Example e;
  e.id = j.at("id").get<std::string>();
  try {
    const json meta = j.value("meta", json::object());
    const json* tags = meta.contains("tags") ? &meta.at("tags") : nullptr;
    const json* withheld_tags = meta.contains("withheld_tags") ? &meta.at("withheld_tags") : nullptr;
    e.hypothesis = verbalizer.parse_any(j.at("hypothesis").get<std::string>());
    e.context = read_statements(j.value("context", json::array()), tags, verbalizer, "context");
    e.withheld =
        read_statements(j.value("withheld", json::array()), withheld_tags, verbalizer, "withheld");
    const json& answer = j.at("answer");
    e.label = answer.is_boolean() ? answer.get<bool>() : answer.get<int>() != 0;

    e.meta.kind = meta.value("kind", std::string());
    e.meta.split = meta.value("split", std::string());
    e.meta.skills = meta.value("skills", std::vector<std::string>{});
    e.meta.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("k")) e.meta.k = meta.at("k").get<int>();
    if (meta.contains("K")) e.meta.K = meta.at("K").get<int>();
    if (meta.contains("c")) e.meta.c = meta.at("c").get<double>();
    e.meta.ordering = meta.value("ordering", std::string());
    for (const auto& [key, value] : meta.items()) {
      if (std::find(std::begin(kReservedMeta), std::end(kReservedMeta), key) !=
          std::end(kReservedMeta)) {
        continue;
      }
      if (value.is_boolean() && is_flag_name(key)) {
        e.meta.flags[key] = value.get<bool>();
      } else {
        e.meta.extra[key] = value;
      }
    }
  } catch (const json::exception& ex) {
    throw LoadError("example " + e.id + ": " + ex.what());
  } catch (const LoadError& ex) {
    throw LoadError("example " + e.id + ": " + ex.what());
  }
  return e;
}

void write_jsonl(std::ostream& out, std::span<const Example> examples) {
  for (const auto& e : examples) out << to_json(e).dump() << '\n';
}

void write_jsonl(const std::filesystem::path& path, std::span<const Example> examples) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_jsonl(out, examples);
}

std::vector<Example> read_jsonl(std::istream& in, const Verbalizer& verbalizer,
                                std::string_view origin) {
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LoadError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(example_from_json(j, verbalizer));
  }
  return out;
}

std::vector<Example> read_jsonl(const std::filesystem::path& path, const Verbalizer& verbalizer) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open dataset " + path.string());
  return read_jsonl(in, verbalizer, path.string());
}

json dataset_stats(std::span<const Example> examples) {
  std::map<std::string, std::size_t> total, positive, hypernyms_removed, distractor_free;
  for (const auto& e : examples) {
    const std::string split = e.meta.split.empty() ? "none" : e.meta.split;
    ++total[split];
    if (e.label) ++positive[split];
    if (e.meta.flag(flags::kHypernymsRemoved)) ++hypernyms_removed[split];
    const bool any_distractor =
        std::any_of(e.context.begin(), e.context.end(),
                    [](const Statement& s) { return is_distractor(s.tag); });
    if (!any_distractor) ++distractor_free[split];
  }
  json splits = json::object();
  for (const auto& [split, n] : total) {
    const double denom = static_cast<double>(n);
    splits[split] = {
        {"count", n},
        {"true", positive[split]},
        {"false", n - positive[split]},
        {"fraction_hypernyms_removed", static_cast<double>(hypernyms_removed[split]) / denom},
        {"fraction_distractor_free", static_cast<double>(distractor_free[split]) / denom},
    };
  }
  return json{{"examples", examples.size()}, {"splits", std::move(splits)}};
}

std::string make_id(std::string_view prefix, std::size_t index, std::string_view suffix) {
  char digits[32];
  std::snprintf(digits, sizeof digits, "%07zu", index);
  std::string id = std::string(prefix) + "-" + digits;
  if (!suffix.empty()) id += "-" + std::string(suffix);
  return id;
}

}  // namespace kbr
