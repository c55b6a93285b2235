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

#include "kbr/verbalizer.hpp"

#include <algorithm>
#include <cctype>

#include "kbr/error.hpp"

namespace kbr {

namespace {

constexpr std::string_view kSubjectSlot = "SUBJ";
constexpr std::string_view kObjectSlot = "OBJ";
constexpr std::string_view kRulePrefix = "If something ";
constexpr std::string_view kRuleLink = ", then it is ";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_capture(std::string_view s) {
  return !s.empty() && !std::isspace(static_cast<unsigned char>(s.front())) &&
         !std::isspace(static_cast<unsigned char>(s.back()));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

void SurfaceForms::record(const std::string& id, std::string_view surface) {
  forms_.try_emplace(id, std::string(trim(surface)));
}

const std::string& SurfaceForms::surface(const std::string& id) const {
  auto it = forms_.find(id);
  return it == forms_.end() ? id : it->second;
}

Verbalizer::Verbalizer(const PredicateRegistry& registry, const SurfaceForms* surfaces)
    : registry_(&registry), surfaces_(surfaces) {
  for (const auto& p : registry.all()) {
    for (bool truth : {true, false}) {
      Pattern pattern = compile(truth ? p.positive : p.negative);
      pattern.predicate = &p;
      pattern.truth = truth;
      fact_patterns_.push_back(std::move(pattern));
    }
    if (!p.condition.empty()) {
      Pattern pattern = compile(p.condition);
      pattern.predicate = &p;
      condition_patterns_.push_back(std::move(pattern));
    }
    if (p.role == PredicateRole::Member) {
      singular_nouns_.emplace(lower(p.count_noun_singular), p.name);
      plural_nouns_.emplace(lower(p.count_noun_plural), p.name);
    }
  }
}

Verbalizer::Pattern Verbalizer::compile(std::string_view text) {
  Pattern pattern;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto subj = text.find(kSubjectSlot, pos);
    auto obj = text.find(kObjectSlot, pos);
    auto next = std::min(subj, obj);
    if (next == std::string_view::npos) {
      pattern.segments.push_back({false, false, std::string(text.substr(pos))});
      pattern.literal_length += text.size() - pos;
      break;
    }
    if (next > pos) {
      pattern.segments.push_back({false, false, std::string(text.substr(pos, next - pos))});
      pattern.literal_length += next - pos;
    } else if (!pattern.segments.empty() && pattern.segments.back().slot) {
      throw LoadError("template '" + std::string(text) + "' has adjacent slots");
    }
    const bool is_subject = next == subj;
    pattern.segments.push_back({true, is_subject, {}});
    pos = next + (is_subject ? kSubjectSlot.size() : kObjectSlot.size());
  }
  return pattern;
}

void Verbalizer::match(const Pattern& p, std::string_view text, std::vector<Match>& out) {
  std::string subject;
  std::string object;
  auto step = [&](auto&& self, std::size_t seg, std::size_t pos) -> void {
    if (seg == p.segments.size()) {
      if (pos == text.size()) out.push_back({&p, subject, object});
      return;
    }
    const Segment& s = p.segments[seg];
    if (!s.slot) {
      if (text.substr(pos).starts_with(s.literal)) self(self, seg + 1, pos + s.literal.size());
      return;
    }
    std::string& target = s.subject_slot ? subject : object;
    if (seg + 1 == p.segments.size()) {
      auto capture = text.substr(pos);
      if (!valid_capture(capture)) return;
      target.assign(capture);
      self(self, seg + 1, text.size());
      return;
    }
    const std::string& next = p.segments[seg + 1].literal;
    for (auto q = text.find(next, pos + 1); q != std::string_view::npos;
         q = text.find(next, q + 1)) {
      auto capture = text.substr(pos, q - pos);
      if (!valid_capture(capture)) continue;
      target.assign(capture);
      self(self, seg + 1, q);
    }
  };
  step(step, 0, 0);
}

std::vector<Verbalizer::Match> Verbalizer::best_matches(const std::vector<Pattern>& patterns,
                                                         std::string_view text) const {
  std::vector<Match> all;
  for (const auto& p : patterns) match(p, text, all);
  if (all.empty()) return all;
  std::size_t best = 0;
  for (const auto& m : all) best = std::max(best, m.pattern->literal_length);
  std::erase_if(all, [&](const Match& m) { return m.pattern->literal_length != best; });
  return all;
}

std::string Verbalizer::render(std::string_view tmpl, const std::string& subject,
                               const std::string& object) const {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl.substr(pos).starts_with(kSubjectSlot)) {
      out += subject;
      pos += kSubjectSlot.size();
    } else if (tmpl.substr(pos).starts_with(kObjectSlot)) {
      out += object;
      pos += kObjectSlot.size();
    } else {
      out.push_back(tmpl[pos++]);
    }
  }
  return out;
}

std::string Verbalizer::object_surface(const Predicate& p, const std::string& object) const {
  if (p.role != PredicateRole::Quantity) {
    return surfaces_ ? surfaces_->surface(object) : object;
  }
  const Predicate* member = registry_->find(object);
  if (member == nullptr || member->role != PredicateRole::Member) {
    throw ParseError("quantity fact '" + p.name + "' names '" + object +
                     "', which is not a member predicate");
  }
  return p.count == 1 ? member->count_noun_singular : member->count_noun_plural;
}

std::optional<std::string> Verbalizer::object_from_surface(const Predicate& p,
                                                           std::string_view surface) const {
  if (p.role != PredicateRole::Quantity) return normalize_entity(surface);
  const auto& nouns = p.count == 1 ? singular_nouns_ : plural_nouns_;
  auto it = nouns.find(lower(surface));
  if (it == nouns.end()) return std::nullopt;
  return it->second;
}

Statement Verbalizer::verbalize(const Triple& triple, StatementTag tag) const {
  const Predicate* p = registry_->find(triple.predicate);
  if (p == nullptr) throw ParseError("no template registered for predicate '" + triple.predicate + "'");
  const std::string& subject = surfaces_ ? surfaces_->surface(triple.subject) : triple.subject;
  std::string text = render(triple.truth ? p->positive : p->negative, subject,
                            object_surface(*p, triple.object));
  return Statement{std::move(text), tag, triple};
}

std::string Verbalizer::affirmative_text(const Triple& triple) const {
  return verbalize(triple.with_truth(true)).text;
}

Statement Verbalizer::verbalize(const ConditionalRule& rule) const {
  const Predicate* p = registry_->find(rule.condition_predicate);
  if (p == nullptr || p->condition.empty()) {
    throw ParseError("predicate '" + rule.condition_predicate + "' has no condition template");
  }
  std::string condition = render(p->condition, "", object_surface(*p, rule.condition_object));
  std::string text = std::string(kRulePrefix) + condition + std::string(kRuleLink) +
                     (rule.polarity ? "a " : "not a ") + rule.group + ".";
  return Statement{std::move(text), StatementTag::ControlledRule, rule};
}

Triple Verbalizer::parse(std::string_view raw) const {
  const std::string_view text = trim(raw);
  auto matches = best_matches(fact_patterns_, text);
  std::vector<Triple> readings;
  for (const auto& m : matches) {
    auto object = object_from_surface(*m.pattern->predicate, m.object);
    if (!object) continue;
    Triple t{normalize_entity(m.subject), m.pattern->predicate->name, *object,
             m.pattern->truth, {}};
    if (std::find(readings.begin(), readings.end(), t) == readings.end()) {
      readings.push_back(std::move(t));
    }
  }
  if (readings.empty()) {
    throw ParseError("no template matches '" + std::string(text) + "'");
  }
  if (readings.size() > 1) {
    std::string msg = "ambiguous statement '" + std::string(text) + "', candidates:";
    for (const auto& t : readings) msg += " " + describe(t);
    throw ParseError(msg);
  }
  return readings.front();
}

ConditionalRule Verbalizer::parse_rule(std::string_view raw) const {
  const std::string_view text = trim(raw);
  if (!text.starts_with(kRulePrefix) || !text.ends_with(".")) {
    throw ParseError("not a conditional rule: '" + std::string(text) + "'");
  }
  auto link = text.rfind(kRuleLink);
  if (link == std::string_view::npos || link < kRulePrefix.size()) {
    throw ParseError("not a conditional rule: '" + std::string(text) + "'");
  }
  auto condition = text.substr(kRulePrefix.size(), link - kRulePrefix.size());
  auto conclusion = text.substr(link + kRuleLink.size());
  conclusion.remove_suffix(1);
  bool polarity = true;
  if (conclusion.starts_with("not a ")) {
    polarity = false;
    conclusion.remove_prefix(6);
  } else if (conclusion.starts_with("a ")) {
    conclusion.remove_prefix(2);
  } else {
    throw ParseError("rule conclusion must be 'a GROUP' or 'not a GROUP': '" + std::string(text) + "'");
  }
  auto matches = best_matches(condition_patterns_, condition);
  std::vector<ConditionalRule> readings;
  for (const auto& m : matches) {
    auto object = object_from_surface(*m.pattern->predicate, m.object);
    if (!object) continue;
    ConditionalRule r{m.pattern->predicate->name, *object, normalize_entity(conclusion), polarity};
    if (std::find(readings.begin(), readings.end(), r) == readings.end()) readings.push_back(r);
  }
  if (readings.empty()) {
    throw ParseError("no condition template matches '" + std::string(condition) + "'");
  }
  if (readings.size() > 1) {
    throw ParseError("ambiguous rule condition '" + std::string(condition) + "'");
  }
  return readings.front();
}

Statement Verbalizer::parse_any(std::string_view text, StatementTag tag) const {
  std::string owned(trim(text));
  if (owned.starts_with(kRulePrefix)) {
    try {
      return Statement{owned, tag, parse_rule(owned)};
    } catch (const ParseError&) {
    }
  }
  try {
    return Statement{owned, tag, parse(owned)};
  } catch (const ParseError&) {
    return Statement::raw(std::move(owned), tag);
  }
}

}  // namespace kbr
