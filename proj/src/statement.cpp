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

#include "kbr/statement.hpp"

#include <utility>

#include "kbr/error.hpp"

namespace kbr {

namespace {

constexpr std::pair<StatementTag, std::string_view> kTagNames[] = {
    {StatementTag::RelevantHypernym, "RelevantHypernym"},
    {StatementTag::RelevantProperty, "RelevantProperty"},
    {StatementTag::DistractorProperty, "DistractorProperty"},
    {StatementTag::DistractorHypernym, "DistractorHypernym"},
    {StatementTag::SubjectDistractor, "SubjectDistractor"},
    {StatementTag::PredicateDistractor, "PredicateDistractor"},
    {StatementTag::QuantityFact, "QuantityFact"},
    {StatementTag::MemberFact, "MemberFact"},
    {StatementTag::DistractorQuantityFact, "DistractorQuantityFact"},
    {StatementTag::DistractorMemberFact, "DistractorMemberFact"},
    {StatementTag::ControlledRule, "ControlledRule"},
    {StatementTag::Plain, "Plain"},
};

}  // namespace

std::string_view to_string(StatementTag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "Plain";
}

StatementTag tag_from_string(std::string_view name) {
  for (const auto& [t, n] : kTagNames) {
    if (n == name) return t;
  }
  throw LoadError("unknown statement tag '" + std::string(name) + "'");
}

bool is_distractor(StatementTag tag) {
  switch (tag) {
    case StatementTag::DistractorProperty:
    case StatementTag::DistractorHypernym:
    case StatementTag::SubjectDistractor:
    case StatementTag::PredicateDistractor:
    case StatementTag::DistractorQuantityFact:
    case StatementTag::DistractorMemberFact:
      return true;
    default:
      return false;
  }
}

bool is_hypernym_tag(StatementTag tag) {
  return tag == StatementTag::RelevantHypernym || tag == StatementTag::DistractorHypernym;
}

}  // namespace kbr
