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

// Label expressions for skill templates.
//
//   expr    := or
//   or      := and ("||" and)*
//   and     := not ("&&" not)*
//   not     := "!" not | compare
//   compare := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum | "in" list)?
//   sum     := atom (("+" | "-") atom)*
//   atom    := number | 'string' | "string" | true | false | SLOT | "(" expr ")"
//   list    := "[" expr ("," expr)* "]"
//
// SLOT is an identifier bound by the template. Comparisons need operands of
// the same type; "==" and "!=" also accept mixed types (never equal).

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace kbr {

using RuleValue = std::variant<double, std::string, bool>;
using Bindings = std::map<std::string, RuleValue>;

class LabelRule {
 public:
  /// Throws ParseError with the offending column.
  static LabelRule parse(std::string_view text);

  /// Throws Error on an unbound slot or a type mismatch.
  bool evaluate(const Bindings& bindings) const;

  /// Slot names referenced anywhere in the expression.
  const std::set<std::string>& slots() const { return slots_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::set<std::string> slots_;
};

}  // namespace kbr
