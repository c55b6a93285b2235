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

#include "kbr/label_rule.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include "kbr/error.hpp"

namespace kbr {

struct LabelRule::Node {
  enum class Kind { Literal, Slot, Not, And, Or, Compare, Add, Sub, In };
  Kind kind = Kind::Literal;
  RuleValue value;
  std::string name;  // slot name or comparison operator
  std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using Node = LabelRule::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Token {
  enum class Kind { Number, String, Ident, Op, End };
  Kind kind;
  std::string text;
  double number = 0;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("label rule '" + std::string(s) + "' column " + std::to_string(i + 1) +
                     ": " + what);
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0;
      auto [end, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc()) fail("bad number");
      const auto len = static_cast<std::size_t>(end - (s.data() + i));
      out.push_back({Token::Kind::Number, std::string(s.substr(i, len)), v, i});
      i += len;
    } else if (c == '\'' || c == '"') {
      const auto close = s.find(c, i + 1);
      if (close == std::string_view::npos) fail("unterminated string");
      out.push_back({Token::Kind::String, std::string(s.substr(i + 1, close - i - 1)), 0, i});
      i = close + 1;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Kind::Ident, std::string(s.substr(i, j - i)), 0, i});
      i = j;
    } else {
      static constexpr std::string_view kTwo[] = {"<=", ">=", "==", "!=", "&&", "||"};
      bool matched = false;
      for (auto op : kTwo) {
        if (s.substr(i, 2) == op) {
          out.push_back({Token::Kind::Op, std::string(op), 0, i});
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string_view("<>!+-()[],").find(c) == std::string_view::npos) {
        fail(std::string("unexpected character '") + c + "'");
      }
      out.push_back({Token::Kind::Op, std::string(1, c), 0, i});
      ++i;
    }
  }
  out.push_back({Token::Kind::End, "", 0, s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::set<std::string>& slots)
      : text_(text), tokens_(tokenize(text)), slots_(slots) {}

  NodePtr parse() {
    NodePtr n = parse_or();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return n;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool accept(std::string_view op) {
    if ((peek().kind == Token::Kind::Op || peek().kind == Token::Kind::Ident) &&
        peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("label rule '" + std::string(text_) + "' column " +
                     std::to_string(peek().column + 1) + ": " + what);
  }
  static NodePtr make(Node::Kind kind, std::vector<NodePtr> kids, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->kids = std::move(kids);
    n->name = std::move(name);
    return n;
  }

  NodePtr parse_or() {
    NodePtr left = parse_and();
    while (accept("||")) left = make(Node::Kind::Or, {left, parse_and()});
    return left;
  }
  NodePtr parse_and() {
    NodePtr left = parse_not();
    while (accept("&&")) left = make(Node::Kind::And, {left, parse_not()});
    return left;
  }
  NodePtr parse_not() {
    if (accept("!")) return make(Node::Kind::Not, {parse_not()});
    return parse_compare();
  }
  NodePtr parse_compare() {
    NodePtr left = parse_sum();
    for (std::string_view op : {"<=", ">=", "==", "!=", "<", ">"}) {
      if (accept(op)) return make(Node::Kind::Compare, {left, parse_sum()}, std::string(op));
    }
    if (accept("in")) {
      if (!accept("[")) fail("expected '[' after 'in'");
      std::vector<NodePtr> kids{left};
      do {
        kids.push_back(parse_or());
      } while (accept(","));
      if (!accept("]")) fail("expected ']'");
      return make(Node::Kind::In, std::move(kids));
    }
    return left;
  }
  NodePtr parse_sum() {
    NodePtr left = parse_atom();
    while (true) {
      if (accept("+")) {
        left = make(Node::Kind::Add, {left, parse_atom()});
      } else if (accept("-")) {
        left = make(Node::Kind::Sub, {left, parse_atom()});
      } else {
        return left;
      }
    }
  }
  NodePtr parse_atom() {
    const Token t = peek();
    if (accept("(")) {
      NodePtr inner = parse_or();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    auto literal = [&](RuleValue v) {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->value = std::move(v);
      return NodePtr(n);
    };
    switch (t.kind) {
      case Token::Kind::Number:
        return literal(t.number);
      case Token::Kind::String:
        return literal(t.text);
      case Token::Kind::Ident: {
        if (t.text == "true") return literal(true);
        if (t.text == "false") return literal(false);
        if (t.text == "in") fail("unexpected 'in'");
        ++pos_;
        slots_.insert(t.text);
        return make(Node::Kind::Slot, {}, t.text);
      }
      default:
        fail(t.kind == Token::Kind::End ? "unexpected end" : "unexpected '" + t.text + "'");
    }
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::set<std::string>& slots_;
};

std::string type_name(const RuleValue& v) {
  return std::holds_alternative<double>(v) ? "number"
         : std::holds_alternative<bool>(v) ? "boolean"
                                           : "string";
}

RuleValue eval(const Node& n, const Bindings& b, const std::string& text) {
  auto fail = [&](const std::string& what) -> RuleValue {
    throw Error("label rule '" + text + "': " + what);
  };
  auto as_bool = [&](const Node& kid) {
    RuleValue v = eval(kid, b, text);
    if (!std::holds_alternative<bool>(v)) fail("expected boolean, got " + type_name(v));
    return std::get<bool>(v);
  };
  auto as_number = [&](const Node& kid) {
    RuleValue v = eval(kid, b, text);
    if (!std::holds_alternative<double>(v)) fail("expected number, got " + type_name(v));
    return std::get<double>(v);
  };
  switch (n.kind) {
    case Node::Kind::Literal:
      return n.value;
    case Node::Kind::Slot: {
      auto it = b.find(n.name);
      if (it == b.end()) return fail("unbound slot '" + n.name + "'");
      return it->second;
    }
    case Node::Kind::Not:
      return !as_bool(*n.kids[0]);
    case Node::Kind::And:
      return as_bool(*n.kids[0]) && as_bool(*n.kids[1]);
    case Node::Kind::Or:
      return as_bool(*n.kids[0]) || as_bool(*n.kids[1]);
    case Node::Kind::Add:
      return as_number(*n.kids[0]) + as_number(*n.kids[1]);
    case Node::Kind::Sub:
      return as_number(*n.kids[0]) - as_number(*n.kids[1]);
    case Node::Kind::In: {
      const RuleValue v = eval(*n.kids[0], b, text);
      for (std::size_t i = 1; i < n.kids.size(); ++i) {
        if (eval(*n.kids[i], b, text) == v) return true;
      }
      return false;
    }
    case Node::Kind::Compare: {
      const RuleValue l = eval(*n.kids[0], b, text);
      const RuleValue r = eval(*n.kids[1], b, text);
      if (n.name == "==") return l == r;
      if (n.name == "!=") return l != r;
      if (l.index() != r.index() || std::holds_alternative<bool>(l)) {
        return fail("cannot order " + type_name(l) + " and " + type_name(r));
      }
      if (n.name == "<") return l < r;
      if (n.name == "<=") return l <= r;
      if (n.name == ">") return l > r;
      return l >= r;
    }
  }
  return fail("corrupt expression");
}

}  // namespace

LabelRule LabelRule::parse(std::string_view text) {
  LabelRule rule;
  rule.text_ = std::string(text);
  rule.root_ = Parser(rule.text_, rule.slots_).parse();
  return rule;
}

bool LabelRule::evaluate(const Bindings& bindings) const {
  RuleValue v = eval(*root_, bindings, text_);
  if (!std::holds_alternative<bool>(v)) {
    throw Error("label rule '" + text_ + "' yields a " + type_name(v) + ", not a boolean");
  }
  return std::get<bool>(v);
}

}  // namespace kbr
