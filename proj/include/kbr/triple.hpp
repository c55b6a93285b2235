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

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace kbr {

/// Identity of a fact irrespective of its truth value.
struct TripleKey {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const TripleKey&) const = default;
  bool operator==(const TripleKey&) const = default;
};

/// A (subject, predicate, object) atom with a truth value. Entity slots hold
/// normalized ids; see normalize_entity().
struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  bool truth = true;
  std::string source;

  TripleKey key() const { return {subject, predicate, object}; }
  Triple with_truth(bool t) const {
    Triple copy = *this;
    copy.truth = t;
    return copy;
  }

  // Source is provenance only and does not take part in identity.
  friend bool operator==(const Triple& a, const Triple& b) {
    return a.subject == b.subject && a.predicate == b.predicate &&
           a.object == b.object && a.truth == b.truth;
  }
};

/// Lowercase, trimmed, internal whitespace collapsed to single spaces.
std::string normalize_entity(std::string_view raw);

/// "subject|predicate|object"; the key format of belief tables and
/// probability maps.
std::string canonical(const TripleKey& key);
inline std::string canonical(const Triple& t) { return canonical(t.key()); }
TripleKey parse_canonical(std::string_view text);

/// "(subject, predicate, object, true)" for messages.
std::string describe(const Triple& t);

}  // namespace kbr

template <>
struct std::hash<kbr::TripleKey> {
  std::size_t operator()(const kbr::TripleKey& k) const noexcept {
    std::size_t h = std::hash<std::string>{}(k.subject);
    h = h * 1099511628211ULL ^ std::hash<std::string>{}(k.predicate);
    h = h * 1099511628211ULL ^ std::hash<std::string>{}(k.object);
    return h;
  }
};
