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

#include "kbr/triple.hpp"

#include <cctype>

#include "kbr/error.hpp"

namespace kbr {

std::string normalize_entity(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

std::string canonical(const TripleKey& key) {
  return key.subject + "|" + key.predicate + "|" + key.object;
}

TripleKey parse_canonical(std::string_view text) {
  auto first = text.find('|');
  auto second = first == std::string_view::npos ? first : text.find('|', first + 1);
  if (second == std::string_view::npos) {
    throw LoadError("malformed canonical triple '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, first)),
          std::string(text.substr(first + 1, second - first - 1)),
          std::string(text.substr(second + 1))};
}

std::string describe(const Triple& t) {
  return "(" + t.subject + ", " + t.predicate + ", " + t.object + ", " +
         (t.truth ? "true" : "false") + ")";
}

}  // namespace kbr
