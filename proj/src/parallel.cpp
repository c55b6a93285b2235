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

#include "kbr/parallel.hpp"

#include <string>

#include "kbr/error.hpp"

namespace kbr {

Execution execution_from_string(std::string_view name) {
  if (name == "serial") return Execution::Serial;
  if (name == "parallel") return Execution::Parallel;
  throw Error("unknown execution mode '" + std::string(name) + "' (serial|parallel)");
}

}  // namespace kbr
