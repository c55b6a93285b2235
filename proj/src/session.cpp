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

#include "kbr/session.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kbr/error.hpp"

namespace kbr {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string entry_line(const SessionEntry& e) {
  return json{{"text", e.text}, {"time", e.timestamp}}.dump();
}

constexpr std::string_view kHelp =
    "assert <statement>   add a statement to the context\n"
    "retract <n> | all    remove statement n, or every statement\n"
    "list                 show asserted statements\n"
    "why                  explain the last answer\n"
    "quit                 leave (the store is already saved)\n"
    "anything else is scored as a hypothesis\n";

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ------------------------------------------------------------------ store

SessionStore::SessionStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      entries_.push_back({j.at("text").get<std::string>(), j.value("time", std::string())});
    } catch (const json::exception& e) {
      throw LoadError(path_->string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void SessionStore::add(SessionEntry entry) {
  entries_.push_back(std::move(entry));
  if (!path_) return;
  std::ofstream out(*path_, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot write session file " + path_->string());
  out << entry_line(entries_.back()) << '\n';
}

SessionEntry SessionStore::retract(std::size_t n) {
  if (n == 0 || n > entries_.size()) {
    throw Error("no statement " + std::to_string(n) + " (store has " +
                std::to_string(entries_.size()) + ")");
  }
  SessionEntry removed = entries_[n - 1];
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(n - 1));
  rewrite();
  return removed;
}

void SessionStore::clear() {
  entries_.clear();
  rewrite();
}

std::vector<std::string> SessionStore::texts() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.text);
  return out;
}

void SessionStore::rewrite() const {
  if (!path_) return;
  const auto tmp = std::filesystem::path(path_->string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write session file " + tmp.string());
    for (const auto& e : entries_) out << entry_line(e) << '\n';
  }
  std::filesystem::rename(tmp, *path_);
}

// ---------------------------------------------------------------- session

TeachSession::TeachSession(ModelClient& client, const Verbalizer& verbalizer, SessionStore& store,
                           const BelieverClient* explainer, Options options)
    : client_(&client),
      verbalizer_(&verbalizer),
      store_(&store),
      explainer_(explainer),
      options_(std::move(options)) {}

double TeachSession::query(std::string_view hypothesis) {
  PredictRequest r{"teach-" + std::to_string(++queries_), store_->texts(),
                   std::string(trim(hypothesis))};
  client_->prepare("teach", {});
  const auto responses = batch_predict(*client_, std::span(&r, 1), options_.retries);
  last_ = std::move(r);
  return responses.front().p_true;
}

std::string TeachSession::handle(std::string_view line) {
  const std::string_view input = trim(line);
  if (input.empty()) return {};
  const auto space = input.find(' ');
  const std::string_view command = input.substr(0, space);
  const std::string_view arg =
      space == std::string_view::npos ? std::string_view{} : trim(input.substr(space + 1));
  try {
    if (command == "quit" || command == "exit") {
      finished_ = true;
      return {};
    }
    if (command == "help") return std::string(kHelp);
    if (command == "assert") return assert_statement(arg);
    if (command == "retract") return retract(arg);
    if (command == "list" && arg.empty()) return list();
    if (command == "why" && arg.empty()) return why();
    return answer(input);
  } catch (const std::exception& e) {
    return std::string("error: ") + e.what() + "\n";
  }
}

std::string TeachSession::answer(std::string_view hypothesis) {
  std::string out;
  if (options_.strict && verbalizer_->parse_any(hypothesis).is_raw()) {
    out += "warning: cannot parse the hypothesis; builtin clients will answer 0.5\n";
  }
  const double p = query(hypothesis);
  const char* verdict = p > 0.5 ? "true" : p < 0.5 ? "false" : "undecided";
  char buf[64];
  std::snprintf(buf, sizeof buf, "p_true = %.4f (%s)\n", p, verdict);
  return out + buf;
}

std::string TeachSession::assert_statement(std::string_view text) {
  if (text.empty()) return "usage: assert <statement>\n";
  std::string out;
  if (options_.strict && verbalizer_->parse_any(text).is_raw()) {
    out = "warning: cannot parse '" + std::string(text) +
          "'; stored as raw text, which only language-model clients can use\n";
  }
  store_->add({std::string(text), options_.clock()});
  return out + "[" + std::to_string(store_->entries().size()) + "] " + std::string(text) + "\n";
}

std::string TeachSession::retract(std::string_view arg) {
  if (arg == "all") {
    const auto n = store_->entries().size();
    store_->clear();
    return "retracted " + std::to_string(n) + " statement" + (n == 1 ? "" : "s") + "\n";
  }
  std::size_t n = 0;
  const auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (arg.empty() || ec != std::errc() || end != arg.data() + arg.size()) {
    return "usage: retract <n> | all\n";
  }
  return "retracted: " + store_->retract(n).text + "\n";
}

std::string TeachSession::list() const {
  if (store_->entries().empty()) return "(no statements)\n";
  std::string out;
  for (std::size_t i = 0; i < store_->entries().size(); ++i) {
    out += "[" + std::to_string(i + 1) + "] " + store_->entries()[i].text + "\n";
  }
  return out;
}

std::string TeachSession::why() const {
  if (!explainer_) return "why needs a builtin client (believer or oracle)\n";
  if (!last_) return "nothing asked yet\n";
  Verdict v;
  try {
    v = explainer_->explain(*last_);
  } catch (const ContradictionError& e) {
    return std::string("the statements contradict each other: ") + e.what() + "\n";
  }
  if (v.derivation.empty()) {
    return "undecided: nothing asserted or believed settles '" + last_->hypothesis + "'\n";
  }
  std::ostringstream out;
  out << to_string(v.value) << ":\n";
  // Given facts come from the store or, failing that, the belief table.
  auto asserted_index = [&](const Triple& t) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < last_->context.size(); ++i) {
      const Statement s = verbalizer_->parse_any(last_->context[i]);
      if (s.is_fact() && s.fact().key() == t.key() && s.fact().truth == t.truth) return i;
    }
    return std::nullopt;
  };
  for (std::size_t i = 0; i < v.derivation.size(); ++i) {
    const auto& step = v.derivation[i];
    out << "  " << i + 1 << ". " << verbalizer_->verbalize(step.conclusion).text << "  (";
    if (step.rule == "given") {
      if (const auto i = asserted_index(step.conclusion)) {
        out << "asserted [" << *i + 1 << "]";
      } else {
        out << "belief";
      }
    } else {
      out << step.rule;
      if (!step.premises.empty()) {
        out << " from";
        for (std::size_t k = 0; k < step.premises.size(); ++k) {
          out << (k == 0 ? " " : ", ") << step.premises[k] + 1;
        }
      }
    }
    out << ")\n";
  }
  return out.str();
}

void TeachSession::run(std::istream& in, std::ostream& out, bool prompt) {
  std::string line;
  while (!finished_) {
    if (prompt) out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    out << handle(line) << std::flush;
  }
}

}  // namespace kbr
