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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "kbr/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result kbr_cli(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), "kbr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = kbr::cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

// Scratch directory with a small synthetic KB, removed afterwards.
struct Workspace {
  fs::path root;
  Workspace() : root(fs::temp_directory_path() / "kbr_cli_test") {
    fs::remove_all(root);
    fs::create_directories(root);
    const auto r = kbr_cli({"make-kb", "--out", kb(), "--trees", "30", "--counting-sets", "3"});
    REQUIRE(r.code == 0);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string kb() const { return (root / "kb.tsv").string(); }
  std::string path(const std::string& name) const { return (root / name).string(); }
};

std::map<std::string, std::string> hash_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), dir).string()] = kbr::sha256_file(entry.path());
    }
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("generate is byte-identical under a fixed seed, for every generator") {
  Workspace w;
  const std::vector<std::vector<std::string>> commands = {
      {"generate", "counting", "--kb", w.kb(), "--seed", "7"},
      {"generate", "taxonomy", "--kb", w.kb(), "--seed", "7", "--train", "600", "--dev", "100",
       "--test", "100", "--hypothesis-only", "50"},
      {"generate", "meronymy", "--kb", w.kb(), "--seed", "7", "--count", "100"},
      {"generate", "controlled", "--kb", w.kb(), "--seed", "7", "--train", "200", "--dev", "40",
       "--test", "40"},
      {"generate", "multiskill", "--seed", "7"},
  };
  for (const auto& cmd : commands) {
    CAPTURE(cmd[1]);
    auto first = cmd;
    first.insert(first.end(), {"--out", w.path(cmd[1] + "-a")});
    auto second = cmd;
    second.insert(second.end(), {"--out", w.path(cmd[1] + "-b")});
    const auto a = kbr_cli(first);
    REQUIRE_MESSAGE(a.code == 0, a.err);
    REQUIRE(kbr_cli(second).code == 0);
    const auto ha = hash_tree(w.path(cmd[1] + "-a"));
    CHECK(ha.contains("manifest.json"));
    CHECK(ha.contains("test.jsonl"));
    CHECK(ha == hash_tree(w.path(cmd[1] + "-b")));

    const json manifest = json::parse(slurp(w.path(cmd[1] + "-a/manifest.json")));
    CHECK(manifest["outputs"]["test.jsonl"] == ha.at("test.jsonl"));
  }
  // A different seed changes the data.
  REQUIRE(kbr_cli({"generate", "counting", "--kb", w.kb(), "--seed", "8", "--out",
                   w.path("counting-c")})
              .code == 0);
  CHECK(hash_tree(w.path("counting-c")) != hash_tree(w.path("counting-a")));
}

TEST_CASE("verify passes pristine data and names a flipped label") {
  Workspace w;
  REQUIRE(kbr_cli({"generate", "counting", "--kb", w.kb(), "--out", w.path("c")}).code == 0);
  const auto ok = kbr_cli({"verify", "--dataset", w.path("c/train.jsonl"), "--kb", w.kb()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find(": 0 failures") != std::string::npos);

  std::ifstream in(w.path("c/train.jsonl"));
  std::ofstream out(w.path("flipped.jsonl"));
  std::string line, flipped_id;
  while (std::getline(in, line)) {
    json j = json::parse(line);
    if (flipped_id.empty()) {
      flipped_id = j["id"];
      j["answer"] = 1 - j["answer"].get<int>();
    }
    out << j.dump() << "\n";
  }
  out.close();
  const auto bad = kbr_cli({"verify", "--dataset", w.path("flipped.jsonl"), "--kb", w.kb(),
                            "--report", w.path("report.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL " + flipped_id) != std::string::npos);
  CHECK(bad.out.find(": 1 failures") != std::string::npos);
  CHECK(json::parse(slurp(w.path("report.json")))["failures"][0]["id"] == flipped_id);
}

TEST_CASE("evaluate, intervene and probe write hashed reports") {
  Workspace w;
  REQUIRE(kbr_cli({"generate", "taxonomy", "--kb", w.kb(), "--train", "400", "--dev", "100",
                   "--test", "100", "--hypothesis-only", "0", "--out", w.path("t")})
              .code == 0);
  const std::string data = w.path("t/test.jsonl");
  const auto ev = kbr_cli({"evaluate", "--dataset", data, "--kb", w.kb(), "--client", "oracle",
                           "--setup", "IMPLICIT", "EXPLICIT", "--out", w.path("ev")});
  REQUIRE_MESSAGE(ev.code == 0, ev.err);
  CHECK(ev.out.find("IMPLICIT") != std::string::npos);
  const json m = json::parse(slurp(w.path("ev/manifest.json")));
  CHECK(m["client"] == "oracle");
  CHECK(m["setups"] == json{"IMPLICIT", "EXPLICIT"});
  CHECK(m["inputs"]["dataset"]["sha256"] == kbr::sha256_file(data));
  CHECK(m["outputs"]["table2.csv"] == kbr::sha256_file(w.path("ev/table2.csv")));
  const std::string table = slurp(w.path("ev/table2.csv"));
  CHECK(table.find("IMPLICIT,100,100,0,1.000000") != std::string::npos);

  // Without --kb the oracle still knows the dataset's own facts.
  const auto bare = kbr_cli({"evaluate", "--dataset", data, "--client", "oracle", "--setup",
                             "IMPLICIT", "--out", w.path("ev-nokb")});
  REQUIRE_MESSAGE(bare.code == 0, bare.err);
  CHECK(slurp(w.path("ev-nokb/table2.csv")).find("IMPLICIT,100,100,0,1.000000") !=
        std::string::npos);

  const auto iv = kbr_cli({"intervene", "--dataset", data, "--kb", w.kb(), "--client", "believer",
                           "--corruption", "0.2", "--out", w.path("iv")});
  REQUIRE_MESSAGE(iv.code == 0, iv.err);
  CHECK(slurp(w.path("iv/table3.csv")).find("overall-after-intervention,100,100,0,1.000000") !=
        std::string::npos);

  const auto pr = kbr_cli({"probe", "--dataset", data, "--kb", w.kb(), "--client", "oracle",
                           "--out", w.path("probes.jsonl")});
  REQUIRE(pr.code == 0);
  CHECK(pr.out.find(": 0 incorrect") != std::string::npos);
}

TEST_CASE("teach keeps asserted statements across runs") {
  Workspace w;
  const std::string session = w.path("session.jsonl");
  const auto first = kbr_cli({"teach", "--client", "oracle", "--kb", w.kb(), "--session", session},
                             "assert A zork is a blorp.\nlist\nquit\n");
  REQUIRE(first.code == 0);
  CHECK(first.out.find("[1] A zork is a blorp.") != std::string::npos);
  const auto second = kbr_cli(
      {"teach", "--client", "oracle", "--kb", w.kb(), "--session", session}, "list\n");
  CHECK(second.out == "[1] A zork is a blorp.\n");
}

TEST_CASE("failures exit nonzero with a message") {
  Workspace w;
  CHECK(kbr_cli({}).code != 0);
  CHECK(kbr_cli({"verify"}).code != 0);
  const auto bad_client = kbr_cli({"teach", "--client", "gpt", "--session", w.path("s.jsonl")});
  CHECK(bad_client.code == 1);
  CHECK(bad_client.err.find("unknown client 'gpt'") != std::string::npos);
  const auto bad_setup = kbr_cli({"generate", "counting", "--kb", w.kb(), "--out", w.path("c")});
  REQUIRE(bad_setup.code == 0);
  const auto r = kbr_cli({"evaluate", "--dataset", w.path("c/test.jsonl"), "--kb", w.kb(),
                          "--client", "oracle", "--setup", "IMPLICITLY", "--out", w.path("e")});
  CHECK(r.code == 1);
  CHECK(r.err.find("unknown setup 'IMPLICITLY'") != std::string::npos);

  // The endpoint variable overrides the configured endpoint; nothing listens there.
  ::setenv("KBR_ENDPOINT", "http://127.0.0.1:9", 1);
  const auto http = kbr_cli({"evaluate", "--dataset", w.path("c/test.jsonl"), "--kb", w.kb(),
                             "--client", "http", "--retries", "0", "--timeout", "2", "--setup",
                             "COUNTING_FULL", "--out", w.path("e2")});
  ::unsetenv("KBR_ENDPOINT");
  CHECK(http.code == 1);
  CHECK(http.err.find("127.0.0.1:9") != std::string::npos);
  CHECK(kbr_cli({"evaluate", "--dataset", w.path("c/test.jsonl"), "--setup", "COUNTING_FULL",
                 "--out", w.path("e3")})
            .err.find("--client is required") != std::string::npos);
}
