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

// Serial reference against the OpenMP path for the data-parallel kernels.
// Each pair of runs must produce identical output before timings count.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kbr/clients.hpp"
#include "kbr/counting.hpp"
#include "kbr/synthetic.hpp"
#include "kbr/taxonomy.hpp"
#include "kbr/verify.hpp"
#include "kbr/views.hpp"

using namespace kbr;

namespace {

double best_seconds(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    best = std::min(best, took.count());
  }
  return best;
}

struct Row {
  std::string kernel;
  std::size_t items;
  double serial;
  double parallel;
  bool identical;
};

template <class Result>
Row compare(const std::string& name, std::size_t items, int reps,
            const std::function<Result(Execution)>& kernel) {
  Result serial_out, parallel_out;
  const double s = best_seconds(reps, [&] { serial_out = kernel(Execution::Serial); });
  const double p = best_seconds(reps, [&] { parallel_out = kernel(Execution::Parallel); });
  return {name, items, s, p, serial_out == parallel_out};
}

nlohmann::json as_json(const std::vector<Example>& examples) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : examples) out.push_back(to_json(e));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  std::size_t trees = 120;
  std::size_t pairs = 4000;
  int reps = 3;
  app.add_option("--trees", trees, "synthetic KB size");
  app.add_option("--pairs", pairs, "taxonomy pairs to generate");
  app.add_option("--reps", reps, "repetitions (best time reported)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  SyntheticKbOptions o;
  o.trees = trees;
  const KnowledgeBase kb = make_synthetic_kb(o);
  const Verbalizer v = kb.verbalizer();
  TaxonomyGenerator gen(kb);
  const auto examples = gen.generate_pairs(pairs, 1, Execution::Parallel);
  const auto implicit = apply_view(Setup::Implicit, examples, v, 1, Execution::Parallel);
  std::vector<PredictRequest> requests;
  for (const auto& e : implicit) requests.push_back(make_request(e));
  const BeliefTable beliefs = corrupt_beliefs(kb, 0.2, 1, examples);
  CountingGenerator counting(kb);

  std::vector<Row> rows;
  rows.push_back(compare<nlohmann::json>("generate taxonomy", pairs, reps, [&](Execution x) {
    return as_json(gen.generate_pairs(pairs, 2, x));
  }));
  rows.push_back(compare<nlohmann::json>(
      "expand counting", counting.sets().size(), reps, [&](Execution x) {
        return as_json(expand_all(counting, 3, {}, x));
      }));
  rows.push_back(compare<nlohmann::json>("apply view", examples.size(), reps, [&](Execution x) {
    return as_json(apply_view(Setup::Explicit, examples, v, 4, x));
  }));
  rows.push_back(compare<nlohmann::json>("verify dataset", examples.size(), reps,
                                         [&](Execution x) {
                                           return verify_dataset(examples, v, x).to_json();
                                         }));
  rows.push_back(compare<std::vector<PredictResponse>>(
      "believer predict", requests.size(), reps, [&](Execution x) {
        BelieverClient client(beliefs, v, "believer", x);
        client.prepare("bench", implicit);
        return client.predict(requests);
      }));

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-18s %8s %11s %11s %8s %s\n", "kernel", "items", "serial s", "parallel s",
              "speedup", "identical");
  bool all_identical = true;
  for (const auto& r : rows) {
    std::printf("%-18s %8zu %11.4f %11.4f %8.2f %s\n", r.kernel.c_str(), r.items, r.serial,
                r.parallel, r.serial / r.parallel, r.identical ? "yes" : "NO");
    all_identical = all_identical && r.identical;
  }
  return all_identical ? 0 : 1;
}
