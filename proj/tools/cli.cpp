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

#include "cli.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kbr/beliefs.hpp"
#include "kbr/clients.hpp"
#include "kbr/controlled.hpp"
#include "kbr/counting.hpp"
#include "kbr/error.hpp"
#include "kbr/eval.hpp"
#include "kbr/multiskill.hpp"
#include "kbr/report.hpp"
#include "kbr/session.hpp"
#include "kbr/synthetic.hpp"
#include "kbr/taxonomy.hpp"
#include "kbr/verify.hpp"

namespace kbr::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------ shared state

struct Context {
  std::istream* in;
  std::ostream* out;
  std::ostream* err;
  std::string command;
  std::string templates;  // predicate template file, empty for the default
  bool serial = false;
  std::unique_ptr<PredicateRegistry> loaded;

  Execution exec() const { return serial ? Execution::Serial : Execution::Parallel; }

  const PredicateRegistry& registry() {
    if (templates.empty()) return PredicateRegistry::builtin();
    if (!loaded) loaded = std::make_unique<PredicateRegistry>(PredicateRegistry::load(templates));
    return *loaded;
  }
};

struct KbInput {
  std::string path;
  std::optional<KnowledgeBase> kb;

  const KnowledgeBase& load(Context& ctx) {
    if (path.empty()) throw Error("--kb is required");
    if (!kb) kb = KnowledgeBase::load(path, ctx.registry());
    return *kb;
  }
  Verbalizer verbalizer(Context& ctx) {
    return path.empty() ? Verbalizer(ctx.registry()) : load(ctx).verbalizer();
  }
};

struct ClientOptions {
  std::string spec;
  double corruption = 0.0;
  std::uint64_t belief_seed = 1;
  std::string beliefs;
  std::size_t batch_size = 64;
  std::size_t in_flight = 4;
  int timeout = 120;
  int retries = 3;
};

struct BuiltClient {
  std::unique_ptr<ModelClient> client;
  const BelieverClient* builtin = nullptr;
  json settings = json::object();  // recorded in run manifests
};

void add_client_options(CLI::App* app, ClientOptions& o) {
  app->add_option("--client", o.spec,
                  "believer | oracle | file:DIR | http://HOST:PORT[/path] | http "
                  "($KBR_ENDPOINT overrides the endpoint)");
  app->add_option("--corruption", o.corruption, "believer: fraction of flipped beliefs")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--belief-seed", o.belief_seed, "believer: corruption seed");
  app->add_option("--beliefs", o.beliefs, "believer: belief table JSONL instead of --corruption")
      ->check(CLI::ExistingFile);
  app->add_option("--batch-size", o.batch_size, "http: requests per POST")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-in-flight", o.in_flight, "http: concurrent POSTs")
      ->check(CLI::PositiveNumber);
  app->add_option("--timeout", o.timeout, "http: seconds per POST")->check(CLI::PositiveNumber);
  app->add_option("--retries", o.retries, "retries after transport failures")
      ->check(CLI::NonNegativeNumber);
}

BuiltClient make_client(Context& ctx, const ClientOptions& o, KbInput& kb,
                        std::span<const Example> dataset) {
  std::string spec = o.spec;
  const char* env = std::getenv("KBR_ENDPOINT");
  const bool has_env = env != nullptr && *env != '\0';
  if (spec.empty() || spec == "http") {
    if (!has_env) throw Error("--client is required (or set KBR_ENDPOINT)");
    spec = env;
  } else if (spec.rfind("http://", 0) == 0 && has_env) {
    spec = env;
  }

  BuiltClient out;
  if (spec == "believer" || spec == "oracle") {
    const bool oracle = spec == "oracle";
    BeliefTable table;
    if (!oracle && !o.beliefs.empty()) {
      table = BeliefTable::load(o.beliefs);
    } else {
      // Without a KB the table covers only the dataset's own facts.
      const KnowledgeBase empty(ctx.registry());
      table = corrupt_beliefs(kb.path.empty() ? empty : kb.load(ctx), oracle ? 0.0 : o.corruption,
                              oracle ? 0 : o.belief_seed, dataset);
    }
    if (!oracle && !o.beliefs.empty()) {
      out.settings["beliefs"] = {{"path", o.beliefs}, {"sha256", sha256_file(o.beliefs)}};
    } else if (!oracle) {
      out.settings["corruption"] = o.corruption;
      out.settings["belief_seed"] = o.belief_seed;
    }
    out.settings["wrong_beliefs"] = table.wrong_count();
    auto client = std::make_unique<BelieverClient>(std::move(table), kb.verbalizer(ctx), spec,
                                                   ctx.exec());
    out.builtin = client.get();
    out.client = std::move(client);
  } else if (spec.rfind("file:", 0) == 0) {
    out.client = std::make_unique<FilePairClient>(spec.substr(5));
  } else if (spec.rfind("http://", 0) == 0) {
    out.settings = {{"batch_size", o.batch_size}, {"max_in_flight", o.in_flight}};
    HttpOptions h;
    h.endpoint = spec;
    h.batch_size = o.batch_size;
    h.max_in_flight = o.in_flight;
    h.timeout_seconds = o.timeout;
    out.client = std::make_unique<HttpClient>(h);
  } else {
    throw Error("unknown client '" + spec + "' (believer, oracle, file:DIR, http://...)");
  }
  out.settings["retries"] = o.retries;
  return out;
}

// --------------------------------------------------------------- outputs

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Run manifest: what went in, what came out, all by content hash.
class Manifest {
 public:
  Manifest(const Context& ctx, fs::path dir, bool record_command = true) : dir_(std::move(dir)) {
    if (record_command) body_["command"] = ctx.command;
    fs::create_directories(dir_);
  }
  json& operator[](const std::string& key) { return body_[key]; }
  void input(const std::string& role, const fs::path& path) {
    body_["inputs"][role] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  }
  void table(const std::string& name, const Table& t) {
    write_csv(dir_ / name, t);
    output(name);
  }
  void output(const std::string& name) { body_["outputs"][name] = sha256_file(dir_ / name); }
  void write() const { write_json(dir_ / "manifest.json", body_); }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  json body_ = json::object();
};

std::vector<Example> load_dataset(Context& ctx, const std::string& path, KbInput& kb) {
  auto examples = read_jsonl(fs::path(path), kb.verbalizer(ctx));
  if (examples.empty()) throw Error(path + " holds no examples");
  return examples;
}

void write_predictions(const fs::path& path, std::span<const Prediction> predictions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : predictions) {
    out << json{{"id", p.id}, {"label", p.label}, {"p_true", p.p_true}}.dump() << '\n';
  }
}

// ------------------------------------------------------------- generate

struct GenerateArgs {
  KbInput kb;
  std::string out;
  std::uint64_t seed = 1;
  SplitTargets sizes;
  bool sizes_given = false;
  // taxonomy
  double remove_hypernyms = 0.5;
  double remove_distractors = 0.2;
  std::size_t hypothesis_only = 2864;
  // meronymy
  std::size_t count = 1000;
  // controlled
  int min_distractors = 3;
  int max_distractors = 5;
  // counting
  bool no_distractors = false;
  bool include_k0 = false;
  std::string ordering = "random";
  std::string probabilities;
  double dev_fraction = 0.1;
  double test_fraction = 0.1;
  // multiskill
  std::string skill_templates;
  std::string manual;
};

void write_archive(Context& ctx, const GenerateArgs& a, const std::string& kind,
                   const std::vector<std::pair<std::string, const std::vector<Example>*>>& parts,
                   json options) {
  // No command line: archives from identical inputs must be byte-identical
  // wherever they are written.
  Manifest m(ctx, a.out, false);
  m["kind"] = kind;
  m["seed"] = a.seed;
  m["options"] = std::move(options);
  if (!a.kb.path.empty()) m["inputs"]["kb"] = sha256_file(a.kb.path);
  if (!ctx.templates.empty()) m["inputs"]["templates"] = sha256_file(ctx.templates);
  std::vector<Example> all;
  for (const auto& [name, examples] : parts) {
    const std::string file = name + ".jsonl";
    write_jsonl(m.dir() / file, *examples);
    m.output(file);
    m["counts"][name] = examples->size();
    all.insert(all.end(), examples->begin(), examples->end());
  }
  m["stats"] = dataset_stats(all);
  m.write();
  *ctx.out << "wrote " << all.size() << " " << kind << " examples to " << a.out << "\n";
}

SplitTargets sizes_or(const GenerateArgs& a, SplitTargets fallback) {
  return a.sizes_given ? a.sizes : fallback;
}

void add_generate(CLI::App& root, Context& ctx, GenerateArgs& a) {
  CLI::App* gen = root.add_subcommand("generate", "generate a dataset archive");
  gen->require_subcommand(1);

  auto common = [&](CLI::App* app, bool needs_kb) {
    auto* kb = app->add_option("--kb", a.kb.path, "knowledge base (.tsv or .jsonl)");
    if (needs_kb) kb->required()->check(CLI::ExistingFile);
    app->add_option("--out", a.out, "output directory")->required();
    app->add_option("--seed", a.seed, "random seed");
  };
  auto split_sizes = [&](CLI::App* app) {
    auto* t = app->add_option("--train", a.sizes.train, "train size");
    auto* d = app->add_option("--dev", a.sizes.dev, "dev size");
    auto* s = app->add_option("--test", a.sizes.test, "test size");
    t->needs(d, s);
    d->needs(t, s);
    s->needs(t, d);
  };

  CLI::App* tax = gen->add_subcommand("taxonomy", "hypernym inheritance examples");
  common(tax, true);
  split_sizes(tax);
  tax->add_option("--remove-hypernyms", a.remove_hypernyms, "train fraction without hypernyms")
      ->check(CLI::Range(0.0, 1.0));
  tax->add_option("--remove-distractors", a.remove_distractors,
                  "train fraction without distractors")
      ->check(CLI::Range(0.0, 1.0));
  tax->add_option("--hypothesis-only", a.hypothesis_only, "context-free train additions");
  tax->callback([&, tax] {
    a.sizes_given = tax->count("--train") > 0;
    TaxonomyOptions o;
    o.sizes = sizes_or(a, o.sizes);
    o.ablation = {a.remove_hypernyms, a.remove_distractors};
    o.hypothesis_only = a.hypothesis_only;
    o.seed = a.seed;
    o.exec = ctx.exec();
    const auto s = generate_taxonomy_dataset(a.kb.load(ctx), o);
    write_archive(ctx, a, "taxonomy", {{"train", &s.train}, {"dev", &s.dev}, {"test", &s.test}},
                  {{"train", o.sizes.train},
                   {"dev", o.sizes.dev},
                   {"test", o.sizes.test},
                   {"remove_hypernyms", a.remove_hypernyms},
                   {"remove_distractors", a.remove_distractors},
                   {"hypothesis_only", a.hypothesis_only}});
  });

  CLI::App* mer = gen->add_subcommand("meronymy", "zero-shot part-of test set");
  common(mer, true);
  mer->add_option("--count", a.count, "number of examples");
  mer->callback([&] {
    const auto test = generate_meronymy_testset(a.kb.load(ctx), a.count, a.seed, ctx.exec());
    write_archive(ctx, a, "meronymy", {{"test", &test}}, {{"count", a.count}});
  });

  CLI::App* con = gen->add_subcommand("controlled", "rule sets over imaginary groups");
  common(con, true);
  split_sizes(con);
  con->add_option("--min-distractors", a.min_distractors, "fewest false conditions");
  con->add_option("--max-distractors", a.max_distractors, "most false conditions");
  con->callback([&, con] {
    a.sizes_given = con->count("--train") > 0;
    ControlledOptions o;
    o.sizes = sizes_or(a, o.sizes);
    o.min_distractors = a.min_distractors;
    o.max_distractors = a.max_distractors;
    o.seed = a.seed;
    o.exec = ctx.exec();
    const auto s = generate_controlled_dataset(a.kb.load(ctx), o);
    write_archive(ctx, a, "controlled",
                  {{"train", &s.train}, {"dev", &s.dev}, {"test", &s.test}},
                  {{"train", o.sizes.train},
                   {"dev", o.sizes.dev},
                   {"test", o.sizes.test},
                   {"min_distractors", a.min_distractors},
                   {"max_distractors", a.max_distractors}});
  });

  CLI::App* cnt = gen->add_subcommand("counting", "member/quantity counting examples");
  common(cnt, true);
  cnt->add_flag("--no-distractors", a.no_distractors, "omit distractor facts");
  cnt->add_flag("--include-k0", a.include_k0, "add the pair with no member facts");
  cnt->add_option("--ordering", a.ordering, "random | ascending | descending")
      ->check(CLI::IsMember({"random", "ascending", "descending"}));
  cnt->add_option("--probabilities", a.probabilities,
                  "fact probability JSONL (needed by ascending/descending)")
      ->check(CLI::ExistingFile);
  cnt->add_option("--dev-fraction", a.dev_fraction, "fraction of sets for dev")
      ->check(CLI::Range(0.0, 1.0));
  cnt->add_option("--test-fraction", a.test_fraction, "fraction of sets for test")
      ->check(CLI::Range(0.0, 1.0));
  cnt->callback([&] {
    CountingDatasetOptions o;
    o.expansion.distractors = !a.no_distractors;
    o.expansion.include_k0 = a.include_k0;
    o.expansion.ordering = ordering_from_string(a.ordering);
    ProbabilityMap probs;
    if (!a.probabilities.empty()) {
      probs = read_probability_map(fs::path(a.probabilities));
      o.expansion.probabilities = &probs;
    }
    o.dev_fraction = a.dev_fraction;
    o.test_fraction = a.test_fraction;
    o.seed = a.seed;
    o.exec = ctx.exec();
    const auto s = generate_counting_dataset(a.kb.load(ctx), o);
    write_archive(ctx, a, "counting", {{"train", &s.train}, {"dev", &s.dev}, {"test", &s.test}},
                  {{"distractors", !a.no_distractors},
                   {"include_k0", a.include_k0},
                   {"ordering", a.ordering},
                   {"dev_fraction", a.dev_fraction},
                   {"test_fraction", a.test_fraction}});
  });

  CLI::App* ms = gen->add_subcommand("multiskill", "examples from skill templates");
  common(ms, false);
  a.skill_templates = (fs::path(KBR_DATA_DIR) / "skill_templates.jsonl").string();
  ms->add_option("--skill-templates", a.skill_templates, "skill template JSONL")
      ->check(CLI::ExistingFile);
  ms->add_option("--manual", a.manual, "hand-written examples to append (need meta.skills)")
      ->check(CLI::ExistingFile);
  ms->callback([&] {
    const Verbalizer v = a.kb.verbalizer(ctx);
    std::vector<Example> test;
    for (const auto& t : load_skill_templates(fs::path(a.skill_templates))) {
      auto part = expand_template(t, v);
      test.insert(test.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
    }
    if (!a.manual.empty()) {
      auto manual = load_manual_multiskill(fs::path(a.manual), v);
      test.insert(test.end(), manual.begin(), manual.end());
    }
    json options = {{"skill_templates", sha256_file(a.skill_templates)}};
    if (!a.manual.empty()) options["manual"] = sha256_file(a.manual);
    write_archive(ctx, a, "multiskill", {{"test", &test}}, std::move(options));
    write_json(fs::path(a.out) / "skills.json", skill_census(test));
  });
}

// --------------------------------------------------------------- verify

struct VerifyArgs {
  KbInput kb;
  std::string dataset;
  std::string report;
};

void add_verify(CLI::App& root, Context& ctx, VerifyArgs& a, int& status) {
  CLI::App* app = root.add_subcommand("verify", "check every label against the reasoner");
  app->add_option("--dataset", a.dataset, "examples JSONL")->required()->check(CLI::ExistingFile);
  app->add_option("--kb", a.kb.path, "knowledge base, for its surface forms")
      ->check(CLI::ExistingFile);
  app->add_option("--report", a.report, "write the JSON report here");
  app->callback([&] {
    const Verbalizer v = a.kb.verbalizer(ctx);
    const auto examples = read_jsonl(fs::path(a.dataset), v);
    const auto report = verify_dataset(examples, v, ctx.exec());
    for (const auto& f : report.failures) *ctx.out << "FAIL " << f.id << ": " << f.reason << "\n";
    *ctx.out << "verified " << report.checked << " examples (" << report.skipped
             << " skipped): " << report.failures.size() << " failures\n";
    if (!a.report.empty()) write_json(a.report, report.to_json());
    if (!report.ok()) status = 1;
  });
}

// ------------------------------------------------------------- evaluate

struct EvalArgs {
  KbInput kb;
  ClientOptions client;
  std::string dataset;
  std::vector<std::string> setups;
  std::string out;
  std::uint64_t seed = 1;
  std::string mode = "bare";
};

bool any_counting(std::span<const Example> d) {
  return std::any_of(d.begin(), d.end(), [](const Example& e) { return e.meta.k && e.meta.K; });
}
bool any_skills(std::span<const Example> d) {
  return std::any_of(d.begin(), d.end(), [](const Example& e) { return !e.meta.skills.empty(); });
}
bool any_template(std::span<const Example> d) {
  return std::any_of(d.begin(), d.end(),
                     [](const Example& e) { return e.meta.extra.contains("template"); });
}

Table prefixed(const std::string& setup, const Table& t) {
  Table out{t.front()};
  out.front().insert(out.front().begin(), "setup");
  for (std::size_t i = 1; i < t.size(); ++i) {
    out.push_back(t[i]);
    out.back().insert(out.back().begin(), setup);
  }
  return out;
}

void append_rows(Table& into, const Table& more) {
  if (into.empty()) {
    into = more;
  } else {
    into.insert(into.end(), more.begin() + 1, more.end());
  }
}

void add_evaluate(CLI::App& root, Context& ctx, EvalArgs& a) {
  CLI::App* app = root.add_subcommand("evaluate", "score a model on dataset views");
  app->add_option("--dataset", a.dataset, "examples JSONL")->required()->check(CLI::ExistingFile);
  app->add_option("--setup", a.setups, "view(s) to evaluate, e.g. IMPLICIT EXPLICIT")
      ->required();
  app->add_option("--kb", a.kb.path, "knowledge base")->check(CLI::ExistingFile);
  app->add_option("--out", a.out, "report directory")->required();
  app->add_option("--seed", a.seed, "seed for shuffling views");
  add_client_options(app, a.client);
  app->callback([&] {
    std::vector<Setup> setups;
    for (const auto& s : a.setups) setups.push_back(setup_from_string(s));
    const auto dataset = load_dataset(ctx, a.dataset, a.kb);
    auto built = make_client(ctx, a.client, a.kb, dataset);
    Manifest m(ctx, a.out);
    m["seed"] = a.seed;
    m["client"] = built.client->describe();
    m["client_settings"] = built.settings;
    m["setups"] = a.setups;
    m.input("dataset", a.dataset);
    if (!a.kb.path.empty()) m.input("kb", a.kb.path);

    RunOptions run;
    run.seed = a.seed;
    run.retries = a.client.retries;
    run.exec = ctx.exec();
    std::vector<SetupResult> results;
    Table t4, t5, templates;
    for (Setup s : setups) {
      const auto r = run_setup(dataset, s, *built.client, a.kb.verbalizer(ctx), run);
      const std::string name(to_string(s));
      const std::string file = "predictions_" + name + ".jsonl";
      write_predictions(fs::path(a.out) / file, r.predictions);
      m.output(file);
      if (any_counting(dataset)) {
        append_rows(t4, table4(std::vector<std::pair<std::string, std::vector<BreakdownRow>>>{
                            {name, counting_subsets(dataset, r.predictions)}}));
      }
      if (any_skills(dataset)) {
        append_rows(t5, prefixed(name, table5(skill_breakdown(dataset, r.predictions))));
      }
      if (any_template(dataset)) {
        append_rows(templates,
                    prefixed(name, template_table(template_breakdown(dataset, r.predictions))));
      }
      results.push_back(r);
    }
    const Table t2 = table2(results);
    m.table("table2.csv", t2);
    if (!t4.empty()) m.table("table4.csv", t4);
    if (!t5.empty()) m.table("table5.csv", t5);
    if (!templates.empty()) m.table("templates.csv", templates);
    m.write();
    print_table(*ctx.out, t2);
  });
}

// ------------------------------------------------- probe and intervene

ProbeMode probe_mode(const std::string& s) {
  if (s == "bare") return ProbeMode::Bare;
  if (s == "in-context") return ProbeMode::InContext;
  throw Error("unknown probe mode '" + s + "' (bare, in-context)");
}

void add_probe_like(CLI::App* app, EvalArgs& a, bool out_is_dir) {
  app->add_option("--dataset", a.dataset, "examples JSONL")->required()->check(CLI::ExistingFile);
  a.setups = {"IMPLICIT"};
  app->add_option("--setup", a.setups, "view whose withheld facts are probed");
  app->add_option("--kb", a.kb.path, "knowledge base")->check(CLI::ExistingFile);
  app->add_option("--out", a.out, out_is_dir ? "report directory" : "assessments JSONL")
      ->required();
  app->add_option("--seed", a.seed, "seed for shuffling views");
  app->add_option("--mode", a.mode, "bare | in-context")
      ->check(CLI::IsMember({"bare", "in-context"}));
  add_client_options(app, a.client);
}

std::vector<Example> single_view(Context& ctx, EvalArgs& a, std::span<const Example> dataset) {
  if (a.setups.size() != 1) throw Error("exactly one --setup is needed here");
  return apply_view(setup_from_string(a.setups.front()), dataset, a.kb.verbalizer(ctx), a.seed,
                    ctx.exec());
}

void add_probe(CLI::App& root, Context& ctx, EvalArgs& a) {
  CLI::App* app = root.add_subcommand("probe", "ask the model each withheld fact");
  add_probe_like(app, a, false);
  app->callback([&] {
    const auto dataset = load_dataset(ctx, a.dataset, a.kb);
    auto built = make_client(ctx, a.client, a.kb, dataset);
    const auto view = single_view(ctx, a, dataset);
    const Verbalizer v = a.kb.verbalizer(ctx);
    const auto probes = probe_dataset(view, *built.client, v, probe_mode(a.mode), a.client.retries);
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + a.out);
    std::size_t total = 0, wrong = 0;
    for (const auto& [id, list] : probes) {
      for (const auto& as : list) {
        out << json{{"id", id},
                    {"fact", as.fact.text},
                    {"truth", as.fact.fact().truth},
                    {"p_true", as.p_true},
                    {"correct", as.correct()}}
                   .dump()
            << '\n';
        ++total;
        wrong += !as.correct();
      }
    }
    *ctx.out << "probed " << total << " facts in " << probes.size() << " examples: " << wrong
             << " incorrect\n";
  });
}

void add_intervene(CLI::App& root, Context& ctx, EvalArgs& a) {
  CLI::App* app = root.add_subcommand("intervene", "belief buckets and corrected re-scoring");
  add_probe_like(app, a, true);
  app->callback([&] {
    const auto dataset = load_dataset(ctx, a.dataset, a.kb);
    auto built = make_client(ctx, a.client, a.kb, dataset);
    const auto view = single_view(ctx, a, dataset);
    const Verbalizer v = a.kb.verbalizer(ctx);
    const auto before = score_examples(view, *built.client, a.setups.front(), a.client.retries);
    const auto probes = probe_dataset(view, *built.client, v, probe_mode(a.mode), a.client.retries);
    const auto buckets = categorize_by_beliefs(view, probes, before.predictions);
    const auto report = run_intervention(view, probes, before.predictions, *built.client,
                                         a.client.retries);
    Manifest m(ctx, a.out);
    m["seed"] = a.seed;
    m["client"] = built.client->describe();
    m["client_settings"] = built.settings;
    m["setups"] = a.setups;
    m["probe_mode"] = a.mode;
    m.input("dataset", a.dataset);
    if (!a.kb.path.empty()) m.input("kb", a.kb.path);
    const Table t3 = table3(buckets, &report);
    m.table("table3.csv", t3);
    m.write();
    print_table(*ctx.out, t3);
  });
}

// ----------------------------------------------------------------- curve

struct CurveArgs {
  KbInput kb;
  ClientOptions client;
  std::string out;
  std::string probabilities;
  std::uint64_t seed = 1;
  int k = 0;
};

void add_curve(CLI::App& root, Context& ctx, CurveArgs& a) {
  CLI::App* app =
      root.add_subcommand("curve", "counting accuracy against the fraction of members shown");
  app->add_option("--kb", a.kb.path, "knowledge base")->required()->check(CLI::ExistingFile);
  app->add_option("--out", a.out, "report directory")->required();
  app->add_option("--seed", a.seed, "random seed");
  app->add_option("--k", a.k, "only sets with this many members (0: all)")
      ->check(CLI::Range(0, 5));
  app->add_option("--probabilities", a.probabilities,
                  "fact probabilities JSONL; probed from the model when absent")
      ->check(CLI::ExistingFile);
  add_client_options(app, a.client);
  app->callback([&] {
    const KnowledgeBase& kb = a.kb.load(ctx);
    auto built = make_client(ctx, a.client, a.kb, {});
    CountingGenerator gen(kb);
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < gen.sets().size(); ++i) {
      if (a.k == 0 || gen.sets()[i].K == a.k) chosen.push_back(i);
    }
    if (chosen.empty()) throw Error("no counting set matches --k " + std::to_string(a.k));

    ProbabilityMap probs;
    if (!a.probabilities.empty()) {
      probs = read_probability_map(fs::path(a.probabilities));
    } else {
      // The model's own belief in each member fact, asked without context.
      std::vector<PredictRequest> requests;
      std::vector<std::string> keys;
      const Verbalizer v = kb.verbalizer();
      for (std::size_t i : chosen) {
        for (const auto& t : gen.sets()[i].members) {
          requests.push_back({make_id("member", requests.size()), {}, v.affirmative_text(t)});
          keys.push_back(canonical(t.key()));
        }
      }
      built.client->prepare("member-probe", {});
      const auto responses = batch_predict(*built.client, requests, a.client.retries);
      for (std::size_t i = 0; i < keys.size(); ++i) probs[keys[i]] = responses[i].p_true;
    }

    Manifest m(ctx, a.out);
    m["seed"] = a.seed;
    m["client"] = built.client->describe();
    m["client_settings"] = built.settings;
    m["k"] = a.k;
    m.input("kb", a.kb.path);
    {
      std::ofstream out(fs::path(a.out) / "probabilities.jsonl", std::ios::binary);
      write_probability_map(out, probs);
    }
    m.output("probabilities.jsonl");

    std::vector<CurvePoint> curve;
    for (Ordering o : {Ordering::Ascending, Ordering::Descending}) {
      std::vector<Example> examples;
      for (std::size_t i : chosen) {
        auto part = order_by_fact_probability(gen, gen.sets()[i], i, probs, o, a.seed, true);
        examples.insert(examples.end(), part.begin(), part.end());
      }
      const auto r = score_examples(examples, *built.client, "curve-" + std::string(to_string(o)),
                                    a.client.retries);
      auto points = counting_curve(examples, r.predictions);
      curve.insert(curve.end(), points.begin(), points.end());
    }
    const Table t = fig5(curve);
    m.table("fig5.csv", t);
    m.write();
    print_table(*ctx.out, t);
  });
}

// ----------------------------------------------------------------- teach

struct TeachArgs {
  KbInput kb;
  ClientOptions client;
  std::string session = "kbr_session.jsonl";
  bool lax = false;
  bool no_prompt = false;
};

void add_teach(CLI::App& root, Context& ctx, TeachArgs& a) {
  CLI::App* app = root.add_subcommand("teach", "interactive session: assert facts, ask questions");
  app->add_option("--kb", a.kb.path, "knowledge base")->check(CLI::ExistingFile);
  app->add_option("--session", a.session, "session store (JSONL), created if missing");
  app->add_flag("--lax", a.lax, "do not warn about statements the parser cannot read");
  app->add_flag("--no-prompt", a.no_prompt, "do not print a prompt");
  add_client_options(app, a.client);
  app->callback([&] {
    auto built = make_client(ctx, a.client, a.kb, {});
    SessionStore store{fs::path(a.session)};
    TeachSession::Options o;
    o.strict = !a.lax;
    o.retries = a.client.retries;
    const Verbalizer v = a.kb.verbalizer(ctx);
    TeachSession session(*built.client, v, store, built.builtin, o);
    const bool interactive = !a.no_prompt && ctx.in == &std::cin && isatty(STDIN_FILENO);
    if (interactive) {
      *ctx.out << "kbr teach (" << built.client->describe() << "), " << store.entries().size()
               << " stored statements; 'help' lists commands\n";
    }
    session.run(*ctx.in, *ctx.out, interactive);
  });
}

// ---------------------------------------------------------------- make-kb

struct MakeKbArgs {
  std::string out;
  SyntheticKbOptions options;
};

void add_make_kb(CLI::App& root, Context& ctx, MakeKbArgs& a) {
  CLI::App* app = root.add_subcommand("make-kb", "write a synthetic knowledge base (TSV)");
  app->add_option("--out", a.out, "output .tsv")->required();
  app->add_option("--trees", a.options.trees, "taxonomy trees");
  app->add_option("--counting-sets", a.options.counting_sets_per_predicate,
                  "counting sets per member predicate");
  app->add_option("--counting-k", a.options.counting_k, "members per set (0 cycles 1..5)")
      ->check(CLI::Range(0, 5));
  app->add_option("--seed", a.options.seed, "random seed");
  app->callback([&] {
    const KnowledgeBase kb = make_synthetic_kb(a.options, ctx.registry());
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + a.out);
    write_tsv(out, kb);
    *ctx.out << "wrote " << kb.size() << " triples to " << a.out << "\n";
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Context ctx{&in, &out, &err, {}, {}, false, nullptr};
  ctx.command = "kbr";
  for (int i = 1; i < argc; ++i) ctx.command += " " + std::string(argv[i]);

  CLI::App app{"Knowledge-base reasoning datasets, verification and model evaluation", "kbr"};
  app.require_subcommand(1);
  app.add_option("--templates", ctx.templates,
                 "predicate template file (default $KBR_TEMPLATES or the shipped one)")
      ->check(CLI::ExistingFile);
  app.add_flag("--serial", ctx.serial, "run kernels on one thread");

  int status = 0;
  GenerateArgs generate;
  VerifyArgs verify;
  EvalArgs evaluate, probe, intervene;
  CurveArgs curve;
  TeachArgs teach;
  MakeKbArgs make_kb;
  add_generate(app, ctx, generate);
  add_verify(app, ctx, verify, status);
  add_evaluate(app, ctx, evaluate);
  add_probe(app, ctx, probe);
  add_intervene(app, ctx, intervene);
  add_curve(app, ctx, curve);
  add_teach(app, ctx, teach);
  add_make_kb(app, ctx, make_kb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}

}  // namespace kbr::cli
