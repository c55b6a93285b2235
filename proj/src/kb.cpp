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

#include "kbr/kb.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "kbr/error.hpp"

namespace kbr {

namespace {

// Plain union-find over dense ids.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    // Smaller index wins so roots are the lexicographically first member.
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

template <class Map>
auto lookup_span(const Map& map, const std::string& key)
    -> std::span<const typename Map::mapped_type::value_type> {
  auto it = map.find(key);
  if (it == map.end()) return {};
  return it->second;
}

bool parse_truth(std::string_view text, bool& out) {
  if (text == "true" || text == "1" || text == "True" || text == "TRUE") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "False" || text == "FALSE") {
    out = false;
    return true;
  }
  return false;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

TripleFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return TripleFormat::Jsonl;
  return TripleFormat::Tsv;
}

bool TripleFilter::matches(const Triple& t, const PredicateRegistry& registry) const {
  if (subject && t.subject != *subject) return false;
  if (predicate && t.predicate != *predicate) return false;
  if (object && t.object != *object) return false;
  if (truth && t.truth != *truth) return false;
  if (role) {
    const Predicate* p = registry.find(t.predicate);
    if (p == nullptr || p->role != *role) return false;
  }
  return true;
}

std::string TripleFilter::describe() const {
  std::vector<std::string> parts;
  if (subject) parts.push_back("subject=" + *subject);
  if (predicate) parts.push_back("predicate=" + *predicate);
  if (object) parts.push_back("object=" + *object);
  if (truth) parts.push_back(std::string("truth=") + (*truth ? "true" : "false"));
  if (role) parts.push_back("role=" + std::string(to_string(*role)));
  if (parts.empty()) return "{}";
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + "}";
}

KnowledgeBase::KnowledgeBase(const PredicateRegistry& registry) : registry_(&registry) {}

KnowledgeBase::KnowledgeBase(const PredicateRegistry& registry, std::vector<Triple> triples,
                             SurfaceForms surfaces)
    : registry_(&registry), triples_(std::move(triples)), surfaces_(std::move(surfaces)) {
  std::unordered_map<TripleKey, std::size_t> seen;
  std::vector<Triple> unique;
  unique.reserve(triples_.size());
  for (auto& t : triples_) {
    if (!registry.contains(t.predicate)) {
      throw LoadError("unknown predicate '" + t.predicate + "' in " + describe(t));
    }
    auto [it, inserted] = seen.emplace(t.key(), unique.size());
    if (inserted) {
      unique.push_back(std::move(t));
    } else if (unique[it->second].truth != t.truth) {
      throw LoadError("conflicting duplicate triple: " + describe(unique[it->second]) + " vs " +
                      describe(t));
    }
  }
  triples_ = std::move(unique);
  validate();
  idx_ = build(registry, triples_);
}

bool KnowledgeBase::is_entity_object(const Triple& t) const {
  const Predicate* p = registry_->find(t.predicate);
  return p == nullptr || p->role != PredicateRole::Quantity;
}

void KnowledgeBase::validate() const {
  const std::string hypernym = registry_->hypernym();
  std::unordered_map<std::string, std::vector<std::string>> edges;
  for (const auto& t : triples_) {
    const Predicate& p = registry_->at(t.predicate);
    if ((p.role == PredicateRole::Hypernym || p.role == PredicateRole::Meronym) &&
        t.subject == t.object) {
      throw LoadError("self edge not allowed: " + describe(t));
    }
    if (t.predicate == hypernym && t.truth) edges[t.subject].push_back(t.object);
  }
  // Iterative three-colour DFS for a cycle in the true IsA graph.
  std::unordered_map<std::string, int> colour;
  std::vector<std::string> roots;
  roots.reserve(edges.size());
  for (const auto& [s, _] : edges) roots.push_back(s);
  std::sort(roots.begin(), roots.end());
  for (const auto& root : roots) {
    if (colour[root] != 0) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto it = edges.find(node);
      if (it == edges.end() || next == it->second.size()) {
        colour[node] = 2;
        stack.pop_back();
        continue;
      }
      const std::string child = it->second[next++];
      int& c = colour[child];
      if (c == 1) throw LoadError("hypernym cycle through '" + child + "'");
      if (c == 0) {
        c = 1;
        stack.emplace_back(child, 0);
      }
    }
  }
}

KnowledgeBase::Indexes KnowledgeBase::build(const PredicateRegistry& registry,
                                            std::span<const Triple> triples) {
  Indexes idx;
  std::set<std::string> entity_set;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    const Predicate& p = registry.at(t.predicate);
    idx.by_key.emplace(t.key(), i);
    idx.by_subject[t.subject].push_back(i);
    idx.by_predicate[t.predicate].push_back(i);
    entity_set.insert(t.subject);
    if (p.role != PredicateRole::Quantity) {
      idx.by_object[t.object].push_back(i);
      entity_set.insert(t.object);
    }
    if (p.role == PredicateRole::Hypernym && t.truth) {
      idx.hypernyms[t.subject].push_back(t.object);
      idx.hyponyms[t.object].push_back(t.subject);
    }
    if (p.role == PredicateRole::Meronym && t.truth) idx.meronyms[t.subject].push_back(t.object);
    if (p.role == PredicateRole::Property) idx.properties[t.subject].push_back(i);
  }
  idx.entities.assign(entity_set.begin(), entity_set.end());

  std::unordered_map<std::string, std::size_t> dense;
  for (std::size_t i = 0; i < idx.entities.size(); ++i) dense.emplace(idx.entities[i], i);
  DisjointSets all(idx.entities.size());
  DisjointSets tree(idx.entities.size());
  for (const auto& t : triples) {
    const Predicate& p = registry.at(t.predicate);
    if (p.role == PredicateRole::Quantity) continue;
    all.unite(dense.at(t.subject), dense.at(t.object));
    if (p.role == PredicateRole::Hypernym && t.truth) {
      tree.unite(dense.at(t.subject), dense.at(t.object));
    }
  }
  for (std::size_t i = 0; i < idx.entities.size(); ++i) {
    idx.component.emplace(idx.entities[i], all.find(i));
    idx.tree.emplace(idx.entities[i], tree.find(i));
  }
  return idx;
}

bool KnowledgeBase::indexes_consistent() const { return build(*registry_, triples_) == idx_; }

KnowledgeBase KnowledgeBase::read(std::istream& in, TripleFormat format, std::string_view origin,
                                  const PredicateRegistry& registry) {
  std::vector<Triple> triples;
  SurfaceForms surfaces;
  std::unordered_map<TripleKey, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (format == TripleFormat::Tsv && line.front() == '#') continue;
    auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no); };

    std::string subject, predicate, object, source;
    bool truth = true;
    if (format == TripleFormat::Tsv) {
      auto fields = split_tabs(line);
      if (fields.size() < 4 || fields.size() > 5) {
        throw LoadError(where() + ": expected 5 tab-separated fields, got " +
                        std::to_string(fields.size()));
      }
      subject = fields[0];
      predicate = fields[1];
      object = fields[2];
      if (!parse_truth(fields[3], truth)) {
        throw LoadError(where() + ": bad truth value '" + std::string(fields[3]) + "'");
      }
      if (fields.size() == 5) source = fields[4];
    } else {
      try {
        auto j = nlohmann::json::parse(line);
        subject = j.at("subject").get<std::string>();
        predicate = j.at("predicate").get<std::string>();
        object = j.at("object").get<std::string>();
        const auto& jt = j.at("truth");
        if (jt.is_boolean()) {
          truth = jt.get<bool>();
        } else if (!jt.is_string() || !parse_truth(jt.get<std::string>(), truth)) {
          throw LoadError("bad truth value " + jt.dump());
        }
        source = j.value("source", std::string());
      } catch (const nlohmann::json::exception& e) {
        throw LoadError(where() + ": " + e.what());
      } catch (const LoadError& e) {
        throw LoadError(where() + ": " + e.what());
      }
    }

    const Predicate* p = registry.find(predicate);
    if (p == nullptr) throw LoadError(where() + ": unknown predicate '" + predicate + "'");
    Triple t{normalize_entity(subject), predicate, object, truth, source};
    if (t.subject.empty()) throw LoadError(where() + ": empty subject");
    if (p->role == PredicateRole::Quantity) {
      const Predicate* member = registry.find(object);
      if (member == nullptr || member->role != PredicateRole::Member) {
        throw LoadError(where() + ": quantity object '" + object + "' is not a member predicate");
      }
    } else {
      t.object = normalize_entity(object);
      if (t.object.empty()) throw LoadError(where() + ": empty object");
      surfaces.record(t.object, object);
    }
    surfaces.record(t.subject, subject);

    auto [it, inserted] = seen.emplace(t.key(), triples.size());
    if (!inserted) {
      if (triples[it->second].truth != t.truth) {
        throw LoadError(where() + ": conflicting duplicate " + describe(t) + " vs " +
                        describe(triples[it->second]));
      }
      continue;
    }
    triples.push_back(std::move(t));
  }
  try {
    return KnowledgeBase(registry, std::move(triples), std::move(surfaces));
  } catch (const LoadError& e) {
    throw LoadError(std::string(origin) + ": " + e.what());
  }
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path,
                                  const PredicateRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open triple file " + path.string());
  return read(in, format_from_path(path), path.string(), registry);
}

const Triple* KnowledgeBase::find(const TripleKey& key) const {
  auto it = idx_.by_key.find(key);
  return it == idx_.by_key.end() ? nullptr : &triples_[it->second];
}

std::optional<bool> KnowledgeBase::truth_of(const TripleKey& key) const {
  if (const Triple* t = find(key)) return t->truth;
  return std::nullopt;
}

std::span<const std::size_t> KnowledgeBase::by_subject(const std::string& subject) const {
  return lookup_span(idx_.by_subject, subject);
}

std::span<const std::size_t> KnowledgeBase::by_object(const std::string& object) const {
  return lookup_span(idx_.by_object, object);
}

std::span<const std::size_t> KnowledgeBase::by_predicate(const std::string& predicate) const {
  return lookup_span(idx_.by_predicate, predicate);
}

std::span<const std::string> KnowledgeBase::hypernyms(const std::string& subject) const {
  return lookup_span(idx_.hypernyms, subject);
}

std::span<const std::string> KnowledgeBase::hyponyms(const std::string& object) const {
  return lookup_span(idx_.hyponyms, object);
}

std::span<const std::string> KnowledgeBase::meronyms(const std::string& subject) const {
  return lookup_span(idx_.meronyms, subject);
}

std::span<const std::size_t> KnowledgeBase::properties(const std::string& subject) const {
  return lookup_span(idx_.properties, subject);
}

std::vector<std::string> KnowledgeBase::ancestors(const std::string& entity) const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen{entity};
  std::vector<std::string> frontier{entity};
  while (!frontier.empty()) {
    std::string node = std::move(frontier.back());
    frontier.pop_back();
    for (const auto& parent : hypernyms(node)) {
      if (seen.insert(parent).second) {
        out.push_back(parent);
        frontier.push_back(parent);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool KnowledgeBase::is_ancestor(const std::string& ancestor, const std::string& entity) const {
  auto all = ancestors(entity);
  return std::binary_search(all.begin(), all.end(), ancestor);
}

bool KnowledgeBase::has_entity(const std::string& id) const {
  return idx_.component.contains(id);
}

std::size_t KnowledgeBase::component(const std::string& entity) const {
  auto it = idx_.component.find(entity);
  if (it == idx_.component.end()) throw LoadError("unknown entity '" + entity + "'");
  return it->second;
}

std::size_t KnowledgeBase::hypernym_tree(const std::string& entity) const {
  auto it = idx_.tree.find(entity);
  if (it == idx_.tree.end()) throw LoadError("unknown entity '" + entity + "'");
  return it->second;
}

std::vector<std::size_t> KnowledgeBase::matching(const TripleFilter& filter) const {
  // Narrow with the most selective index available.
  std::span<const std::size_t> pool;
  bool indexed = true;
  if (filter.subject) {
    pool = by_subject(*filter.subject);
  } else if (filter.object) {
    pool = by_object(*filter.object);
  } else if (filter.predicate) {
    pool = by_predicate(*filter.predicate);
  } else {
    indexed = false;
  }
  std::vector<std::size_t> out;
  if (indexed) {
    for (auto i : pool) {
      if (filter.matches(triples_[i], *registry_)) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
  } else {
    for (std::size_t i = 0; i < triples_.size(); ++i) {
      if (filter.matches(triples_[i], *registry_)) out.push_back(i);
    }
  }
  return out;
}

const Triple& KnowledgeBase::sample_triple(const TripleFilter& filter, Rng& rng) const {
  auto candidates = matching(filter);
  if (candidates.empty()) {
    throw GenerationError("no triple satisfies constraints " + filter.describe());
  }
  return triples_[candidates[uniform_index(rng, candidates.size())]];
}

}  // namespace kbr
