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

#include "kbr/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include <openssl/evp.h>

#include "kbr/error.hpp"

namespace kbr {

namespace {

std::vector<std::string> accuracy_cells(const Accuracy& a) {
  return {std::to_string(a.count), std::to_string(a.correct), std::to_string(a.ties),
          format_accuracy(a.value())};
}

std::vector<std::string> row(std::initializer_list<std::string> lead, const Accuracy& a) {
  std::vector<std::string> out(lead);
  auto cells = accuracy_cells(a);
  out.insert(out.end(), cells.begin(), cells.end());
  return out;
}

std::string format_c(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", c);
  return buf;
}

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_accuracy(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

Table table2(std::span<const SetupResult> results) {
  Table t{{"setup", "count", "correct", "ties", "accuracy"}};
  for (const auto& r : results) t.push_back(row({r.name}, r.accuracy));
  return t;
}

Table table3(const CategoryTable& categories, const InterventionReport* intervention) {
  Table t{{"row", "count", "correct", "ties", "accuracy"}};
  for (auto c : {BeliefCategory::AllCorrect, BeliefCategory::SomeIncorrect,
                 BeliefCategory::AllIncorrect}) {
    t.push_back(row({std::string(to_string(c))}, categories[c]));
  }
  if (intervention != nullptr) {
    t.push_back(row({"overall-before"}, intervention->before));
    t.push_back(row({"overall-after-intervention"}, intervention->after));
    t.push_back({"fraction-beliefs-corrected", std::to_string(intervention->beliefs_probed),
                 std::to_string(intervention->beliefs_corrected), "0",
                 format_accuracy(intervention->fraction_beliefs_corrected())});
    t.push_back({"fraction-examples-corrected", std::to_string(intervention->examples),
                 std::to_string(intervention->examples_corrected), "0",
                 format_accuracy(intervention->fraction_examples_corrected())});
  }
  return t;
}

Table table4(std::span<const std::pair<std::string, std::vector<BreakdownRow>>> by_setup) {
  Table t{{"setup", "subset", "count", "correct", "ties", "accuracy"}};
  for (const auto& [setup, rows] : by_setup) {
    for (const auto& r : rows) t.push_back(row({setup, r.group}, r.accuracy));
  }
  return t;
}

Table fig5(std::span<const CurvePoint> curve) {
  Table t{{"ordering", "c", "count", "correct", "ties", "accuracy", "positives", "negatives"}};
  for (const auto& p : curve) {
    auto r = row({p.ordering, format_c(p.c)}, p.accuracy);
    r.push_back(std::to_string(p.positives));
    r.push_back(std::to_string(p.negatives));
    t.push_back(std::move(r));
  }
  return t;
}

Table table5(std::span<const BreakdownRow> rows) {
  Table t{{"group", "count", "correct", "ties", "accuracy"}};
  for (const auto& r : rows) t.push_back(row({r.group}, r.accuracy));
  return t;
}

Table template_table(const TemplateBreakdown& b) {
  Table t = table5(b.templates);
  t.push_back({"macro", std::to_string(b.templates.size()), "", "", format_accuracy(b.macro)});
  t.push_back(row({"micro"}, b.micro));
  return t;
}

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& r : table) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << quote(r[i]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(out, table);
}

void print_table(std::ostream& out, const Table& table) {
  std::vector<std::size_t> width;
  for (const auto& r : table) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : table) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

namespace {

struct DigestDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len) != 1) {
      throw Error("SHA-256 finalisation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

}  // namespace kbr
