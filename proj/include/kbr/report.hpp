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

// Report files. Every CSV has a header row; accuracies are printed with six
// decimals. The same tables render as aligned text for the terminal.
//
//   table2.csv  setup,count,correct,ties,accuracy
//   table3.csv  row,count,correct,ties,accuracy
//               (belief buckets, then before/after intervention and the
//               corrected-belief and corrected-example fractions)
//   table4.csv  setup,subset,count,correct,ties,accuracy
//   fig5.csv    ordering,c,count,correct,ties,accuracy,positives,negatives
//   table5.csv  group,count,correct,ties,accuracy

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kbr/eval.hpp"

namespace kbr {

/// A table as rows of cells; the first row is the header.
using Table = std::vector<std::vector<std::string>>;

std::string format_accuracy(double value);

Table table2(std::span<const SetupResult> results);
Table table3(const CategoryTable& categories, const InterventionReport* intervention);
Table table4(std::span<const std::pair<std::string, std::vector<BreakdownRow>>> by_setup);
Table fig5(std::span<const CurvePoint> curve);
Table table5(std::span<const BreakdownRow> rows);
Table template_table(const TemplateBreakdown& breakdown);

/// RFC 4180 quoting for cells containing commas, quotes or newlines.
void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
/// Space-aligned columns.
void print_table(std::ostream& out, const Table& table);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

}  // namespace kbr
