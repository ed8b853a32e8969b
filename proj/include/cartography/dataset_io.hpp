// SPDX-License-Identifier: Apache-2.0
#pragma once

// GLUE-style TSV splits in the SNLI schema: one header row, '\t' between
// fields, '\n' between rows, no quoting.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cartography/error.hpp"
#include "cartography/label.hpp"
#include "cartography/text.hpp"

namespace cartography {

struct Sample {
  std::string guid;
  std::string sentence1;  // premise
  std::string sentence2;  // hypothesis
  Label gold_label = Label::entailment;

  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class SplitKind { train, dev, test };

constexpr std::string_view to_string(SplitKind kind) noexcept {
  switch (kind) {
    case SplitKind::train: return "train";
    case SplitKind::dev: return "dev";
    case SplitKind::test: return "test";
  }
  return "";
}

struct DatasetSplit {
  SplitKind kind = SplitKind::train;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

// Column names for each field. Without a guid column, the 0-based index of the
// kept data row becomes the guid.
struct Schema {
  std::string sentence1 = "sentence1";
  std::string sentence2 = "sentence2";
  std::string gold_label = "gold_label";
  std::optional<std::string> guid = "pairID";
  // SNLI marks annotator no-consensus rows with "-"; these are skipped.
  std::string skip_marker = "-";

  static Schema snli() { return {}; }
};

struct ParseResult {
  DatasetSplit split;
  std::size_t skipped_rows = 0;
  std::size_t data_rows = 0;
};

namespace detail {

inline std::size_t find_column(const std::vector<std::string_view>& header, std::string_view name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("missing configured column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace detail

inline ParseResult parse_tsv(std::string_view input, const Schema& schema = Schema::snli(),
                             SplitKind kind = SplitKind::train) {
  const auto rows = text::lines(input);
  if (rows.empty()) throw SchemaError("input has no header row");

  const auto header = text::split(rows.front(), '\t');
  const std::size_t col_s1 = detail::find_column(header, schema.sentence1);
  const std::size_t col_s2 = detail::find_column(header, schema.sentence2);
  const std::size_t col_label = detail::find_column(header, schema.gold_label);
  const std::optional<std::size_t> col_guid =
      schema.guid ? std::optional(detail::find_column(header, *schema.guid)) : std::nullopt;

  ParseResult result;
  result.split.kind = kind;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line_no = r + 1;
    const auto fields = text::split(rows[r], '\t');
    if (fields.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " columns, found " +
                                    std::to_string(fields.size()));
    ++result.data_rows;

    const std::string_view label_text = fields[col_label];
    if (label_text == schema.skip_marker) {
      ++result.skipped_rows;
      continue;
    }
    const auto label = parse_label(label_text);
    if (!label) throw ParseError(line_no, "unknown gold label '" + std::string(label_text) + "'");

    Sample sample;
    sample.guid = col_guid ? std::string(fields[*col_guid]) : std::to_string(result.split.samples.size());
    sample.sentence1 = std::string(fields[col_s1]);
    sample.sentence2 = std::string(fields[col_s2]);
    sample.gold_label = *label;
    if (sample.guid.empty()) throw ParseError(line_no, "empty guid");
    if (text::trim(sample.sentence1).empty() || text::trim(sample.sentence2).empty())
      throw ParseError(line_no, "empty sentence for guid '" + sample.guid + "'");
    if (!seen.insert(sample.guid).second) throw ParseError(line_no, "duplicate guid '" + sample.guid + "'");
    result.split.samples.push_back(std::move(sample));
  }
  return result;
}

// Writes the header "gold_label sentence1 sentence2 <guid>" using the schema's
// names, so parse_tsv with the same schema restores the split exactly.
inline std::string write_tsv(const DatasetSplit& split, const Schema& schema = Schema::snli()) {
  const std::string guid_col = schema.guid.value_or("pairID");
  std::string out = schema.gold_label + '\t' + schema.sentence1 + '\t' + schema.sentence2 + '\t' + guid_col + '\n';
  std::unordered_set<std::string_view> seen;
  for (const Sample& s : split.samples) {
    for (std::string_view field : {std::string_view(s.guid), std::string_view(s.sentence1), std::string_view(s.sentence2)})
      if (field.find_first_of("\t\n") != std::string_view::npos)
        throw SerializationError("guid '" + s.guid + "': field contains a tab or newline");
    if (s.guid.empty()) throw SerializationError("sample with empty guid");
    if (text::trim(s.sentence1).empty() || text::trim(s.sentence2).empty())
      throw SerializationError("guid '" + s.guid + "': empty sentence");
    if (!seen.insert(s.guid).second) throw SerializationError("guid '" + s.guid + "' is not unique");
    out.append(to_string(s.gold_label)).append(1, '\t');
    out.append(s.sentence1).append(1, '\t');
    out.append(s.sentence2).append(1, '\t');
    out.append(s.guid).append(1, '\n');
  }
  return out;
}

inline ParseResult load_split(const std::string& path, const Schema& schema = Schema::snli(),
                              SplitKind kind = SplitKind::train) {
  try {
    return parse_tsv(text::read_file(path), schema, kind);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline void save_split(const std::string& path, const DatasetSplit& split, const Schema& schema = Schema::snli()) {
  text::write_file(path, write_tsv(split, schema));
}

// guid -> position in the split.
inline std::unordered_map<std::string, std::size_t> index_by_guid(const DatasetSplit& split) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) index.emplace(split.samples[i].guid, i);
  return index;
}

}  // namespace cartography
