// SPDX-License-Identifier: Apache-2.0
#pragma once

// Line-delimited epoch logs produced by external training loops, one JSON
// object per line:
//   {"guid": "<id>", "epoch": <int >= 0>, "probs": [<entailment>, <contradiction>, <neutral>], "gold": "<label>"}
// Extra keys are ignored. Blank lines are skipped.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cartography/completeness.hpp"
#include "cartography/epoch_record.hpp"
#include "cartography/error.hpp"
#include "cartography/label.hpp"
#include "cartography/text.hpp"

namespace cartography {

// Tolerance on |sum(probs) - 1| for logged vectors.
inline constexpr double kLogProbSumTolerance = 1e-4;

struct IngestSummary {
  std::size_t lines = 0;  // non-blank lines, one record each
  std::size_t distinct_guids = 0;
  std::size_t min_epoch = 0;
  std::size_t max_epoch = 0;
};

struct IngestResult {
  std::vector<EpochRecord> records;
  IngestSummary summary;
};

inline EpochRecord parse_log_line(std::string_view line, std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, std::string("malformed record: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_no, "record is not an object");

  const auto guid = obj.find("guid");
  const auto epoch = obj.find("epoch");
  const auto probs = obj.find("probs");
  const auto gold = obj.find("gold");
  if (guid == obj.end() || !guid->is_string()) throw ParseError(line_no, "missing or non-string 'guid'");
  if (epoch == obj.end() || !epoch->is_number_integer() || epoch->get<std::int64_t>() < 0)
    throw ParseError(line_no, "missing or invalid 'epoch' (nonnegative integer)");
  if (probs == obj.end() || !probs->is_array() || probs->size() != kNumLabels)
    throw ParseError(line_no, "'probs' must be an array of 3 numbers");
  if (gold == obj.end() || !gold->is_string()) throw ParseError(line_no, "missing or non-string 'gold'");

  EpochRecord record;
  record.guid = guid->get<std::string>();
  record.epoch = static_cast<std::size_t>(epoch->get<std::int64_t>());
  const auto label = parse_label(gold->get<std::string>());
  if (!label) throw ParseError(line_no, "unknown gold label '" + gold->get<std::string>() + "'");
  record.gold = *label;

  const std::string where = "guid '" + record.guid + "', epoch " + std::to_string(record.epoch);
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const auto& v = (*probs)[k];
    if (!v.is_number()) throw ParseError(line_no, "'probs' must be an array of 3 numbers");
    const double p = v.get<double>();
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw ParseError(line_no, where + ": probability outside [0, 1]");
    record.probs[k] = p;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kLogProbSumTolerance)
    throw ParseError(line_no, where + ": probabilities sum to " + text::format_real(sum, 10) +
                                  ", outside tolerance " + text::format_real(kLogProbSumTolerance, 3));
  for (double& p : record.probs) p /= sum;
  record.predicted = argmax_label(record.probs);
  return record;
}

inline IngestResult ingest(std::string_view input) {
  IngestResult result;
  std::set<std::string_view> guids;
  std::size_t min_epoch = std::numeric_limits<std::size_t>::max();
  std::size_t max_epoch = 0;
  const auto rows = text::lines(input);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (text::trim(rows[i]).empty()) continue;
    result.records.push_back(parse_log_line(rows[i], i + 1));
    ++result.summary.lines;
    min_epoch = std::min(min_epoch, result.records.back().epoch);
    max_epoch = std::max(max_epoch, result.records.back().epoch);
  }
  for (const EpochRecord& r : result.records) guids.insert(r.guid);
  result.summary.distinct_guids = guids.size();
  result.summary.min_epoch = result.records.empty() ? 0 : min_epoch;
  result.summary.max_epoch = max_epoch;
  return result;
}

inline IngestResult ingest_file(const std::string& path) {
  try {
    return ingest(text::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

// The same line format, as written by the trainer. `predicted` is included for
// readers and ignored on ingest.
inline std::string format_log_line(const EpochRecord& record) {
  nlohmann::json obj;
  obj["guid"] = record.guid;
  obj["epoch"] = record.epoch;
  obj["probs"] = {record.probs[0], record.probs[1], record.probs[2]};
  obj["gold"] = std::string(to_string(record.gold));
  obj["predicted"] = std::string(to_string(record.predicted));
  return obj.dump() + '\n';
}

// RecordSink adaptor that appends log lines to a stream.
inline RecordSink log_writer(std::ostream& out) {
  return [&out](const EpochRecord& r) { out << format_log_line(r); };
}

}  // namespace cartography
