// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-sample training dynamics from complete per-epoch record series:
//   confidence  = mean over epochs of probs[gold]
//   variability = population standard deviation (divide by E) of probs[gold]
//   correctness = fraction of epochs whose stored prediction equals gold
// Each series is summed in epoch order, so results do not depend on the order
// records arrive in.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cartography/completeness.hpp"
#include "cartography/epoch_record.hpp"
#include "cartography/error.hpp"
#include "cartography/text.hpp"

namespace cartography {

struct TrainingDynamics {
  std::string guid;
  double confidence = 0.0;
  double variability = 0.0;
  double correctness = 0.0;
  std::size_t epochs = 0;

  // round(correctness * E): the correctness bin in 0..E.
  std::size_t correct_epochs() const noexcept {
    return static_cast<std::size_t>(std::lround(correctness * static_cast<double>(epochs)));
  }

  friend bool operator==(const TrainingDynamics&, const TrainingDynamics&) = default;
};

inline std::vector<TrainingDynamics> compute_dynamics(const std::vector<EpochRecord>& records) {
  if (records.empty()) return {};
  const CompletenessReport report = check_completeness(records);
  if (!report.ok()) {
    const CompletenessIssue& first = report.issues.front();
    throw CompletenessError("guid '" + first.guid + "': " + first.describe());
  }
  const std::size_t epochs = report.epochs;

  std::map<std::string, std::vector<const EpochRecord*>> by_guid;
  for (const EpochRecord& r : records) {
    auto& series = by_guid[r.guid];
    if (series.empty()) series.resize(epochs, nullptr);
    series[r.epoch] = &r;
  }

  std::vector<TrainingDynamics> out;
  out.reserve(by_guid.size());
  const double n = static_cast<double>(epochs);
  for (const auto& [guid, series] : by_guid) {
    // Shifted by the first epoch so a constant series gives exactly zero spread.
    const double shift = series.front()->probs[index_of(series.front()->gold)];
    double sum = 0.0;
    std::size_t correct = 0;
    for (const EpochRecord* r : series) {
      sum += r->probs[index_of(r->gold)] - shift;
      if (r->predicted == r->gold) ++correct;
    }
    const double mean = shift + sum / n;
    double sq = 0.0;
    for (const EpochRecord* r : series) {
      const double d = r->probs[index_of(r->gold)] - mean;
      sq += d * d;
    }
    out.push_back({guid, mean, std::sqrt(sq / n), static_cast<double>(correct) / n, epochs});
  }
  return out;
}

// TSV with header "guid confidence variability correctness epochs"; reals use
// 17 significant digits.
inline std::string write_dynamics_tsv(const std::vector<TrainingDynamics>& dynamics) {
  std::string out = "guid\tconfidence\tvariability\tcorrectness\tepochs\n";
  for (const TrainingDynamics& d : dynamics) {
    if (d.guid.find_first_of("\t\n") != std::string::npos)
      throw SerializationError("guid '" + d.guid + "': contains a tab or newline");
    out += d.guid + '\t' + text::format_real(d.confidence) + '\t' + text::format_real(d.variability) + '\t' +
           text::format_real(d.correctness) + '\t' + std::to_string(d.epochs) + '\n';
  }
  return out;
}

inline std::vector<TrainingDynamics> parse_dynamics_tsv(std::string_view input) {
  const auto rows = text::lines(input);
  if (rows.empty() || rows.front() != "guid\tconfidence\tvariability\tcorrectness\tepochs")
    throw SchemaError("dynamics file must start with header 'guid confidence variability correctness epochs'");
  std::vector<TrainingDynamics> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto f = text::split(rows[r], '\t');
    if (f.size() != 5) throw ParseError(r + 1, "expected 5 columns, found " + std::to_string(f.size()));
    const auto conf = text::parse_real(f[1]);
    const auto var = text::parse_real(f[2]);
    const auto corr = text::parse_real(f[3]);
    const auto epochs = text::parse_int<std::size_t>(f[4]);
    if (!conf || !var || !corr || !epochs || *epochs == 0) throw ParseError(r + 1, "malformed dynamics row");
    if (*conf < 0 || *conf > 1 || *var < 0 || *var > 0.5 || *corr < 0 || *corr > 1)
      throw ParseError(r + 1, "dynamics value out of range for guid '" + std::string(f[0]) + "'");
    out.push_back({std::string(f[0]), *conf, *var, *corr, *epochs});
  }
  return out;
}

inline std::vector<TrainingDynamics> load_dynamics(const std::string& path) {
  try {
    return parse_dynamics_tsv(text::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

}  // namespace cartography
