// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cartography/epoch_record.hpp"
#include "cartography/error.hpp"

namespace cartography {

struct CompletenessIssue {
  enum class Kind { missing, duplicate, inconsistent_gold };
  Kind kind;
  std::string guid;
  std::size_t epoch = 0;  // unused for inconsistent_gold

  std::string describe() const {
    switch (kind) {
      case Kind::missing: return "(" + guid + ", " + std::to_string(epoch) + "): missing";
      case Kind::duplicate: return "(" + guid + ", " + std::to_string(epoch) + "): duplicate";
      case Kind::inconsistent_gold: return guid + ": inconsistent gold labels";
    }
    return {};
  }
};

struct CompletenessReport {
  std::size_t epochs = 0;  // E = 1 + highest epoch index seen
  std::size_t guids = 0;
  std::vector<CompletenessIssue> issues;  // sorted by guid, then epoch

  bool ok() const noexcept { return issues.empty(); }
};

inline CompletenessReport check_completeness(const std::vector<EpochRecord>& records) {
  CompletenessReport report;
  struct Series {
    std::vector<std::size_t> counts;
    Label gold;
    bool inconsistent = false;
  };
  std::map<std::string, Series> by_guid;
  for (const EpochRecord& r : records) report.epochs = std::max(report.epochs, r.epoch + 1);
  for (const EpochRecord& r : records) {
    auto [it, fresh] = by_guid.try_emplace(r.guid, Series{std::vector<std::size_t>(report.epochs, 0), r.gold});
    ++it->second.counts[r.epoch];
    if (!fresh && it->second.gold != r.gold) it->second.inconsistent = true;
  }
  report.guids = by_guid.size();
  for (const auto& [guid, series] : by_guid) {
    if (series.inconsistent)
      report.issues.push_back({CompletenessIssue::Kind::inconsistent_gold, guid, 0});
    for (std::size_t e = 0; e < report.epochs; ++e) {
      if (series.counts[e] == 0) report.issues.push_back({CompletenessIssue::Kind::missing, guid, e});
      if (series.counts[e] > 1) report.issues.push_back({CompletenessIssue::Kind::duplicate, guid, e});
    }
  }
  return report;
}

// Confirms every guid has exactly one record for each epoch 0..E-1 with a
// consistent gold label and returns E. The error lists the first 20 offenders.
inline std::size_t validate_completeness(const std::vector<EpochRecord>& records) {
  if (records.empty()) throw CompletenessError("no epoch records");
  const CompletenessReport report = check_completeness(records);
  if (report.ok()) return report.epochs;
  std::string msg = std::to_string(report.issues.size()) + " completeness issue(s) over " +
                    std::to_string(report.epochs) + " epochs:";
  const std::size_t shown = std::min<std::size_t>(report.issues.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + report.issues[i].describe();
  if (shown < report.issues.size()) msg += "\n  ...";
  throw CompletenessError(msg);
}

}  // namespace cartography
