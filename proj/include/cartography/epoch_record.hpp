// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>

#include "cartography/label.hpp"

namespace cartography {

using Probs = std::array<double, kNumLabels>;

// One observation of one sample at the end of one epoch. `predicted` is the
// argmax of `probs` under the fixed label tie order.
struct EpochRecord {
  std::string guid;
  std::size_t epoch = 0;
  Probs probs{};
  Label predicted = Label::entailment;
  Label gold = Label::entailment;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

using RecordSink = std::function<void(const EpochRecord&)>;

}  // namespace cartography
