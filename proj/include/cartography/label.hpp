// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cartography {

// The enumerator order is the tie-break order used by every argmax.
enum class Label : std::uint8_t { entailment = 0, contradiction = 1, neutral = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {Label::entailment, Label::contradiction,
                                                             Label::neutral};

constexpr std::size_t index_of(Label label) noexcept { return static_cast<std::size_t>(label); }

constexpr std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::entailment: return "entailment";
    case Label::contradiction: return "contradiction";
    case Label::neutral: return "neutral";
  }
  return "";
}

constexpr std::optional<Label> parse_label(std::string_view text) noexcept {
  for (Label label : kAllLabels)
    if (to_string(label) == text) return label;
  return std::nullopt;
}

// First maximum wins, so ties resolve entailment < contradiction < neutral.
template <typename Probs>
constexpr Label argmax_label(const Probs& probs) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumLabels; ++i)
    if (probs[i] > probs[best]) best = i;
  return static_cast<Label>(best);
}

}  // namespace cartography
