// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hashed bag-of-n-grams features for a premise/hypothesis pair.
//
// Terms, before hashing:
//   p1:<w>        premise unigrams        h1:<w>        hypothesis unigrams
//   p2:<w>_<v>    premise bigrams         h2:<w>_<v>    hypothesis bigrams
//   x:<w>|<v>     premise x hypothesis unigram pairs, first `cross_cap` tokens per side
// Each term maps to fnv1a64(term) mod hash_dim; collisions add their counts.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cartography/dataset_io.hpp"
#include "cartography/error.hpp"
#include "cartography/random.hpp"

namespace cartography {

struct FeatureVector {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;          // nonzero, parallel to indices

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct FeatureConfig {
  std::size_t hash_dim = std::size_t{1} << 18;
  std::size_t cross_cap = 30;
};

namespace detail {

// Decodes one UTF-8 code point starting at s[i] and advances i. Invalid bytes
// decode as themselves (one byte), so arbitrary input never throws.
inline char32_t next_code_point(std::string_view s, std::size_t& i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  char32_t cp = b0;
  if (b0 >= 0xC2 && b0 <= 0xDF) { len = 2; cp = b0 & 0x1F; }
  else if (b0 >= 0xE0 && b0 <= 0xEF) { len = 3; cp = b0 & 0x0F; }
  else if (b0 >= 0xF0 && b0 <= 0xF4) { len = 4; cp = b0 & 0x07; }
  if (len > 1) {
    if (i + len > s.size()) { ++i; return b0; }
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) { ++i; return b0; }
      cp = (cp << 6) | (b & 0x3F);
    }
  }
  i += len;
  return cp;
}

// Unicode White_Space property.
constexpr bool is_space(char32_t c) noexcept {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

// ASCII and Latin-1 punctuation/symbols, the General Punctuation block and CJK
// punctuation. Letters and digits from every script stay inside tokens.
constexpr bool is_punct(char32_t c) noexcept {
  if (c < 0x80) return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
                       (c >= 0x7B && c <= 0x7E);
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) || c == 0xD7 || c == 0xF7 ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011) || (c >= 0xFF01 && c <= 0xFF0F);
}

}  // namespace detail

// Lowercases ASCII letters (other scripts pass through verbatim) and splits on
// whitespace and punctuation; punctuation characters are dropped.
inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < sentence.size()) {
    const std::size_t start = i;
    const char32_t cp = detail::next_code_point(sentence, i);
    if (detail::is_space(cp) || detail::is_punct(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    for (std::size_t k = start; k < i; ++k) {
      const char c = sentence[k];
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// The namespaced terms for a pair, in emission order, before hashing.
inline std::vector<std::string> feature_terms(std::string_view premise, std::string_view hypothesis,
                                              std::size_t cross_cap = 30) {
  const auto p = tokenize(premise);
  const auto h = tokenize(hypothesis);
  std::vector<std::string> terms;
  const auto side = [&terms](const std::vector<std::string>& toks, std::string_view uni, std::string_view bi) {
    for (const auto& t : toks) terms.push_back(std::string(uni) + t);
    for (std::size_t i = 1; i < toks.size(); ++i) terms.push_back(std::string(bi) + toks[i - 1] + '_' + toks[i]);
  };
  side(p, "p1:", "p2:");
  side(h, "h1:", "h2:");
  const std::size_t np = std::min(p.size(), cross_cap);
  const std::size_t nh = std::min(h.size(), cross_cap);
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < nh; ++j) terms.push_back("x:" + p[i] + '|' + h[j]);
  return terms;
}

inline FeatureVector featurize(const Sample& sample, const FeatureConfig& config = {}) {
  if (!std::has_single_bit(config.hash_dim) || config.hash_dim < 2)
    throw UsageError("hash_dim must be a power of two >= 2, got " + std::to_string(config.hash_dim));
  if (config.hash_dim > (std::uint64_t{1} << 32)) throw UsageError("hash_dim must not exceed 2^32");
  const std::uint64_t mask = config.hash_dim - 1;

  std::vector<std::uint32_t> ids;
  for (const auto& term : feature_terms(sample.sentence1, sample.sentence2, config.cross_cap))
    ids.push_back(static_cast<std::uint32_t>(fnv1a64(term) & mask));
  std::sort(ids.begin(), ids.end());

  FeatureVector fv;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    fv.indices.push_back(ids[i]);
    fv.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  return fv;
}

inline FeatureVector featurize(const Sample& sample, std::size_t hash_dim) {
  return featurize(sample, FeatureConfig{hash_dim, 30});
}

}  // namespace cartography
