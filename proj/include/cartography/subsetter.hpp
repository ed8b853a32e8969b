// SPDX-License-Identifier: Apache-2.0
#pragma once

// Rank samples by their training dynamics and build filtered train splits.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cartography/dataset_io.hpp"
#include "cartography/dynamics.hpp"
#include "cartography/error.hpp"
#include "cartography/random.hpp"
#include "cartography/text.hpp"

namespace cartography {

enum class Category { easy_to_learn, hard_to_learn, ambiguous, random };

constexpr std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::easy_to_learn: return "easy_to_learn";
    case Category::hard_to_learn: return "hard_to_learn";
    case Category::ambiguous: return "ambiguous";
    case Category::random: return "random";
  }
  return "";
}

inline std::optional<Category> parse_category(std::string_view s) noexcept {
  for (Category c : {Category::easy_to_learn, Category::hard_to_learn, Category::ambiguous, Category::random})
    if (to_string(c) == s) return c;
  if (s == "easy") return Category::easy_to_learn;
  if (s == "hard") return Category::hard_to_learn;
  return std::nullopt;
}

// Exact rational in (0, 1]. Quotas are floor(num * N / den) in integer arithmetic.
struct Fraction {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  constexpr std::size_t of(std::size_t n) const noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(num) * n) / den);
  }
  constexpr double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  constexpr bool valid() const noexcept { return den > 0 && num > 0 && num <= den; }

  friend constexpr bool operator==(const Fraction& a, const Fraction& b) noexcept {
    return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
  }
};

// Accepts "a/b" or a plain decimal such as "0.25".
inline std::optional<Fraction> parse_fraction(std::string_view s) {
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = text::parse_int<std::uint64_t>(s.substr(0, slash));
    const auto den = text::parse_int<std::uint64_t>(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Fraction{*num, *den};
  }
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (frac.size() > 12 || (whole.empty() && frac.empty())) return std::nullopt;
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const auto w = whole.empty() ? std::optional<std::uint64_t>(0) : text::parse_int<std::uint64_t>(whole);
  const auto f = frac.empty() ? std::optional<std::uint64_t>(0) : text::parse_int<std::uint64_t>(frac);
  if (!w || !f || *w > 1) return std::nullopt;
  return Fraction{*w * den + *f, den};
}

struct SubsetComponent {
  Category category;
  Fraction fraction;
};

struct SubsetSpec {
  std::string name;
  std::vector<SubsetComponent> components;
  std::uint64_t rank_seed = 0;               // drives the random category's permutation
  std::optional<std::uint64_t> shuffle_seed;  // when set, the materialized split is shuffled

  void validate() const {
    if (name.empty() || name.find_first_of("/\t\n") != std::string::npos)
      throw UsageError("subset name must be non-empty without '/', tab or newline");
    if (components.empty()) throw UsageError("subset '" + name + "' has no components");
    // Exact check of sum(fractions) <= 1.
    std::uint64_t num = 0, den = 1;
    for (const SubsetComponent& c : components) {
      if (!c.fraction.valid()) throw UsageError("subset '" + name + "': fractions must lie in (0, 1]");
      const std::uint64_t g = std::gcd(den, c.fraction.den);
      const std::uint64_t lcm = den / g * c.fraction.den;
      num = num * (lcm / den) + c.fraction.num * (lcm / c.fraction.den);
      den = lcm;
      const std::uint64_t r = std::gcd(num, den);
      num /= r;
      den /= r;
    }
    if (num > den) throw UsageError("subset '" + name + "': fractions sum to more than 1");
  }
};

// Total order over all guids for a category. Ties break by ascending guid.
// The random category permutes the guid-sorted list with `seed`.
inline std::vector<std::string> rank(const std::vector<TrainingDynamics>& dynamics, Category category,
                                     std::uint64_t seed = 0) {
  std::vector<const TrainingDynamics*> items;
  items.reserve(dynamics.size());
  for (const auto& d : dynamics) items.push_back(&d);
  const auto by_guid = [](const TrainingDynamics* a, const TrainingDynamics* b) { return a->guid < b->guid; };
  switch (category) {
    case Category::easy_to_learn:
      std::sort(items.begin(), items.end(), [&](auto* a, auto* b) {
        return a->confidence != b->confidence ? a->confidence > b->confidence : by_guid(a, b);
      });
      break;
    case Category::hard_to_learn:
      std::sort(items.begin(), items.end(), [&](auto* a, auto* b) {
        return a->confidence != b->confidence ? a->confidence < b->confidence : by_guid(a, b);
      });
      break;
    case Category::ambiguous:
      std::sort(items.begin(), items.end(), [&](auto* a, auto* b) {
        return a->variability != b->variability ? a->variability > b->variability : by_guid(a, b);
      });
      break;
    case Category::random: {
      std::sort(items.begin(), items.end(), by_guid);
      Rng rng(seed);
      rng.shuffle(std::span(items));
      break;
    }
  }
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto* d : items) out.push_back(d->guid);
  return out;
}

struct SelectedGuid {
  std::string guid;
  std::size_t component_index = 0;
  Category category = Category::random;

  friend bool operator==(const SelectedGuid&, const SelectedGuid&) = default;
};

struct Selection {
  std::string name;
  std::vector<SelectedGuid> members;  // in claim order
  std::optional<std::uint64_t> shuffle_seed;

  std::size_t size() const noexcept { return members.size(); }
};

// Components claim in order: each takes the top floor(fraction * N) guids of
// its ranking that no earlier component claimed, reading further down the
// ranking to fill its quota.
inline Selection select(const SubsetSpec& spec, const std::vector<TrainingDynamics>& dynamics) {
  spec.validate();
  if (dynamics.empty()) throw SelectionError("subset '" + spec.name + "': no dynamics to select from");
  const std::size_t n = dynamics.size();
  Selection out{spec.name, {}, spec.shuffle_seed};
  std::unordered_set<std::string> claimed;
  for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
    const SubsetComponent& c = spec.components[ci];
    const std::size_t quota = c.fraction.of(n);
    std::size_t taken = 0;
    for (const std::string& guid : rank(dynamics, c.category, spec.rank_seed)) {
      if (taken == quota) break;
      if (!claimed.insert(guid).second) continue;
      out.members.push_back({guid, ci, c.category});
      ++taken;
    }
    if (taken < quota)
      throw SelectionError("subset '" + spec.name + "', component " + std::to_string(ci) + " (" +
                           std::string(to_string(c.category)) + "): ranking exhausted " +
                           std::to_string(quota - taken) + " short of quota " + std::to_string(quota));
  }
  return out;
}

// The selected samples, in their original order or shuffled by `order_seed`.
inline DatasetSplit materialize(const std::vector<std::string>& guids, const DatasetSplit& train,
                                std::optional<std::uint64_t> order_seed = std::nullopt) {
  const auto index = index_by_guid(train);
  std::vector<std::size_t> positions;
  positions.reserve(guids.size());
  std::unordered_set<std::string_view> seen;
  for (const std::string& g : guids) {
    const auto it = index.find(g);
    if (it == index.end()) throw SelectionError("guid '" + g + "' is not in the train split");
    if (seen.insert(g).second) positions.push_back(it->second);
  }
  std::sort(positions.begin(), positions.end());
  if (order_seed) {
    Rng rng(*order_seed);
    rng.shuffle(std::span(positions));
  }
  DatasetSplit out{train.kind, {}};
  out.samples.reserve(positions.size());
  for (std::size_t p : positions) out.samples.push_back(train.samples[p]);
  return out;
}

inline DatasetSplit materialize(const Selection& selection, const DatasetSplit& train) {
  std::vector<std::string> guids;
  guids.reserve(selection.size());
  for (const auto& m : selection.members) guids.push_back(m.guid);
  return materialize(guids, train, selection.shuffle_seed);
}

// The nine recipes, in report order.
inline std::vector<SubsetSpec> nine_recipes(std::uint64_t seed) {
  using C = Category;
  constexpr Fraction third{1, 3}, sixth{1, 6}, ninth{1, 9}, whole{1, 1};
  std::vector<SubsetSpec> r = {
      {"full-shuffled", {{C::random, whole}}, seed, seed},
      {"random-33", {{C::random, third}}, seed, std::nullopt},
      {"easy-33", {{C::easy_to_learn, third}}, seed, std::nullopt},
      {"hard-33", {{C::hard_to_learn, third}}, seed, std::nullopt},
      {"ambiguous-33", {{C::ambiguous, third}}, seed, std::nullopt},
      {"easy+hard", {{C::easy_to_learn, sixth}, {C::hard_to_learn, sixth}}, seed, std::nullopt},
      {"easy+ambiguous", {{C::easy_to_learn, sixth}, {C::ambiguous, sixth}}, seed, std::nullopt},
      {"hard+ambiguous", {{C::hard_to_learn, sixth}, {C::ambiguous, sixth}}, seed, std::nullopt},
      {"easy+hard+ambiguous", {{C::easy_to_learn, ninth}, {C::hard_to_learn, ninth}, {C::ambiguous, ninth}}, seed,
       std::nullopt},
  };
  return r;
}

inline std::optional<SubsetSpec> find_recipe(std::string_view name, std::uint64_t seed) {
  for (auto& spec : nine_recipes(seed))
    if (spec.name == name) return spec;
  return std::nullopt;
}

// Manifest TSV: "guid component_index category", one row per selected guid in claim order.
inline std::string write_manifest(const Selection& selection) {
  std::string out = "guid\tcomponent_index\tcategory\n";
  for (const auto& m : selection.members)
    out += m.guid + '\t' + std::to_string(m.component_index) + '\t' + std::string(to_string(m.category)) + '\n';
  return out;
}

inline std::vector<SelectedGuid> parse_manifest(std::string_view input) {
  const auto rows = text::lines(input);
  if (rows.empty() || rows.front() != "guid\tcomponent_index\tcategory")
    throw SchemaError("manifest must start with header 'guid component_index category'");
  std::vector<SelectedGuid> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto f = text::split(rows[r], '\t');
    const auto idx = f.size() == 3 ? text::parse_int<std::size_t>(f[1]) : std::nullopt;
    const auto cat = f.size() == 3 ? parse_category(f[2]) : std::nullopt;
    if (!idx || !cat) throw ParseError(r + 1, "malformed manifest row");
    out.push_back({std::string(f[0]), *idx, *cat});
  }
  return out;
}

// Custom recipe file, one directive per line ('#' starts a comment):
//   name <subset name>
//   seed <integer>               ranking seed for the random category
//   shuffle <integer>            optional; shuffle the materialized split
//   component <category> <fraction>
// Categories: easy_to_learn, hard_to_learn, ambiguous, random. Fractions: "1/6" or "0.25".
inline SubsetSpec parse_subset_spec(std::string_view input) {
  SubsetSpec spec;
  const auto rows = text::lines(input);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string_view line = rows[r];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    std::vector<std::string_view> words;
    for (auto w : text::split(line, ' '))
      if (!w.empty()) words.push_back(text::trim(w));
    const std::string_view key = words[0];
    if (key == "name" && words.size() == 2) {
      spec.name = std::string(words[1]);
    } else if (key == "seed" && words.size() == 2 && text::parse_int<std::uint64_t>(words[1])) {
      spec.rank_seed = *text::parse_int<std::uint64_t>(words[1]);
    } else if (key == "shuffle" && words.size() == 2 && text::parse_int<std::uint64_t>(words[1])) {
      spec.shuffle_seed = *text::parse_int<std::uint64_t>(words[1]);
    } else if (key == "component" && words.size() == 3) {
      const auto cat = parse_category(words[1]);
      const auto frac = parse_fraction(words[2]);
      if (!cat) throw ParseError(r + 1, "unknown category '" + std::string(words[1]) + "'");
      if (!frac || !frac->valid()) throw ParseError(r + 1, "fraction must lie in (0, 1]");
      spec.components.push_back({*cat, *frac});
    } else {
      throw ParseError(r + 1, "unrecognized directive '" + std::string(line) + "'");
    }
  }
  spec.validate();
  return spec;
}

}  // namespace cartography
