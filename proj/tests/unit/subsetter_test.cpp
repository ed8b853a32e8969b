// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cartography/random.hpp"
#include "cartography/subsetter.hpp"

using namespace cartography;

namespace {

TrainingDynamics dyn(std::string guid, double confidence, double variability = 0.1) {
  return {std::move(guid), confidence, variability, 0.5, 6};
}

std::vector<TrainingDynamics> random_dynamics(Rng& rng, std::size_t n, bool coarse) {
  std::vector<TrainingDynamics> out;
  for (std::size_t i = 0; i < n; ++i) {
    // Coarse values force ties.
    const double c = coarse ? static_cast<double>(rng.below(5)) / 4 : rng.unit();
    const double v = coarse ? static_cast<double>(rng.below(3)) / 6 : rng.unit() / 2;
    out.push_back({"id" + std::to_string(rng.below(1u << 30)) + "_" + std::to_string(i), c, v, 0.0, 6});
  }
  return out;
}

DatasetSplit split_for(const std::vector<TrainingDynamics>& d) {
  DatasetSplit split;
  for (const auto& x : d) split.samples.push_back({x.guid, "premise " + x.guid, "hypothesis", Label::neutral});
  return split;
}

}  // namespace

TEST(Rank, EasyAndHardBySortedConfidence) {
  const std::vector<TrainingDynamics> d = {dyn("a", 0.9), dyn("b", 0.1), dyn("c", 0.5)};
  EXPECT_EQ(rank(d, Category::easy_to_learn), (std::vector<std::string>{"a", "c", "b"}));
  EXPECT_EQ(rank(d, Category::hard_to_learn), (std::vector<std::string>{"b", "c", "a"}));
}

TEST(Rank, TiesBreakByAscendingGuid) {
  const std::vector<TrainingDynamics> d = {dyn("q", 0.3, 0.2), dyn("b", 0.6, 0.2), dyn("m", 0.1, 0.05)};
  EXPECT_EQ(rank(d, Category::ambiguous), (std::vector<std::string>{"b", "q", "m"}));
  const std::vector<TrainingDynamics> same = {dyn("z", 0.4), dyn("a", 0.4), dyn("k", 0.4)};
  EXPECT_EQ(rank(same, Category::easy_to_learn), (std::vector<std::string>{"a", "k", "z"}));
  EXPECT_EQ(rank(same, Category::hard_to_learn), (std::vector<std::string>{"a", "k", "z"}));
}

TEST(Rank, RandomIsSeededAndIndependentOfInputOrder) {
  Rng rng(4);
  auto d = random_dynamics(rng, 50, false);
  const auto a = rank(d, Category::random, 9);
  EXPECT_EQ(a, rank(d, Category::random, 9));
  EXPECT_NE(a, rank(d, Category::random, 10));
  std::reverse(d.begin(), d.end());
  EXPECT_EQ(a, rank(d, Category::random, 9));
}

TEST(Rank, TotalityAndDuality) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const bool coarse = trial % 2 == 0;
    const auto d = random_dynamics(rng, 1 + rng.below(60), coarse);
    std::set<std::string> all;
    for (const auto& x : d) all.insert(x.guid);
    for (Category c : {Category::easy_to_learn, Category::hard_to_learn, Category::ambiguous, Category::random}) {
      const auto r = rank(d, c, trial);
      EXPECT_EQ(r.size(), d.size());
      EXPECT_EQ(std::set<std::string>(r.begin(), r.end()), all);
    }
    if (!coarse) {
      auto easy = rank(d, Category::easy_to_learn);
      std::reverse(easy.begin(), easy.end());
      EXPECT_EQ(easy, rank(d, Category::hard_to_learn));
    }
  }
}

TEST(Rank, MonotoneTransformLeavesOrderUnchanged) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_dynamics(rng, 40, trial % 3 == 0);
    auto t = d;
    for (auto& x : t) x.confidence = std::pow(x.confidence, 3.0) * 0.5 + 0.1;
    for (Category c : {Category::easy_to_learn, Category::hard_to_learn}) EXPECT_EQ(rank(d, c), rank(t, c));
    for (const auto& spec : nine_recipes(trial)) {
      const auto a = select(spec, d);
      const auto b = select(spec, t);
      EXPECT_EQ(a.members, b.members);
    }
  }
}

TEST(Select, SingleComponentTakesTopByConfidence) {
  const std::vector<TrainingDynamics> d = {dyn("a", 0.2), dyn("b", 0.95), dyn("c", 0.5),
                                           dyn("d", 0.7), dyn("e", 0.05), dyn("f", 0.9)};
  const SubsetSpec spec{"easy", {{Category::easy_to_learn, {1, 3}}}, 0, std::nullopt};
  const Selection sel = select(spec, d);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel.members[0].guid, "b");
  EXPECT_EQ(sel.members[1].guid, "f");
}

TEST(Select, FullRandomFractionTakesEverything) {
  Rng rng(2);
  const auto d = random_dynamics(rng, 25, false);
  const Selection sel = select({"all", {{Category::random, {1, 1}}}, 3, std::nullopt}, d);
  EXPECT_EQ(sel.size(), 25u);
}

TEST(Select, OverlapIsBackfilledFromSameRanking) {
  // Easy order: w, x, y, z. Ambiguous order: x, z, w, y.
  const std::vector<TrainingDynamics> d = {dyn("w", 0.9, 0.20), dyn("x", 0.8, 0.40), dyn("y", 0.3, 0.05),
                                           dyn("z", 0.1, 0.30)};
  const SubsetSpec spec{"mix", {{Category::easy_to_learn, {1, 2}}, {Category::ambiguous, {1, 2}}}, 0, std::nullopt};
  const Selection sel = select(spec, d);
  ASSERT_EQ(sel.size(), 4u);
  EXPECT_EQ(sel.members[0], (SelectedGuid{"w", 0, Category::easy_to_learn}));
  EXPECT_EQ(sel.members[1], (SelectedGuid{"x", 0, Category::easy_to_learn}));
  EXPECT_EQ(sel.members[2], (SelectedGuid{"z", 1, Category::ambiguous}));
  EXPECT_EQ(sel.members[3], (SelectedGuid{"y", 1, Category::ambiguous}));
}

TEST(Select, SizeLawAndDisjointProvenance) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_dynamics(rng, 9 + rng.below(200), trial % 2 == 0);
    const std::size_t n = d.size();
    for (const auto& spec : nine_recipes(trial)) {
      const Selection sel = select(spec, d);
      std::size_t expected = 0;
      for (const auto& c : spec.components) expected += c.fraction.of(n);
      EXPECT_EQ(sel.size(), expected) << spec.name;
      std::set<std::string> seen;
      std::vector<std::size_t> per_component(spec.components.size(), 0);
      for (const auto& m : sel.members) {
        EXPECT_TRUE(seen.insert(m.guid).second);
        ++per_component[m.component_index];
        EXPECT_EQ(m.category, spec.components[m.component_index].category);
      }
      for (std::size_t i = 0; i < spec.components.size(); ++i)
        EXPECT_EQ(per_component[i], spec.components[i].fraction.of(n));
    }
  }
}

TEST(Select, QuotaFloorsAreExact) {
  Rng rng(5);
  for (std::size_t n : {6u, 7u, 9u, 17u, 18u, 20000u, 2000u, 999u}) {
    const auto d = random_dynamics(rng, n, false);
    const auto recipes = nine_recipes(1);
    EXPECT_EQ(select(recipes[2], d).size(), n / 3);
    EXPECT_EQ(select(recipes[6], d).size(), 2 * (n / 6));
    EXPECT_EQ(select(recipes[8], d).size(), 3 * (n / 9));
  }
}

TEST(Select, RejectsOversizedSpecAndEmptyInput) {
  const std::vector<TrainingDynamics> d = {dyn("a", 0.1), dyn("b", 0.2), dyn("c", 0.3)};
  const SubsetSpec spec{"greedy", {{Category::easy_to_learn, {2, 3}}, {Category::hard_to_learn, {2, 3}}}, 0, std::nullopt};
  EXPECT_THROW(select(spec, d), UsageError);
  EXPECT_THROW(select({"x", {{Category::random, {1, 1}}}, 0, std::nullopt}, {}), SelectionError);
}

TEST(Materialize, OriginalOrderOrSeededShuffle) {
  Rng rng(8);
  const auto d = random_dynamics(rng, 30, false);
  const DatasetSplit train = split_for(d);
  std::vector<std::string> all;
  for (const auto& s : train.samples) all.push_back(s.guid);
  std::reverse(all.begin(), all.end());
  EXPECT_EQ(materialize(all, train), train);

  const DatasetSplit a = materialize(all, train, 5);
  EXPECT_EQ(a, materialize(all, train, 5));
  EXPECT_NE(a, train);
  auto sorted_a = a.samples, sorted_t = train.samples;
  const auto by_guid = [](const Sample& x, const Sample& y) { return x.guid < y.guid; };
  std::sort(sorted_a.begin(), sorted_a.end(), by_guid);
  std::sort(sorted_t.begin(), sorted_t.end(), by_guid);
  EXPECT_EQ(sorted_a, sorted_t);

  EXPECT_EQ(materialize(std::vector<std::string>{train.samples[3].guid}, train).samples,
            std::vector<Sample>{train.samples[3]});
  EXPECT_THROW(materialize(std::vector<std::string>{"nope"}, train), SelectionError);
}

TEST(NineRecipes, ShapesAndFractions) {
  const auto r = nine_recipes(42);
  ASSERT_EQ(r.size(), 9u);
  const std::vector<std::string> names = {"full-shuffled", "random-33", "easy-33", "hard-33", "ambiguous-33",
                                          "easy+hard", "easy+ambiguous", "hard+ambiguous", "easy+hard+ambiguous"};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(r[i].name, names[i]);

  ASSERT_EQ(r[0].components.size(), 1u);
  EXPECT_EQ(r[0].components[0].category, Category::random);
  EXPECT_EQ(r[0].components[0].fraction, (Fraction{1, 1}));
  EXPECT_TRUE(r[0].shuffle_seed.has_value());

  ASSERT_EQ(r[6].components.size(), 2u);
  EXPECT_EQ(r[6].components[0].category, Category::easy_to_learn);
  EXPECT_EQ(r[6].components[1].category, Category::ambiguous);
  EXPECT_EQ(r[6].components[0].fraction, (Fraction{1, 6}));
  EXPECT_EQ(r[6].components[1].fraction, (Fraction{1, 6}));

  double sum = 0;
  for (const auto& c : r[8].components) sum += c.fraction.value();
  EXPECT_NEAR(sum, 1.0 / 3.0, 1e-15);
  for (const auto& spec : r) EXPECT_NO_THROW(spec.validate());
}

TEST(Fraction, ParsesRationalAndDecimal) {
  EXPECT_EQ(parse_fraction("1/6"), (Fraction{1, 6}));
  EXPECT_EQ(parse_fraction("0.25"), (Fraction{1, 4}));
  EXPECT_EQ(parse_fraction("1"), (Fraction{1, 1}));
  EXPECT_EQ(parse_fraction(".5"), (Fraction{1, 2}));
  EXPECT_FALSE(parse_fraction("a/b"));
  EXPECT_FALSE(parse_fraction("1/0"));
  EXPECT_FALSE(parse_fraction("2.5"));
  EXPECT_EQ((Fraction{1, 3}).of(20000), 6666u);
}

TEST(SubsetSpecFile, ParsesDirectives) {
  const SubsetSpec spec = parse_subset_spec(
      "# easy plus a bit of random\nname mix\nseed 7\nshuffle 3\ncomponent easy_to_learn 1/6\ncomponent random 0.25\n");
  EXPECT_EQ(spec.name, "mix");
  EXPECT_EQ(spec.rank_seed, 7u);
  EXPECT_EQ(spec.shuffle_seed, std::optional<std::uint64_t>(3));
  ASSERT_EQ(spec.components.size(), 2u);
  EXPECT_EQ(spec.components[1].fraction, (Fraction{1, 4}));
  EXPECT_THROW(parse_subset_spec("name x\ncomponent weird 1/2\n"), ParseError);
  EXPECT_THROW(parse_subset_spec("name x\ncomponent easy 3/4\ncomponent hard 1/2\n"), UsageError);
}

TEST(Manifest, RoundTrip) {
  Rng rng(3);
  const auto d = random_dynamics(rng, 60, true);
  const Selection sel = select(nine_recipes(1)[8], d);
  const std::string text = write_manifest(sel);
  EXPECT_EQ(text.substr(0, text.find('\n')), "guid\tcomponent_index\tcategory");
  EXPECT_EQ(parse_manifest(text), sel.members);
}
