// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>

#include "cartography/experiment.hpp"
#include "cartography/testing/synthetic_nli.hpp"
#include "temp_dir.hpp"

using namespace cartography;
namespace fs = std::filesystem;
namespace synth = cartography::testing;

namespace {

void write_corpus(const testutil::TempDir& dir, std::size_t n_train, std::size_t n_eval) {
  save_split(dir / "train.tsv", synth::to_split(synth::generate_corpus({n_train, 11, "tr-"})));
  save_split(dir / "dev.tsv", synth::to_split(synth::generate_corpus({n_eval, 12, "dv-"})));
  save_split(dir / "test.tsv", synth::to_split(synth::generate_corpus({n_eval, 13, "te-"})));
}

ExperimentConfig small_config(const testutil::TempDir& dir) {
  return parse_experiment_config(
      "train = train.tsv\ndev = dev.tsv\ntest = test.tsv\nout = run\n"
      "epochs = 2\nhash_dim = 4096\nbatch_size = 16\nseed = 5\nsubset_seed = 5\n",
      dir.path());
}

std::string status_of(const testutil::TempDir& dir) { return text::read_file(dir / "run/STATUS"); }

}  // namespace

TEST(EmitTable, FourDecimalsHalfToEven) {
  ResultsTable t;
  t.rows.push_back({"full-data", 10, 0.89364999, 0.03125, 1.0});
  const std::string tsv = emit_table(t, TableFormat::tsv);
  EXPECT_EQ(tsv, "subset\ttrain_size\tid_accuracy\tdev_accuracy\ttest_accuracy\n"
                 "full-data\t10\t0.8936\t0.0312\t1.0000\n");
}

TEST(EmitTable, EmptyTableHasHeaderOnly) {
  EXPECT_EQ(emit_table({}, TableFormat::tsv), "subset\ttrain_size\tid_accuracy\tdev_accuracy\ttest_accuracy\n");
  const std::string md = emit_table({}, TableFormat::markdown);
  EXPECT_NE(md.find("Final Training Accuracy (ID)"), std::string::npos);
  EXPECT_NE(md.find("Dev Accuracy (OOD)"), std::string::npos);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 2);
}

TEST(EmitTable, MarkdownAndTsvCarryTheSameValues) {
  ResultsTable t;
  t.rows.push_back({"easy-33", 6666, 0.99975, 0.5, 0.123456});
  t.rows.push_back({"hard-33", 6666, 0.7211, 0.00005, 0.99995});
  const auto tsv_rows = text::lines(emit_table(t, TableFormat::tsv));
  const auto md_rows = text::lines(emit_table(t, TableFormat::markdown));
  ASSERT_EQ(tsv_rows.size(), 3u);
  ASSERT_EQ(md_rows.size(), 4u);
  for (std::size_t i = 0; i < 2; ++i) {
    std::string expected = "|";
    for (auto cell : text::split(tsv_rows[i + 1], '\t')) expected += " " + std::string(cell) + " |";
    EXPECT_EQ(md_rows[i + 2], expected);
  }
}

TEST(InspectHard, LowestConfidenceFirstWithGuidTies) {
  DatasetSplit train;
  for (std::string g : {"a", "b", "c", "d"}) train.samples.push_back({g, "p " + g, "h " + g, Label::neutral});
  const std::vector<TrainingDynamics> d = {
      {"a", 0.7, 0.1, 1.0, 2}, {"b", 0.2, 0.1, 0.0, 2}, {"c", 0.2, 0.3, 0.5, 2}, {"d", 0.9, 0.0, 1.0, 2}};
  const auto one = inspect_hard(d, train, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].guid, "b");
  EXPECT_EQ(one[0].sentence1, "p b");
  const auto three = inspect_hard(d, train, 3);
  EXPECT_EQ(three[1].guid, "c");
  EXPECT_EQ(three[2].guid, "a");
  EXPECT_THROW(inspect_hard(d, train, 0), UsageError);
  EXPECT_THROW(inspect_hard(d, train, 5), UsageError);
  const std::string tsv = write_inspect_tsv(one);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "guid\tsentence1\tsentence2\tgold_label\tconfidence\tvariability\tcorrectness");
}

TEST(ExperimentConfigFile, ParsesKeysAndResolvesPaths) {
  const auto cfg = parse_experiment_config(
      "# desk scale\ntrain = data/train.tsv\ndev = /abs/dev.tsv\ntest = test.tsv\nout = out\n"
      "epochs = 3\nlearning_rate = 0.05\nl2 = 0\ncap = 100\njobs = 0\nshuffle_each_epoch = false\ncol_guid =\n",
      "/base");
  EXPECT_EQ(cfg.train_path, "/base/data/train.tsv");
  EXPECT_EQ(cfg.dev_path, "/abs/dev.tsv");
  EXPECT_EQ(cfg.trainer.epochs, 3u);
  EXPECT_EQ(cfg.trainer.learning_rate, 0.05);
  EXPECT_EQ(cfg.trainer.l2, 0.0);
  EXPECT_EQ(cfg.desk_scale_cap, std::optional<std::size_t>(100));
  EXPECT_EQ(cfg.jobs, 1u);
  EXPECT_FALSE(cfg.trainer.shuffle_each_epoch);
  EXPECT_FALSE(cfg.schema.guid.has_value());
}

TEST(ExperimentConfigFile, RejectsBadInput) {
  const std::string base = "train = a\ndev = b\ntest = c\nout = d\n";
  EXPECT_THROW(parse_experiment_config(base + "epochs = 2\nepochs = 3\n"), ParseError);
  EXPECT_THROW(parse_experiment_config(base + "color = red\n"), ParseError);
  EXPECT_THROW(parse_experiment_config(base + "epochs = two\n"), ParseError);
  EXPECT_THROW(parse_experiment_config(base + "epochs\n"), ParseError);
  EXPECT_THROW(parse_experiment_config("train = a\ndev = b\nout = d\n"), UsageError);
}

TEST(CapSplit, SeededSubsampleKeepsOrder) {
  const DatasetSplit full = synth::to_split(synth::generate_corpus({200, 3, "x-"}));
  const DatasetSplit a = cap_split(full, 50, 9);
  EXPECT_EQ(a.size(), 50u);
  EXPECT_EQ(a, cap_split(full, 50, 9));
  EXPECT_NE(a, cap_split(full, 50, 10));
  const auto index = index_by_guid(full);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(index.at(a.samples[i - 1].guid), index.at(a.samples[i].guid));
  EXPECT_EQ(cap_split(full, 200, 1), full);
  EXPECT_THROW(cap_split(full, 201, 1), UsageError);
}

TEST(RunExperiment, SmallRunProducesAllArtifacts) {
  testutil::TempDir dir("exp-small");
  write_corpus(dir, 180, 60);
  const ExperimentResult result = run_experiment(small_config(dir));
  EXPECT_EQ(status_of(dir), "complete\n");
  ASSERT_EQ(result.table.rows.size(), 10u);
  EXPECT_EQ(result.table.rows[0].subset_name, "full-data");
  EXPECT_EQ(result.table.rows[0].train_size, 180u);
  EXPECT_EQ(result.table.find("easy-33")->train_size, 60u);
  EXPECT_EQ(result.table.find("easy+hard")->train_size, 60u);
  EXPECT_EQ(result.table.find("easy+hard+ambiguous")->train_size, 60u);
  EXPECT_EQ(result.table.find("full-shuffled")->train_size, 180u);
  for (const auto& row : result.table.rows) {
    EXPECT_GE(row.id_accuracy, 0.0);
    EXPECT_LE(row.test_accuracy, 1.0);
  }
  for (const char* f : {"preliminary/train.tsv", "preliminary/epoch_log.jsonl", "preliminary/model.ckpt",
                        "dynamics.tsv", "datamap.svg", "hard_to_learn.tsv", "results.tsv", "results.md",
                        "subsets/ambiguous-33/train.tsv", "subsets/ambiguous-33/manifest.tsv"})
    EXPECT_TRUE(fs::exists(dir.path() / "run" / f)) << f;
  EXPECT_EQ(text::read_file(dir / "run/results.tsv"), emit_table(result.table, TableFormat::tsv));
  EXPECT_EQ(load_dynamics(dir / "run/dynamics.tsv"), result.dynamics);
}

TEST(RunExperiment, ResultsDoNotDependOnJobs) {
  testutil::TempDir a("exp-jobs1"), b("exp-jobs4");
  write_corpus(a, 120, 40);
  write_corpus(b, 120, 40);
  ExperimentConfig ca = small_config(a), cb = small_config(b);
  ca.jobs = 1;
  cb.jobs = 4;
  const auto ra = run_experiment(ca), rb = run_experiment(cb);
  EXPECT_EQ(ra.table.rows, rb.table.rows);
  EXPECT_EQ(text::read_file(a / "run/results.md"), text::read_file(b / "run/results.md"));
}

TEST(RunExperiment, FailureMarksStatusIncomplete) {
  testutil::TempDir dir("exp-fail");
  // Eight samples leave the three-way mix with a zero quota per component.
  write_corpus(dir, 8, 10);
  try {
    run_experiment(small_config(dir));
    FAIL() << "expected a failure";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 'retrain'"), std::string::npos) << e.what();
  }
  EXPECT_EQ(status_of(dir).rfind("incomplete: failed at stage retrain", 0), 0u) << status_of(dir);
  EXPECT_FALSE(fs::exists(dir.path() / "run/results.tsv"));
}

TEST(RunExperiment, OverlappingDevAndTrainIsADataError) {
  testutil::TempDir dir("exp-overlap");
  write_corpus(dir, 50, 10);
  fs::copy_file(dir / "train.tsv", dir / "dev.tsv", fs::copy_options::overwrite_existing);
  try {
    run_experiment(small_config(dir));
    FAIL() << "expected a failure";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("appears in both"), std::string::npos) << e.what();
  }
  EXPECT_EQ(status_of(dir).rfind("incomplete: failed at stage load", 0), 0u);
}

TEST(RunExperiment, SamePathTwiceIsAUsageError) {
  testutil::TempDir dir("exp-same");
  write_corpus(dir, 20, 10);
  ExperimentConfig cfg = small_config(dir);
  cfg.test_path = cfg.dev_path;
  EXPECT_THROW(run_experiment(cfg), UsageError);
}
