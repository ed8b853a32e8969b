// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end experiment: preliminary training with per-epoch logging,
// dynamics and data map, the nine subsets, one fresh model per subset, and a
// results table of ID (own training subset) and OOD (dev/test) accuracy.
//
// Artifact tree under the output directory:
//   STATUS                         "complete", or "incomplete: ..." on failure
//   preliminary/train.tsv          the (possibly capped) train split
//   preliminary/epoch_log.jsonl    per-epoch records of the preliminary run
//   preliminary/model.ckpt         final preliminary model
//   dynamics.tsv, datamap.svg
//   hard_to_learn.tsv              lowest-confidence samples for label triage
//   subsets/<name>/train.tsv, subsets/<name>/manifest.tsv
//   results.tsv, results.md

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "cartography/datamap.hpp"
#include "cartography/dataset_io.hpp"
#include "cartography/dynamics.hpp"
#include "cartography/error.hpp"
#include "cartography/log_ingest.hpp"
#include "cartography/model.hpp"
#include "cartography/random.hpp"
#include "cartography/subsetter.hpp"
#include "cartography/text.hpp"
#include "cartography/trainer.hpp"

namespace cartography {

struct ExperimentConfig {
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string output_dir;
  TrainConfig trainer;
  std::uint64_t subset_seed = 0;
  std::optional<std::size_t> desk_scale_cap;  // seeded uniform subsample of train
  Schema schema;
  std::size_t jobs = 1;  // concurrent subset retraining jobs; results do not depend on it
  MapStyle map_style;
};

// Key-value config, one "key = value" per line, '#' comments. Keys:
//   train, dev, test, out                      paths; relative ones resolve against base_dir
//   epochs, learning_rate, l2, batch_size, hash_dim, seed, shuffle_each_epoch, cross_cap
//   subset_seed, cap, jobs
//   col_sentence1, col_sentence2, col_label, col_guid (empty: use row index)
inline ExperimentConfig parse_experiment_config(std::string_view input, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  std::unordered_set<std::string> seen;
  const auto path_of = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).lexically_normal().string();
  };
  const auto rows = text::lines(input);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string_view line = rows[r];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(r + 1, "expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(r + 1, "duplicate key '" + key + "'");
    const auto bad = [&] { return ParseError(r + 1, "invalid value for '" + key + "'"); };
    const auto as_size = [&] {
      const auto v = text::parse_int<std::size_t>(value);
      if (!v) throw bad();
      return *v;
    };
    const auto as_real = [&] {
      const auto v = text::parse_real(value);
      if (!v) throw bad();
      return *v;
    };
    if (key == "train") cfg.train_path = path_of(value);
    else if (key == "dev") cfg.dev_path = path_of(value);
    else if (key == "test") cfg.test_path = path_of(value);
    else if (key == "out") cfg.output_dir = path_of(value);
    else if (key == "epochs") cfg.trainer.epochs = as_size();
    else if (key == "learning_rate") cfg.trainer.learning_rate = as_real();
    else if (key == "l2") cfg.trainer.l2 = as_real();
    else if (key == "batch_size") cfg.trainer.batch_size = as_size();
    else if (key == "hash_dim") cfg.trainer.hash_dim = as_size();
    else if (key == "cross_cap") cfg.trainer.cross_cap = as_size();
    else if (key == "seed") cfg.trainer.seed = as_size();
    else if (key == "subset_seed") cfg.subset_seed = as_size();
    else if (key == "cap") cfg.desk_scale_cap = as_size();
    else if (key == "jobs") cfg.jobs = std::max<std::size_t>(1, as_size());
    else if (key == "shuffle_each_epoch") {
      if (value == "true") cfg.trainer.shuffle_each_epoch = true;
      else if (value == "false") cfg.trainer.shuffle_each_epoch = false;
      else throw bad();
    }
    else if (key == "col_sentence1") cfg.schema.sentence1 = std::string(value);
    else if (key == "col_sentence2") cfg.schema.sentence2 = std::string(value);
    else if (key == "col_label") cfg.schema.gold_label = std::string(value);
    else if (key == "col_guid") cfg.schema.guid = value.empty() ? std::nullopt : std::optional(std::string(value));
    else throw ParseError(r + 1, "unknown key '" + key + "'");
  }
  for (const auto& [key, path] : {std::pair{"train", &cfg.train_path}, {"dev", &cfg.dev_path},
                                  {"test", &cfg.test_path}, {"out", &cfg.output_dir}})
    if (path->empty()) throw UsageError("config is missing '" + std::string(key) + "'");
  return cfg;
}

struct ResultsRow {
  std::string subset_name;
  std::size_t train_size = 0;
  double id_accuracy = 0.0;
  double dev_accuracy = 0.0;
  double test_accuracy = 0.0;

  friend bool operator==(const ResultsRow&, const ResultsRow&) = default;
};

struct ResultsTable {
  std::vector<ResultsRow> rows;

  const ResultsRow* find(std::string_view name) const noexcept {
    for (const auto& r : rows)
      if (r.subset_name == name) return &r;
    return nullptr;
  }
};

enum class TableFormat { tsv, markdown };

// Accuracies are printed with four decimals, rounded half to even.
inline std::string emit_table(const ResultsTable& table, TableFormat format) {
  const auto acc = [](double v) { return text::format_fixed(v, 4); };
  std::string out;
  if (format == TableFormat::tsv) {
    out = "subset\ttrain_size\tid_accuracy\tdev_accuracy\ttest_accuracy\n";
    for (const auto& r : table.rows)
      out += r.subset_name + '\t' + std::to_string(r.train_size) + '\t' + acc(r.id_accuracy) + '\t' +
             acc(r.dev_accuracy) + '\t' + acc(r.test_accuracy) + '\n';
  } else {
    out = "| Subset | Train size | Final Training Accuracy (ID) | Dev Accuracy (OOD) | Test Accuracy (OOD) |\n";
    out += "|---|---:|---:|---:|---:|\n";
    for (const auto& r : table.rows)
      out += "| " + r.subset_name + " | " + std::to_string(r.train_size) + " | " + acc(r.id_accuracy) + " | " +
             acc(r.dev_accuracy) + " | " + acc(r.test_accuracy) + " |\n";
  }
  return out;
}

struct HardSample {
  std::string guid;
  std::string sentence1;
  std::string sentence2;
  Label gold_label = Label::entailment;
  double confidence = 0.0;
  double variability = 0.0;
  double correctness = 0.0;
};

// The k lowest-confidence samples (ties by ascending guid), for manual label triage.
inline std::vector<HardSample> inspect_hard(const std::vector<TrainingDynamics>& dynamics, const DatasetSplit& train,
                                            std::size_t k) {
  if (k == 0) throw UsageError("k must be positive");
  if (k > train.size()) throw UsageError("k = " + std::to_string(k) + " exceeds the train split size " +
                                         std::to_string(train.size()));
  if (k > dynamics.size()) throw UsageError("k exceeds the number of dynamics rows");
  std::map<std::string_view, const TrainingDynamics*> by_guid;
  for (const auto& d : dynamics) by_guid.emplace(d.guid, &d);
  const auto index = index_by_guid(train);
  const auto order = rank(dynamics, Category::hard_to_learn);
  std::vector<HardSample> out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto it = index.find(order[i]);
    if (it == index.end()) throw DataError("guid '" + order[i] + "' from dynamics is not in the train split");
    const Sample& s = train.samples[it->second];
    const TrainingDynamics& d = *by_guid.at(order[i]);
    out.push_back({s.guid, s.sentence1, s.sentence2, s.gold_label, d.confidence, d.variability, d.correctness});
  }
  return out;
}

inline std::string write_inspect_tsv(const std::vector<HardSample>& report) {
  std::string out = "guid\tsentence1\tsentence2\tgold_label\tconfidence\tvariability\tcorrectness\n";
  for (const auto& h : report)
    out += h.guid + '\t' + h.sentence1 + '\t' + h.sentence2 + '\t' + std::string(to_string(h.gold_label)) + '\t' +
           text::format_real(h.confidence) + '\t' + text::format_real(h.variability) + '\t' +
           text::format_real(h.correctness) + '\n';
  return out;
}

// Seeded uniform subsample of `cap` samples, kept in their original order.
inline DatasetSplit cap_split(const DatasetSplit& split, std::size_t cap, std::uint64_t seed) {
  if (cap > split.size())
    throw UsageError("cap " + std::to_string(cap) + " exceeds the train split size " + std::to_string(split.size()));
  auto order = seeded_permutation(split.size(), derive_seed(seed, fnv1a64("desk-scale-cap")));
  order.resize(cap);
  std::sort(order.begin(), order.end());
  DatasetSplit out{split.kind, {}};
  out.samples.reserve(cap);
  for (std::size_t i : order) out.samples.push_back(split.samples[i]);
  return out;
}

// Per-subset training seed, derived from the base seed and the subset name.
inline std::uint64_t subset_training_seed(std::uint64_t base, std::string_view name) {
  return derive_seed(base, fnv1a64(name));
}

struct ExperimentResult {
  ResultsTable table;
  std::vector<TrainingDynamics> dynamics;
  std::size_t train_size = 0;
};

using ProgressFn = std::function<void(const std::string&)>;

namespace detail {

inline void ensure_disjoint(const DatasetSplit& train, const DatasetSplit& other) {
  const auto index = index_by_guid(train);
  for (const auto& s : other.samples)
    if (index.count(s.guid))
      throw DataError("guid '" + s.guid + "' appears in both the train and " + std::string(to_string(other.kind)) +
                      " splits");
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {}) {
  namespace fs = std::filesystem;
  const auto note = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  const fs::path out = config.output_dir;
  const auto status = [&](const std::string& s) { text::write_file((out / "STATUS").string(), s + '\n'); };

  {
    const fs::path paths[] = {fs::weakly_canonical(config.train_path), fs::weakly_canonical(config.dev_path),
                              fs::weakly_canonical(config.test_path)};
    if (paths[0] == paths[1] || paths[0] == paths[2] || paths[1] == paths[2])
      throw UsageError("train, dev and test paths must be distinct");
  }
  config.trainer.validate();
  fs::create_directories(out / "preliminary");
  fs::create_directories(out / "subsets");
  status("incomplete: running");

  std::string stage;
  try {
    stage = "load";
    DatasetSplit train_split = load_split(config.train_path, config.schema, SplitKind::train).split;
    const DatasetSplit dev = load_split(config.dev_path, config.schema, SplitKind::dev).split;
    const DatasetSplit test = load_split(config.test_path, config.schema, SplitKind::test).split;
    detail::ensure_disjoint(train_split, dev);
    detail::ensure_disjoint(train_split, test);
    if (config.desk_scale_cap) train_split = cap_split(train_split, *config.desk_scale_cap, config.trainer.seed);
    note("loaded train=" + std::to_string(train_split.size()) + " dev=" + std::to_string(dev.size()) +
         " test=" + std::to_string(test.size()));

    stage = "preliminary";
    save_split((out / "preliminary" / "train.tsv").string(), train_split);
    std::vector<EpochRecord> records;
    records.reserve(train_split.size() * config.trainer.epochs);
    std::ostringstream log;
    const ModelParams preliminary = train(train_split, config.trainer, [&](const EpochRecord& r) {
      log << format_log_line(r);
      records.push_back(r);
    });
    text::write_file((out / "preliminary" / "epoch_log.jsonl").string(), log.str());
    save_checkpoint((out / "preliminary" / "model.ckpt").string(), preliminary);
    note("preliminary model trained");

    stage = "dynamics";
    ExperimentResult result;
    result.train_size = train_split.size();
    result.dynamics = compute_dynamics(records);
    records = {};
    text::write_file((out / "dynamics.tsv").string(), write_dynamics_tsv(result.dynamics));
    text::write_file((out / "datamap.svg").string(), render_map(result.dynamics, config.map_style));
    text::write_file((out / "hard_to_learn.tsv").string(),
                     write_inspect_tsv(inspect_hard(result.dynamics, train_split, std::min<std::size_t>(50, train_split.size()))));

    stage = "subsets";
    const auto recipes = nine_recipes(config.subset_seed);
    std::vector<DatasetSplit> subsets;
    for (const SubsetSpec& spec : recipes) {
      const Selection sel = select(spec, result.dynamics);
      subsets.push_back(materialize(sel, train_split));
      const fs::path dir = out / "subsets" / spec.name;
      fs::create_directories(dir);
      save_split((dir / "train.tsv").string(), subsets.back());
      text::write_file((dir / "manifest.tsv").string(), write_manifest(sel));
    }

    stage = "retrain";
    result.table.rows.push_back({"full-data", train_split.size(), evaluate(preliminary, train_split, config.trainer.cross_cap),
                                 evaluate(preliminary, dev, config.trainer.cross_cap),
                                 evaluate(preliminary, test, config.trainer.cross_cap)});
    std::vector<ResultsRow> rows(recipes.size());
    std::vector<std::exception_ptr> failures(recipes.size());
    std::atomic<std::size_t> next{0};
    std::mutex note_mutex;
    const auto worker = [&] {
      for (std::size_t i = next++; i < recipes.size(); i = next++) {
        try {
          TrainConfig tc = config.trainer;
          tc.seed = subset_training_seed(config.trainer.seed, recipes[i].name);
          const ModelParams model = train(subsets[i], tc, RecordSink{});
          rows[i] = {recipes[i].name, subsets[i].size(), evaluate(model, subsets[i], tc.cross_cap),
                     evaluate(model, dev, tc.cross_cap), evaluate(model, test, tc.cross_cap)};
          std::lock_guard lock(note_mutex);
          note("trained subset " + recipes[i].name);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 1; t < std::min(config.jobs, recipes.size()); ++t) pool.emplace_back(worker);
      worker();
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
    for (auto& r : rows) result.table.rows.push_back(std::move(r));

    stage = "report";
    text::write_file((out / "results.tsv").string(), emit_table(result.table, TableFormat::tsv));
    text::write_file((out / "results.md").string(), emit_table(result.table, TableFormat::markdown));
    status("complete");
    return result;
  } catch (const Error& e) {
    status("incomplete: failed at stage " + stage + ": " + e.what());
    const std::string msg = "stage '" + stage + "': " + e.what();
    switch (e.kind()) {
      case ErrorKind::usage: throw UsageError(msg);
      case ErrorKind::data: throw DataError(msg);
      case ErrorKind::internal: throw IoError(msg);
    }
    throw;
  } catch (const std::exception& e) {
    status("incomplete: failed at stage " + stage + ": " + e.what());
    throw IoError("stage '" + stage + "': " + e.what());
  }
}

}  // namespace cartography
