// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: training with per-epoch logs, dynamics, data maps,
// subset filtering, the full experiment, hard-sample inspection and log checks.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cartography/cartography.hpp"

namespace fs = std::filesystem;
using namespace cartography;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct SchemaFlags {
  std::string sentence1 = "sentence1";
  std::string sentence2 = "sentence2";
  std::string label = "gold_label";
  std::string guid = "pairID";
  bool no_guid = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--col-sentence1", sentence1, "Premise column")->capture_default_str();
    cmd->add_option("--col-sentence2", sentence2, "Hypothesis column")->capture_default_str();
    cmd->add_option("--col-label", label, "Gold label column")->capture_default_str();
    cmd->add_option("--col-guid", guid, "Sample id column")->capture_default_str();
    cmd->add_flag("--no-guid", no_guid, "Use the 0-based data row index as the sample id");
  }

  Schema schema() const {
    Schema s;
    s.sentence1 = sentence1;
    s.sentence2 = sentence2;
    s.gold_label = label;
    s.guid = no_guid ? std::nullopt : std::optional(guid);
    return s;
  }
};

void ensure_same_guids(const std::vector<TrainingDynamics>& dynamics, const DatasetSplit& train) {
  const auto index = index_by_guid(train);
  std::set<std::string_view> covered;
  for (const auto& d : dynamics) {
    if (!index.count(d.guid)) throw DataError("dynamics guid '" + d.guid + "' is not in the train split");
    covered.insert(d.guid);
  }
  for (const auto& s : train.samples)
    if (!covered.count(s.guid)) throw DataError("train guid '" + s.guid + "' has no dynamics row");
}

int run(int argc, char** argv) {
  CLI::App app{"Training-dynamics toolkit: dynamics, data maps and filtered subsets"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the reference classifier and log per-epoch predictions");
  std::string train_path, out_dir;
  TrainConfig tc;
  std::optional<std::size_t> cap;
  bool no_shuffle = false;
  SchemaFlags train_schema;
  train_cmd->add_option("--train", train_path, "Train split TSV")->required();
  train_cmd->add_option("--epochs", tc.epochs, "Number of epochs")->required();
  train_cmd->add_option("--seed", tc.seed, "Random seed")->required();
  train_cmd->add_option("--out", out_dir, "Output directory")->required();
  train_cmd->add_option("--cap", cap, "Seeded uniform subsample size applied before training");
  train_cmd->add_option("--learning-rate", tc.learning_rate)->capture_default_str();
  train_cmd->add_option("--l2", tc.l2)->capture_default_str();
  train_cmd->add_option("--batch-size", tc.batch_size)->capture_default_str();
  train_cmd->add_option("--hash-dim", tc.hash_dim)->capture_default_str();
  train_cmd->add_option("--cross-cap", tc.cross_cap)->capture_default_str();
  train_cmd->add_flag("--no-shuffle", no_shuffle, "Visit samples in stored order every epoch");
  train_schema.attach(train_cmd);

  // dynamics
  auto* dyn_cmd = app.add_subcommand("dynamics", "Compute training dynamics from an epoch log");
  std::string log_path, dyn_out;
  dyn_cmd->add_option("--log", log_path, "Epoch log (one JSON record per line)")->required();
  dyn_cmd->add_option("--out", dyn_out, "Dynamics TSV to write")->required();

  // map
  auto* map_cmd = app.add_subcommand("map", "Render a data map as SVG");
  std::string map_dyn, map_out;
  MapStyle style;
  map_cmd->add_option("--dynamics", map_dyn, "Dynamics TSV")->required();
  map_cmd->add_option("--out", map_out, "SVG file to write")->required();
  map_cmd->add_option("--width", style.width_px)->capture_default_str();
  map_cmd->add_option("--height", style.height_px)->capture_default_str();
  map_cmd->add_option("--radius", style.point_radius_px)->capture_default_str();

  // filter
  auto* filter_cmd = app.add_subcommand("filter", "Materialize one subset recipe as a train split");
  std::string filter_dyn, filter_train, recipe, filter_out, spec_path;
  std::uint64_t filter_seed = 0;
  SchemaFlags filter_schema;
  filter_cmd->add_option("--dynamics", filter_dyn, "Dynamics TSV")->required();
  filter_cmd->add_option("--train", filter_train, "Train split TSV")->required();
  filter_cmd->add_option("--recipe", recipe, "Recipe name, or 'custom' with --spec")->required();
  filter_cmd->add_option("--out", filter_out, "Output directory")->required();
  filter_cmd->add_option("--seed", filter_seed, "Seed for random rankings and shuffles")->capture_default_str();
  filter_cmd->add_option("--spec", spec_path, "Custom recipe file (with --recipe custom)");
  filter_schema.attach(filter_cmd);

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run the full subset experiment from a config file");
  std::string config_path;
  std::optional<std::size_t> jobs;
  exp_cmd->add_option("--config", config_path, "Experiment config (key = value lines)")->required();
  exp_cmd->add_option("--jobs", jobs, "Concurrent subset retraining jobs (overrides the config)");

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "List the lowest-confidence samples for label triage");
  std::string inspect_dyn, inspect_train, inspect_out;
  std::size_t k = 0;
  SchemaFlags inspect_schema;
  inspect_cmd->add_option("--dynamics", inspect_dyn, "Dynamics TSV")->required();
  inspect_cmd->add_option("--train", inspect_train, "Train split TSV")->required();
  inspect_cmd->add_option("-k", k, "Number of samples")->required();
  inspect_cmd->add_option("--out", inspect_out, "Write the report here instead of stdout");
  inspect_schema.attach(inspect_cmd);

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse and check an external epoch log");
  std::string ingest_log;
  bool validate = false;
  ingest_cmd->add_option("--log", ingest_log, "Epoch log (one JSON record per line)")->required();
  ingest_cmd->add_flag("--validate", validate, "Also require complete per-sample epoch series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*train_cmd) {
    tc.shuffle_each_epoch = !no_shuffle;
    tc.validate();
    DatasetSplit split = load_split(train_path, train_schema.schema()).split;
    if (cap) split = cap_split(split, *cap, tc.seed);
    fs::create_directories(out_dir);
    std::ofstream log((fs::path(out_dir) / "epoch_log.jsonl").string(), std::ios::binary | std::ios::trunc);
    if (!log) throw IoError("cannot write epoch log in '" + out_dir + "'");
    const ModelParams model = train(split, tc, log_writer(log));
    log.close();
    save_checkpoint((fs::path(out_dir) / "model.ckpt").string(), model);
    save_split((fs::path(out_dir) / "train.tsv").string(), split);
    std::cout << "trained on " << split.size() << " samples for " << tc.epochs << " epochs; train accuracy "
              << text::format_fixed(evaluate(model, split, tc.cross_cap), 4) << '\n';
    return 0;
  }

  if (*dyn_cmd) {
    const IngestResult in = ingest_file(log_path);
    const std::size_t epochs = validate_completeness(in.records);
    const auto dynamics = compute_dynamics(in.records);
    text::write_file(dyn_out, write_dynamics_tsv(dynamics));
    std::cout << "wrote dynamics for " << dynamics.size() << " samples over " << epochs
              << " epochs (variability: population standard deviation)\n";
    return 0;
  }

  if (*map_cmd) {
    text::write_file(map_out, render_map(load_dynamics(map_dyn), style));
    return 0;
  }

  if (*filter_cmd) {
    SubsetSpec spec;
    if (recipe == "custom") {
      if (spec_path.empty()) throw UsageError("--recipe custom requires --spec FILE");
      spec = parse_subset_spec(text::read_file(spec_path));
    } else {
      const auto found = find_recipe(recipe, filter_seed);
      if (!found) {
        std::string names;
        for (const auto& r : nine_recipes(0)) names += ' ' + r.name;
        throw UsageError("unknown recipe '" + recipe + "'; expected one of:" + names + " custom");
      }
      spec = *found;
    }
    const auto dynamics = load_dynamics(filter_dyn);
    const DatasetSplit train_split = load_split(filter_train, filter_schema.schema()).split;
    ensure_same_guids(dynamics, train_split);
    const Selection sel = select(spec, dynamics);
    fs::create_directories(filter_out);
    save_split((fs::path(filter_out) / "train.tsv").string(), materialize(sel, train_split));
    text::write_file((fs::path(filter_out) / "manifest.tsv").string(), write_manifest(sel));
    std::cout << spec.name << ": selected " << sel.size() << " of " << dynamics.size() << " samples\n";
    return 0;
  }

  if (*exp_cmd) {
    ExperimentConfig cfg =
        parse_experiment_config(text::read_file(config_path), fs::path(config_path).parent_path());
    if (jobs) cfg.jobs = std::max<std::size_t>(1, *jobs);
    const ExperimentResult result = run_experiment(cfg, [](const std::string& msg) { std::cerr << msg << '\n'; });
    std::cout << emit_table(result.table, TableFormat::markdown);
    return 0;
  }

  if (*inspect_cmd) {
    const auto dynamics = load_dynamics(inspect_dyn);
    const DatasetSplit train_split = load_split(inspect_train, inspect_schema.schema()).split;
    const std::string report = write_inspect_tsv(inspect_hard(dynamics, train_split, k));
    if (inspect_out.empty()) std::cout << report;
    else text::write_file(inspect_out, report);
    return 0;
  }

  if (*ingest_cmd) {
    const IngestResult in = ingest_file(ingest_log);
    std::cout << "lines: " << in.summary.lines << "\nguids: " << in.summary.distinct_guids << "\nepochs: "
              << in.summary.min_epoch << ".." << in.summary.max_epoch << '\n';
    if (validate) {
      const std::size_t epochs = validate_completeness(in.records);
      std::cout << "complete: " << epochs << " epochs per guid\n";
    }
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::usage: return kExitUsage;
      case ErrorKind::data: return kExitData;
      case ErrorKind::internal: return kExitInternal;
    }
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
