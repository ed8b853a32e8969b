// SPDX-License-Identifier: Apache-2.0
//
// Writes seeded synthetic train/dev/test splits in the SNLI TSV schema.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "cartography/dataset_io.hpp"
#include "cartography/error.hpp"
#include "cartography/testing/synthetic_nli.hpp"

namespace fs = std::filesystem;
using namespace cartography;

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic NLI corpus (train/dev/test TSV)"};
  std::string out_dir;
  std::size_t train_size = 20000, dev_size = 5000, test_size = 5000;
  std::uint64_t seed = 1;
  double flip_rate = 0.08, borderline_rate = 0.12, eval_flip_rate = 0.02;
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--train-size", train_size)->capture_default_str();
  app.add_option("--dev-size", dev_size)->capture_default_str();
  app.add_option("--test-size", test_size)->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--flip-rate", flip_rate, "Share of train labels replaced by a wrong label")->capture_default_str();
  app.add_option("--eval-flip-rate", eval_flip_rate, "Same, for dev and test")->capture_default_str();
  app.add_option("--borderline-rate", borderline_rate, "Share of coin-flip borderline hypotheses")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    const struct {
      const char* file;
      const char* prefix;
      std::size_t size;
      std::uint64_t salt;
      double flips;
    } splits[] = {{"train.tsv", "train-", train_size, 1, flip_rate},
                  {"dev.tsv", "dev-", dev_size, 2, eval_flip_rate},
                  {"test.tsv", "test-", test_size, 3, eval_flip_rate}};
    for (const auto& s : splits) {
      const auto corpus = testing::generate_corpus({s.size, derive_seed(seed, s.salt), s.prefix, s.flips, borderline_rate});
      save_split((fs::path(out_dir) / s.file).string(), testing::to_split(corpus));
      std::cout << "wrote " << s.size << " samples to " << (fs::path(out_dir) / s.file).string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
