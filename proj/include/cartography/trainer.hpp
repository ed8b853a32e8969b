// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic reference classifier: softmax regression on hashed features,
// trained with constant-rate mini-batch SGD. After every epoch one inference
// pass over the split, in stored order, reports an EpochRecord per sample.
//
// Objective for a batch B:
//   L(W, b) = (1/|B|) * sum_{i in B} -log softmax(W x_i + b)[y_i] + (l2 / 2) * ||W||^2
// The bias is not regularized.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cartography/dataset_io.hpp"
#include "cartography/epoch_record.hpp"
#include "cartography/error.hpp"
#include "cartography/features.hpp"
#include "cartography/label.hpp"
#include "cartography/model.hpp"
#include "cartography/random.hpp"

namespace cartography {

struct TrainConfig {
  std::size_t epochs = 6;
  double learning_rate = 0.1;
  double l2 = 1e-6;
  std::size_t batch_size = 64;
  std::size_t hash_dim = std::size_t{1} << 18;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  std::size_t cross_cap = 30;

  FeatureConfig features() const noexcept { return {hash_dim, cross_cap}; }

  void validate() const {
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw UsageError("learning_rate must be positive");
    if (!(l2 >= 0) || !std::isfinite(l2)) throw UsageError("l2 must be nonnegative");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (hash_dim < 2 || !std::has_single_bit(hash_dim)) throw UsageError("hash_dim must be a power of two >= 2");
  }
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;  // mean batch objective per epoch
};

struct Objective {
  double loss = 0.0;
  ModelParams gradient;
};

// Batch objective and its analytic gradient with respect to every weight and bias.
inline Objective objective(const ModelParams& model, std::span<const FeatureVector> features,
                           std::span<const Label> labels, double l2) {
  Objective out{0.0, ModelParams(model.hash_dim)};
  const double inv_n = 1.0 / static_cast<double>(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const FeatureVector& fv = features[i];
    const Probs z = logits(model, fv);
    const Probs p = softmax(z);
    const std::size_t y = index_of(labels[i]);
    const double peak = std::max({z[0], z[1], z[2]});
    out.loss -= inv_n * (z[y] - peak - std::log(std::exp(z[0] - peak) + std::exp(z[1] - peak) + std::exp(z[2] - peak)));
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double delta = inv_n * (p[k] - (k == y ? 1.0 : 0.0));
      out.gradient.bias[k] += delta;
      double* g = out.gradient.weights.data() + k * model.hash_dim;
      for (std::size_t j = 0; j < fv.size(); ++j) g[fv.indices[j]] += delta * fv.values[j];
    }
  }
  if (l2 > 0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      sq += model.weights[i] * model.weights[i];
      out.gradient.weights[i] += l2 * model.weights[i];
    }
    out.loss += 0.5 * l2 * sq;
  }
  return out;
}

inline std::vector<FeatureVector> featurize_all(const DatasetSplit& split, const FeatureConfig& config) {
  std::vector<FeatureVector> out;
  out.reserve(split.size());
  for (const Sample& s : split.samples) out.push_back(featurize(s, config));
  return out;
}

namespace detail {

// One SGD step on the batch `members` (indices into features/labels).
// Returns the batch objective evaluated before the update.
inline double sgd_step(ModelParams& model, const std::vector<FeatureVector>& features,
                       const std::vector<Label>& labels, std::span<const std::size_t> members, double lr,
                       double l2, std::vector<Probs>& scratch) {
  const double inv_n = 1.0 / static_cast<double>(members.size());
  scratch.resize(members.size());
  double loss = 0.0;
  for (std::size_t m = 0; m < members.size(); ++m) {
    const std::size_t i = members[m];
    const Probs z = logits(model, features[i]);
    scratch[m] = softmax(z);
    const std::size_t y = index_of(labels[i]);
    const double peak = std::max({z[0], z[1], z[2]});
    loss -= inv_n * (z[y] - peak - std::log(std::exp(z[0] - peak) + std::exp(z[1] - peak) + std::exp(z[2] - peak)));
  }
  if (l2 > 0) {
    double sq = 0.0;
    for (double w : model.weights) sq += w * w;
    loss += 0.5 * l2 * sq;
    const double decay = 1.0 - lr * l2;
    for (double& w : model.weights) w *= decay;
  }
  for (std::size_t m = 0; m < members.size(); ++m) {
    const std::size_t i = members[m];
    const std::size_t y = index_of(labels[i]);
    const FeatureVector& fv = features[i];
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double delta = lr * inv_n * (scratch[m][k] - (k == y ? 1.0 : 0.0));
      model.bias[k] -= delta;
      double* w = model.weights.data() + k * model.hash_dim;
      for (std::size_t j = 0; j < fv.size(); ++j) w[fv.indices[j]] -= delta * fv.values[j];
    }
  }
  return loss;
}

}  // namespace detail

// Sample visit order for one epoch.
inline std::vector<std::size_t> epoch_order(std::size_t n, const TrainConfig& config, std::size_t epoch) {
  if (config.shuffle_each_epoch) return seeded_permutation(n, derive_seed(config.seed, epoch));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

inline ModelParams train(const DatasetSplit& split, const TrainConfig& config, const RecordSink& sink,
                         TrainStats* stats = nullptr) {
  config.validate();
  if (split.empty()) throw DataError("cannot train on an empty split");

  const auto features = featurize_all(split, config.features());
  std::vector<Label> labels;
  labels.reserve(split.size());
  for (const Sample& s : split.samples) labels.push_back(s.gold_label);

  ModelParams model(config.hash_dim);
  std::vector<Probs> scratch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(split.size(), config, epoch);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batches) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const double loss = detail::sgd_step(model, features, labels, std::span(order).subspan(start, len),
                                           config.learning_rate, config.l2, scratch);
      if (!std::isfinite(loss)) throw TrainingError(epoch, batches, "non-finite loss");
      loss_sum += loss;
    }
    if (!model.all_finite()) throw TrainingError(epoch, batches, "non-finite parameters");
    if (stats) stats->epoch_mean_loss.push_back(loss_sum / static_cast<double>(batches));

    if (sink) {
      for (std::size_t i = 0; i < split.size(); ++i) {
        EpochRecord record;
        record.guid = split.samples[i].guid;
        record.epoch = epoch;
        record.probs = predict_probs(model, features[i]);
        record.predicted = argmax_label(record.probs);
        record.gold = labels[i];
        sink(record);
      }
    }
  }
  return model;
}

inline Label predict_label(const ModelParams& model, const FeatureVector& fv) {
  return argmax_label(predict_probs(model, fv));
}

// Fraction of samples whose argmax prediction matches the gold label.
inline double evaluate(const ModelParams& model, const DatasetSplit& split, std::size_t cross_cap = 30) {
  if (split.empty()) throw DataError("accuracy is undefined on an empty split");
  const FeatureConfig fc{model.hash_dim, cross_cap};
  std::size_t correct = 0;
  for (const Sample& s : split.samples)
    if (predict_label(model, featurize(s, fc)) == s.gold_label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(split.size());
}

}  // namespace cartography
