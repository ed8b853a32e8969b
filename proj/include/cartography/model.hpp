// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cartography/epoch_record.hpp"
#include "cartography/error.hpp"
#include "cartography/features.hpp"
#include "cartography/label.hpp"
#include "cartography/text.hpp"

namespace cartography {

// Multinomial softmax regression over hashed features.
struct ModelParams {
  std::size_t hash_dim = 0;
  std::vector<double> weights;  // kNumLabels x hash_dim, row-major (one row per label)
  Probs bias{};

  ModelParams() = default;
  explicit ModelParams(std::size_t dim) : hash_dim(dim), weights(kNumLabels * dim, 0.0) {}

  std::span<double> row(Label label) noexcept { return {weights.data() + index_of(label) * hash_dim, hash_dim}; }
  std::span<const double> row(Label label) const noexcept {
    return {weights.data() + index_of(label) * hash_dim, hash_dim};
  }

  bool all_finite() const noexcept {
    for (double w : weights)
      if (!std::isfinite(w)) return false;
    for (double b : bias)
      if (!std::isfinite(b)) return false;
    return true;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline Probs logits(const ModelParams& model, const FeatureVector& fv) noexcept {
  Probs z = model.bias;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const double* w = model.weights.data() + k * model.hash_dim;
    double acc = 0.0;
    for (std::size_t i = 0; i < fv.indices.size(); ++i) acc += w[fv.indices[i]] * fv.values[i];
    z[k] += acc;
  }
  return z;
}

inline Probs softmax(const Probs& z) noexcept {
  const double peak = std::max({z[0], z[1], z[2]});
  Probs p{};
  double total = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    p[k] = std::exp(z[k] - peak);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

inline Probs predict_probs(const ModelParams& model, const FeatureVector& fv) noexcept {
  return softmax(logits(model, fv));
}

// Checkpoint layout (all integers and reals little-endian):
//   bytes 0..7    magic "CARTOCKP"
//   bytes 8..11   u32 format version (1)
//   bytes 12..15  u32 label count (3)
//   bytes 16..23  u64 hash_dim
//   then          3 * hash_dim binary64 weights, row-major, rows in label order
//   then          3 binary64 biases
inline constexpr std::string_view kCheckpointMagic = "CARTOCKP";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline std::uint64_t get_le(std::string_view in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{static_cast<unsigned char>(in[offset + i])} << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_checkpoint(const ModelParams& model) {
  std::string out(kCheckpointMagic);
  out.reserve(24 + 8 * (model.weights.size() + kNumLabels));
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(kNumLabels));
  detail::put_u64(out, model.hash_dim);
  for (double w : model.weights) detail::put_u64(out, std::bit_cast<std::uint64_t>(w));
  for (double b : model.bias) detail::put_u64(out, std::bit_cast<std::uint64_t>(b));
  return out;
}

inline ModelParams decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < 24 || bytes.substr(0, 8) != kCheckpointMagic) throw SerializationError("not a model checkpoint");
  const auto version = detail::get_le(bytes, 8, 4);
  if (version != kCheckpointVersion)
    throw SerializationError("unsupported checkpoint version " + std::to_string(version));
  if (detail::get_le(bytes, 12, 4) != kNumLabels) throw SerializationError("checkpoint label count mismatch");
  const std::uint64_t dim = detail::get_le(bytes, 16, 8);
  if (dim < 2 || !std::has_single_bit(dim) || dim > (std::uint64_t{1} << 32))
    throw SerializationError("checkpoint hash_dim is not a power of two");
  if (bytes.size() != 24 + 8 * (kNumLabels * dim + kNumLabels))
    throw SerializationError("checkpoint size does not match its hash_dim");
  ModelParams model(dim);
  std::size_t off = 24;
  for (double& w : model.weights) {
    w = std::bit_cast<double>(detail::get_le(bytes, off, 8));
    off += 8;
  }
  for (double& b : model.bias) {
    b = std::bit_cast<double>(detail::get_le(bytes, off, 8));
    off += 8;
  }
  return model;
}

inline void save_checkpoint(const std::string& path, const ModelParams& model) {
  text::write_file(path, encode_checkpoint(model));
}

inline ModelParams load_checkpoint(const std::string& path) { return decode_checkpoint(text::read_file(path)); }

}  // namespace cartography
