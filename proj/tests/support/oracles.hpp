// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference computations for tests. These use long double and direct
// formulas and share no code with the library paths they check.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct NaiveDynamics {
  long double confidence, variability, correctness;
};

// series[e] = (probability of gold at epoch e, predicted == gold at epoch e)
inline NaiveDynamics dynamics(const std::vector<std::pair<double, bool>>& series) {
  long double mean = 0;
  for (const auto& [p, ok] : series) mean += p;
  mean /= static_cast<long double>(series.size());
  long double var = 0;
  for (const auto& [p, ok] : series) var += (p - mean) * (p - mean);
  var /= static_cast<long double>(series.size());
  long double hits = 0;
  for (const auto& [p, ok] : series) hits += ok ? 1 : 0;
  return {mean, std::sqrt(var), hits / static_cast<long double>(series.size())};
}

inline std::array<long double, 3> softmax(const std::array<long double, 3>& z) {
  const long double e0 = std::exp(z[0]), e1 = std::exp(z[1]), e2 = std::exp(z[2]);
  const long double s = e0 + e1 + e2;
  return {e0 / s, e1 / s, e2 / s};
}

// Dense problem: x[i] has `dim` entries, w is 3 x dim row-major, b has 3.
struct Dense {
  std::size_t dim;
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  double l2;
};

inline long double loss(const Dense& p, const std::vector<double>& w, const std::array<double, 3>& b) {
  long double total = 0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    std::array<long double, 3> z{};
    for (int k = 0; k < 3; ++k) {
      z[k] = b[k];
      for (std::size_t j = 0; j < p.dim; ++j) z[k] += static_cast<long double>(w[k * p.dim + j]) * p.x[i][j];
    }
    total += -std::log(softmax(z)[p.y[i]]);
  }
  total /= static_cast<long double>(p.x.size());
  long double sq = 0;
  for (double v : w) sq += static_cast<long double>(v) * v;
  return total + 0.5L * p.l2 * sq;
}

}  // namespace oracle
