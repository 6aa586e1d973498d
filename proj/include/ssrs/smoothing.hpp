// SPDX-License-Identifier: Apache-2.0
//
// LogSumExp surrogates for min and max:
//   lse_min(x) = -a ln sum exp(-x_i / a),   lse_max(x) = a ln sum exp(x_i / a)
// with lse_min <= min <= lse_min + a ln n and max <= lse_max <= max + a ln n.

#pragma once

#include "ssrs/core.hpp"

#include <algorithm>
#include <span>

namespace ssrs {

inline double lse_max(std::span<const double> values, double alpha) {
  if (values.empty()) throw InvalidArgument("lse_max: empty input");
  if (!(alpha > 0.0)) throw InvalidArgument("lse_max: alpha must be positive");
  const double top = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp((v - top) / alpha);
  return top + alpha * std::log(acc);
}

inline double lse_min(std::span<const double> values, double alpha) {
  if (values.empty()) throw InvalidArgument("lse_min: empty input");
  if (!(alpha > 0.0)) throw InvalidArgument("lse_min: alpha must be positive");
  const double low = *std::min_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp(-(v - low) / alpha);
  return low - alpha * std::log(acc);
}

/// Normalized weights exp(-x_i/a) / sum_j exp(-x_j/a) (the gradient of lse_min).
inline std::vector<double> softmin_weights(std::span<const double> values, double alpha) {
  if (values.empty()) return {};
  const double low = *std::min_element(values.begin(), values.end());
  std::vector<double> w;
  double acc = 0.0;
  for (double v : values) acc += w.emplace_back(std::exp(-(v - low) / alpha));
  for (double& x : w) x /= acc;
  return w;
}

/// Normalized weights exp(x_i/a) / sum_j exp(x_j/a) (the gradient of lse_max).
inline std::vector<double> softmax_weights(std::span<const double> values, double alpha) {
  if (values.empty()) return {};
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> w;
  double acc = 0.0;
  for (double v : values) acc += w.emplace_back(std::exp((v - top) / alpha));
  for (double& x : w) x /= acc;
  return w;
}

}  // namespace ssrs
