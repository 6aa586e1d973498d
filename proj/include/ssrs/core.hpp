// SPDX-License-Identifier: Apache-2.0
//
// Common numeric types, error types, and the system configuration shared by
// every stage of the secure rate-splitting precoding pipeline.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssrs {

using Index = Eigen::Index;
using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

using InvalidArgument = std::invalid_argument;

/// Raised when a factorization or a ratio evaluation produces something
/// unusable. `index` names the offending block or term (-1 if none).
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, Index index = -1)
      : std::runtime_error(what), index_(index) {}
  Index index() const noexcept { return index_; }

 private:
  Index index_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CsitMode { perfect, limited };

inline const char* to_string(CsitMode m) { return m == CsitMode::perfect ? "perfect" : "limited"; }

/// Dimensions, powers, smoothing and stopping rules of one downlink system.
/// Users 0..S-1 are secret, S..K-1 are normal.
struct SystemConfig {
  Index n_antennas = 4;
  Index n_secret = 2;
  Index n_normal = 2;
  Index n_eves = 2;
  double symbol_power = 100.0;  // P; SNR = P / noise_user
  double noise_user = 1.0;      // sigma^2
  double noise_eve = 1.0;       // sigma_e^2
  double alpha = 2.0;           // bits; see README for why not smaller
  double epsilon = 0.05;
  int t_max = 100;

  Index n_users() const { return n_secret + n_normal; }
  double user_ridge() const { return noise_user / symbol_power; }
  double eve_ridge() const { return noise_eve / symbol_power; }
  double snr_db() const { return 10.0 * std::log10(symbol_power / noise_user); }
  void set_snr_db(double db) { symbol_power = noise_user * std::pow(10.0, db / 10.0); }

  void validate() const {
    if (n_antennas < 1) throw InvalidArgument("n_antennas must be >= 1");
    if (n_secret < 0 || n_normal < 0 || n_eves < 0)
      throw InvalidArgument("user and eavesdropper counts must be nonnegative");
    if (n_users() < 1) throw InvalidArgument("at least one user is required");
    if (!(symbol_power > 0.0) || !std::isfinite(symbol_power))
      throw InvalidArgument("symbol_power must be positive and finite");
    if (!(noise_user > 0.0) || !(noise_eve > 0.0)) throw InvalidArgument("noise powers must be positive");
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (t_max < 1) throw InvalidArgument("t_max must be >= 1");
  }
};

/// Where each stream lives inside a stacked precoder. Block 0 is the common
/// stream when present; user k's private stream follows.
struct BlockLayout {
  Index n_antennas = 0;
  Index n_users = 0;
  bool has_common = true;

  Index n_blocks() const { return n_users + (has_common ? 1 : 0); }
  Index dim() const { return n_antennas * n_blocks(); }
  Index private_block(Index k) const { return has_common ? k + 1 : k; }

  friend bool operator==(const BlockLayout&, const BlockLayout&) = default;
};

/// Circularly-symmetric complex Gaussian CN(0, 1) draw.
template <class Rng>
cdouble complex_normal(Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

template <class Rng>
CVec complex_normal_vector(Index n, Rng& rng) {
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v;
}

}  // namespace ssrs
