// SPDX-License-Identifier: Apache-2.0
//
// Spatially correlated single-antenna user/eavesdropper channels: one-ring
// covariances, Karhunen-Loeve sampling, and the FDD limited-CSIT view.

#pragma once

#include "ssrs/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <optional>
#include <random>

namespace ssrs {

/// Antenna coordinates in carrier wavelengths.
struct ArrayGeometry {
  Index n_antennas = 0;
  double spacing_wavelengths = 0.5;
  std::vector<Eigen::Vector2d> positions;

  /// Uniform linear array along the x-axis.
  static ArrayGeometry ula(Index n, double spacing = 0.5) {
    if (n < 1) throw InvalidArgument("ArrayGeometry: n_antennas must be >= 1");
    if (!(spacing > 0.0)) throw InvalidArgument("ArrayGeometry: spacing must be positive");
    ArrayGeometry g;
    g.n_antennas = n;
    g.spacing_wavelengths = spacing;
    g.positions.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) g.positions.emplace_back(spacing * static_cast<double>(i), 0.0);
    return g;
  }

  void validate() const {
    if (n_antennas < 1 || static_cast<Index>(positions.size()) != n_antennas)
      throw InvalidArgument("ArrayGeometry: positions must have exactly n_antennas entries");
  }
};

struct HermitianCovariance {
  CMat entries;
  Index dim() const { return entries.rows(); }
};

/// Truncated eigendecomposition R ~= U diag(eigvals) U^H, eigenvalues descending.
struct KlDecomposition {
  CMat eigvecs;
  RVec eigvals;
  Index rank() const { return eigvals.size(); }
  Index dim() const { return eigvecs.rows(); }

  CMat reconstruct() const { return eigvecs * eigvals.asDiagonal() * eigvecs.adjoint(); }
  /// U diag(sqrt(eigvals)), the colouring transform of the channel.
  CMat colouring() const { return eigvecs * eigvals.cwiseSqrt().asDiagonal(); }
};

inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

/// Far-field response a_n = exp(-j 2pi r_n . [cos t, sin t]) of the array.
inline CVec steering_vector(double aoa, const ArrayGeometry& geometry) {
  geometry.validate();
  const Eigen::Vector2d dir(std::cos(aoa), std::sin(aoa));
  CVec a(geometry.n_antennas);
  for (Index n = 0; n < geometry.n_antennas; ++n)
    a(n) = std::polar(1.0, -2.0 * kPi * geometry.positions[static_cast<std::size_t>(n)].dot(dir));
  return a;
}

inline constexpr int kOneRingIntervals = 512;

/// One-ring spatial covariance: the average of the array's outer-product
/// response over the angular interval [aoa - spread, aoa + spread].
/// Composite Simpson over kOneRingIntervals subintervals.
inline HermitianCovariance one_ring_covariance(double aoa, double spread, const ArrayGeometry& geometry) {
  if (!(spread > 0.0) || !std::isfinite(spread)) throw InvalidArgument("one_ring_covariance: spread must be > 0");
  geometry.validate();
  const Index n = geometry.n_antennas;
  const int intervals = kOneRingIntervals;
  const double lo = aoa - spread;
  const double h = 2.0 * spread / intervals;

  CMat r = CMat::Zero(n, n);
  for (int i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const CVec a = steering_vector(lo + h * i, geometry);
    r.noalias() += w * (a * a.adjoint());
  }
  r *= h / 3.0 / (2.0 * spread);
  r = hermitian_part(r);
  r.diagonal().setOnes();  // integrand is exactly 1 on the diagonal
  return {r};
}

inline constexpr double kDefaultTruncRel = 1e-10;

inline KlDecomposition kl_decompose(const HermitianCovariance& cov, double trunc_rel = kDefaultTruncRel) {
  const CMat& r = cov.entries;
  if (r.rows() == 0 || r.rows() != r.cols()) throw InvalidArgument("kl_decompose: covariance must be square");
  if (!(trunc_rel >= 0.0)) throw InvalidArgument("kl_decompose: trunc_rel must be nonnegative");
  const double scale = std::max(r.norm(), 1e-300);
  if ((r - r.adjoint()).norm() > 1e-12 * scale) throw InvalidArgument("kl_decompose: covariance is not Hermitian");

  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(r));
  if (es.info() != Eigen::Success) throw NumericFailure("kl_decompose: eigensolver failed");
  const RVec& evals = es.eigenvalues();  // ascending
  const double lmax = std::max(evals(evals.size() - 1), 0.0);
  const double threshold = trunc_rel * lmax;

  std::vector<Index> keep;
  for (Index i = evals.size() - 1; i >= 0; --i)
    if (evals(i) > threshold && evals(i) > 0.0) keep.push_back(i);

  KlDecomposition kl;
  kl.eigvecs.resize(r.rows(), static_cast<Index>(keep.size()));
  kl.eigvals.resize(static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    kl.eigvecs.col(static_cast<Index>(j)) = es.eigenvectors().col(keep[j]);
    kl.eigvals(static_cast<Index>(j)) = evals(keep[j]);
  }
  return kl;
}

template <class Rng>
CVec sample_channel(const KlDecomposition& kl, Rng& rng) {
  const CVec zeta = complex_normal_vector(kl.rank(), rng);
  return kl.colouring() * zeta;
}

inline void check_kappa(double kappa, const char* who) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InvalidArgument(std::string(who) + ": kappa must lie in [0, 1]");
}

struct FddEstimate {
  CVec estimate;      // h_hat = sqrt(1-kappa^2) h + q
  CVec error;         // phi = h - h_hat
  CVec quantization;  // q = kappa U sqrt(Lambda) v
};

/// FDD channel estimate with a fresh quantization draw.
template <class Rng>
FddEstimate fdd_estimate(const CVec& h, const KlDecomposition& kl, double kappa, Rng& rng) {
  check_kappa(kappa, "fdd_estimate");
  if (h.size() != kl.dim()) throw InvalidArgument("fdd_estimate: channel/covariance dimension mismatch");
  const CVec v = complex_normal_vector(kl.rank(), rng);
  FddEstimate out;
  out.quantization = kappa * (kl.colouring() * v);
  out.estimate = std::sqrt(1.0 - kappa * kappa) * h + out.quantization;
  out.error = h - out.estimate;
  return out;
}

/// Phi = (2 - 2 sqrt(1 - kappa^2)) U Lambda U^H.
inline CMat error_covariance(const KlDecomposition& kl, double kappa) {
  check_kappa(kappa, "error_covariance");
  const double scale = 2.0 - 2.0 * std::sqrt(1.0 - kappa * kappa);
  return hermitian_part(scale * kl.reconstruct());
}

/// Geometry of one scenario draw. Users sit on an equispaced fan centred at
/// `user_sector_center`; the spacing is `user_spacing` when set, otherwise
/// `user_sector_width / (K - 1)`. Eavesdroppers are uniform over their sector.
struct ScenarioLayout {
  double angular_spread = kPi / 6.0;
  double kappa = 0.4;
  double user_sector_center = kPi / 2.0;
  double user_sector_width = kPi / 6.0;
  std::optional<double> user_spacing;
  bool randomize_user_center = false;
  double eve_sector_start = 0.0;
  double eve_sector_width = 2.0 * kPi;
  double antenna_spacing = 0.5;
  double trunc_rel = kDefaultTruncRel;

  double spacing_for(Index n_users) const {
    if (user_spacing) return *user_spacing;
    return n_users > 1 ? user_sector_width / static_cast<double>(n_users - 1) : 0.0;
  }
};

/// Channels and statistics seen by the transmitter.
struct CsitKnowledge {
  std::vector<CVec> user_estimates;  // h_hat_k
  std::vector<CMat> error_covs;      // Phi_k
  std::vector<CMat> user_covs;       // R_k
  std::vector<CMat> eve_covs;        // R_e
};

/// Instantaneous channels.
struct ChannelSet {
  std::vector<CVec> users;
  std::vector<CVec> eves;
};

struct ChannelRealization {
  std::vector<CVec> user_channels;
  std::vector<CVec> eve_channels;
  std::vector<CVec> user_estimates;
  std::vector<CVec> user_errors;
  std::vector<CVec> user_quantization;
  std::vector<CMat> error_covs;
  std::vector<HermitianCovariance> user_covs;
  std::vector<HermitianCovariance> eve_covs;
  double kappa = 0.0;

  std::vector<double> user_aoas;
  std::vector<double> eve_aoas;
  double user_spacing = 0.0;

  ChannelSet truth() const { return {user_channels, eve_channels}; }

  CsitKnowledge knowledge() const {
    CsitKnowledge k;
    k.user_estimates = user_estimates;
    k.error_covs = error_covs;
    for (const auto& r : user_covs) k.user_covs.push_back(r.entries);
    for (const auto& r : eve_covs) k.eve_covs.push_back(r.entries);
    return k;
  }
};

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

template <class Rng>
ChannelRealization draw_scenario(const SystemConfig& config, const ScenarioLayout& layout, Rng& rng) {
  config.validate();
  check_kappa(layout.kappa, "draw_scenario");
  const Index k_users = config.n_users();
  const ArrayGeometry geometry = ArrayGeometry::ula(config.n_antennas, layout.antenna_spacing);

  ChannelRealization out;
  out.kappa = layout.kappa;
  out.user_spacing = layout.spacing_for(k_users);

  double center = layout.user_sector_center;
  if (layout.randomize_user_center) center = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
  for (Index k = 0; k < k_users; ++k) {
    const double offset = (static_cast<double>(k) - 0.5 * static_cast<double>(k_users - 1)) * out.user_spacing;
    out.user_aoas.push_back(wrap_angle(center + offset));
  }
  std::uniform_real_distribution<double> eve_angle(0.0, layout.eve_sector_width);
  for (Index e = 0; e < config.n_eves; ++e) out.eve_aoas.push_back(wrap_angle(layout.eve_sector_start + eve_angle(rng)));

  for (Index k = 0; k < k_users; ++k) {
    auto cov = one_ring_covariance(out.user_aoas[static_cast<std::size_t>(k)], layout.angular_spread, geometry);
    const KlDecomposition kl = kl_decompose(cov, layout.trunc_rel);
    CVec h = sample_channel(kl, rng);
    FddEstimate est = fdd_estimate(h, kl, layout.kappa, rng);
    out.user_channels.push_back(std::move(h));
    out.user_estimates.push_back(std::move(est.estimate));
    out.user_errors.push_back(std::move(est.error));
    out.user_quantization.push_back(std::move(est.quantization));
    out.error_covs.push_back(error_covariance(kl, layout.kappa));
    out.user_covs.push_back(std::move(cov));
  }
  for (Index e = 0; e < config.n_eves; ++e) {
    auto cov = one_ring_covariance(out.eve_aoas[static_cast<std::size_t>(e)], layout.angular_spread, geometry);
    const KlDecomposition kl = kl_decompose(cov, layout.trunc_rel);
    out.eve_channels.push_back(sample_channel(kl, rng));
    out.eve_covs.push_back(std::move(cov));
  }
  return out;
}

/// Scenario with an explicit user count check, for callers that state K.
template <class Rng>
ChannelRealization draw_scenario(const SystemConfig& config, Index stated_users, const ScenarioLayout& layout, Rng& rng) {
  if (stated_users != config.n_secret + config.n_normal)
    throw InvalidArgument("draw_scenario: K must equal S + M");
  return draw_scenario(config, layout, rng);
}

}  // namespace ssrs
