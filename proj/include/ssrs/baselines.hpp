// SPDX-License-Identifier: Apache-2.0
//
// MRT initializer, regularized zero-forcing SDMA, and the common-stream-free
// variant of the power-iteration solver.

#pragma once

#include "ssrs/gpi_solver.hpp"

#include <iostream>

namespace ssrs {

namespace detail {

inline void check_channels(const std::vector<CVec>& channels, const char* who) {
  if (channels.empty()) throw InvalidArgument(std::string(who) + ": at least one user is required");
  const Index n = channels.front().size();
  for (const auto& h : channels)
    if (h.size() != n || n == 0) throw InvalidArgument(std::string(who) + ": inconsistent channel dimensions");
}

template <bool C>
BasicPrecoderStack<C> random_unit_stack(Index n, Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BasicPrecoderStack<C> out(n, k, complex_normal_vector(n * (k + (C ? 1 : 0)), rng));
  out.normalize();
  return out;
}

}  // namespace detail

inline constexpr std::uint64_t kDegenerateInitSeed = 0x5eed5eedULL;

/// f_k = h_hat_k, f_c = mean_k h_hat_k, stacked and normalized. All-zero
/// channels fall back to a seeded random unit stack.
inline PrecoderStack mrt_init(const std::vector<CVec>& estimates) {
  detail::check_channels(estimates, "mrt_init");
  const Index n = estimates.front().size();
  const Index k_users = static_cast<Index>(estimates.size());
  PrecoderStack f(n, k_users);
  for (Index k = 0; k < k_users; ++k) {
    f.stream(k) = estimates[static_cast<std::size_t>(k)];
    f.common() += estimates[static_cast<std::size_t>(k)];
  }
  f.common() /= static_cast<double>(k_users);
  if (!f.normalize()) {
    std::clog << "mrt_init: all channel estimates are zero; using a random unit initializer\n";
    return detail::random_unit_stack<true>(n, k_users, kDegenerateInitSeed);
  }
  return f;
}

/// SDMA counterpart of the MRT initializer (no common stream).
inline SdmaPrecoderStack mrt_init_sdma(const std::vector<CVec>& estimates) {
  detail::check_channels(estimates, "mrt_init_sdma");
  const Index n = estimates.front().size();
  const Index k_users = static_cast<Index>(estimates.size());
  SdmaPrecoderStack f(n, k_users);
  for (Index k = 0; k < k_users; ++k) f.stream(k) = estimates[static_cast<std::size_t>(k)];
  if (!f.normalize()) {
    std::clog << "mrt_init_sdma: all channel estimates are zero; using a random unit initializer\n";
    return detail::random_unit_stack<false>(n, k_users, kDegenerateInitSeed);
  }
  return f;
}

/// Columns of (H H^H + reg I)^{-1} H with H = [h_hat_1 ... h_hat_K], scaled
/// to equal norm, then jointly normalized.
inline SdmaPrecoderStack rzf_precoder(const std::vector<CVec>& estimates, double regularization) {
  detail::check_channels(estimates, "rzf_precoder");
  if (!(regularization >= 0.0)) throw InvalidArgument("rzf_precoder: regularization must be nonnegative");
  const Index n = estimates.front().size();
  const Index k_users = static_cast<Index>(estimates.size());
  CMat h(n, k_users);
  for (Index k = 0; k < k_users; ++k) h.col(k) = estimates[static_cast<std::size_t>(k)];

  const CMat gram = h * h.adjoint() + regularization * CMat::Identity(n, n);
  Eigen::FullPivLU<CMat> lu(gram);
  if (!lu.isInvertible()) throw NumericFailure("rzf_precoder: singular regularized Gram matrix");
  CMat w = lu.solve(h);

  SdmaPrecoderStack f(n, k_users);
  for (Index k = 0; k < k_users; ++k) {
    const double nrm = w.col(k).norm();
    if (nrm > 0.0) f.stream(k) = w.col(k) / nrm;
  }
  if (!f.normalize()) throw NumericFailure("rzf_precoder: all precoder columns vanished");
  return f;
}

/// Regularization K sigma^2 / P.
inline SdmaPrecoderStack rzf_precoder(const std::vector<CVec>& estimates, const SystemConfig& cfg) {
  return rzf_precoder(estimates, static_cast<double>(cfg.n_users()) * cfg.user_ridge());
}

/// Power iteration without a common stream: K blocks, no common-rate term,
/// eavesdroppers see no common-stream interference.
inline GpiResult<false> gpi_sdma_solve(const ChannelSet& channels, const SystemConfig& cfg, const GpiOptions& opts = {}) {
  const QuadFormSet qf = build_quadforms_perfect(channels, cfg, false);
  return gpi_solve(qf, mrt_init_sdma(channels.users), cfg, opts);
}

inline GpiResult<false> gpi_sdma_solve(const CsitKnowledge& knowledge, const SystemConfig& cfg, const GpiOptions& opts = {}) {
  const QuadFormSet qf = build_quadforms_limited(knowledge, cfg, false);
  return gpi_solve(qf, mrt_init_sdma(knowledge.user_estimates), cfg, opts);
}

}  // namespace ssrs
