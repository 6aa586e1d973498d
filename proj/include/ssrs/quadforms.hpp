// SPDX-License-Identifier: Apache-2.0
//
// Rayleigh-quotient form of every rate: each SE is log2(f^H A f / f^H B f)
// for block-diagonal Hermitian A, B acting on the stacked precoder.

#pragma once

#include "ssrs/channel_model.hpp"
#include "ssrs/precoder.hpp"

namespace ssrs {

/// Block-diagonal Hermitian operator stored as n_blocks dense N x N blocks.
struct BlockDiag {
  std::vector<CMat> blocks;

  static BlockDiag uniform(Index n_blocks, const CMat& block) {
    return {std::vector<CMat>(static_cast<std::size_t>(n_blocks), block)};
  }

  Index n_blocks() const { return static_cast<Index>(blocks.size()); }
  Index block_dim() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  CMat& operator[](Index b) { return blocks[static_cast<std::size_t>(b)]; }
  const CMat& operator[](Index b) const { return blocks[static_cast<std::size_t>(b)]; }

  /// f^H M f (real part; M is Hermitian).
  double form(const CVec& f) const {
    const Index n = block_dim();
    double acc = 0.0;
    for (Index b = 0; b < n_blocks(); ++b) {
      const auto fb = f.segment(b * n, n);
      acc += fb.dot((*this)[b] * fb).real();
    }
    return acc;
  }

  CVec apply(const CVec& f) const {
    const Index n = block_dim();
    CVec out(f.size());
    for (Index b = 0; b < n_blocks(); ++b) out.segment(b * n, n).noalias() = (*this)[b] * f.segment(b * n, n);
    return out;
  }

  CMat dense() const {
    const Index n = block_dim();
    CMat out = CMat::Zero(n * n_blocks(), n * n_blocks());
    for (Index b = 0; b < n_blocks(); ++b) out.block(b * n, b * n, n, n) = (*this)[b];
    return out;
  }
};

/// Numerator/denominator pair of one Rayleigh-quotient rate.
struct QuadFormPair {
  BlockDiag num;
  BlockDiag den;

  double ratio(const CVec& f) const {
    const double a = num.form(f);
    const double b = den.form(f);
    return a / b;
  }
};

/// Rate and leakage pairs of one channel state.
///
/// Perfect variant: every pair encodes 1 + SINR.
/// Limited variant: common/private pairs are the lower-bound family (1 + SINR),
/// leakage pairs are the collusion upper-bound family whose ratio is the
/// SINR-like term itself (numerator carries signal only).
struct QuadFormSet {
  CsitMode variant = CsitMode::perfect;
  BlockLayout layout{};
  Index n_secret = 0;
  Index n_eves = 0;
  std::vector<QuadFormPair> common_pairs;    // K entries, empty without a common stream
  std::vector<QuadFormPair> private_pairs;   // K entries
  std::vector<QuadFormPair> eve_leak_pairs;  // S x E, index s * E + e
  std::vector<QuadFormPair> user_leak_pairs; // S x (K-1), index s * (K-1) + j, u increasing over K \ {s}

  Index n_users() const { return layout.n_users; }
  Index n_wiretap_users() const { return layout.n_users - 1; }

  const QuadFormPair& eve_leak(Index s, Index e) const {
    return eve_leak_pairs[static_cast<std::size_t>(s * n_eves + e)];
  }
  const QuadFormPair& user_leak(Index s, Index j) const {
    return user_leak_pairs[static_cast<std::size_t>(s * n_wiretap_users() + j)];
  }
  /// User index of the j-th legitimate wiretapper of secret stream s.
  static Index wiretapper_user(Index s, Index j) { return j < s ? j : j + 1; }
};

namespace detail {

inline CMat ridge(Index n, double r) { return r * CMat::Identity(n, n); }

// I (x) G + r I; callers then overwrite the blocks a given term excludes.
inline BlockDiag signal_blocks(Index n_blocks, const CMat& g, double r) {
  return BlockDiag::uniform(n_blocks, g + ridge(g.rows(), r));
}

}  // namespace detail

/// Pairs from instantaneous channels, the transmitter knowing h_k and g_e.
inline QuadFormSet build_quadforms_perfect(const ChannelSet& ch, const SystemConfig& cfg, bool with_common = true) {
  cfg.validate();
  const Index n = cfg.n_antennas;
  const Index k_users = cfg.n_users();
  if (static_cast<Index>(ch.users.size()) != k_users) throw InvalidArgument("build_quadforms_perfect: user count mismatch");
  if (static_cast<Index>(ch.eves.size()) != cfg.n_eves) throw InvalidArgument("build_quadforms_perfect: eavesdropper count mismatch");
  for (const auto& h : ch.users)
    if (h.size() != n) throw InvalidArgument("build_quadforms_perfect: user channel dimension mismatch");
  for (const auto& g : ch.eves)
    if (g.size() != n) throw InvalidArgument("build_quadforms_perfect: eavesdropper channel dimension mismatch");

  QuadFormSet qf;
  qf.variant = CsitMode::perfect;
  qf.layout = {n, k_users, with_common};
  qf.n_secret = cfg.n_secret;
  qf.n_eves = cfg.n_eves;
  const Index nb = qf.layout.n_blocks();
  const double r = cfg.user_ridge();
  const double re = cfg.eve_ridge();
  const CMat noise = detail::ridge(n, r);
  const CMat eve_noise = detail::ridge(n, re);

  std::vector<CMat> gram;
  for (const auto& h : ch.users) gram.push_back(h * h.adjoint());

  for (Index k = 0; k < k_users; ++k) {
    const CMat& hh = gram[static_cast<std::size_t>(k)];
    const Index pk = qf.layout.private_block(k);
    if (with_common) {
      QuadFormPair c{detail::signal_blocks(nb, hh, r), {}};
      c.den = c.num;
      c.den[0] = noise;
      qf.common_pairs.push_back(std::move(c));
    }
    QuadFormPair p{detail::signal_blocks(nb, hh, r), {}};
    if (with_common) p.num[0] = noise;
    p.den = p.num;
    p.den[pk] = noise;
    qf.private_pairs.push_back(std::move(p));
  }

  for (Index s = 0; s < cfg.n_secret; ++s) {
    const Index ps = qf.layout.private_block(s);
    for (const auto& g : ch.eves) {
      QuadFormPair e{detail::signal_blocks(nb, g * g.adjoint(), re), {}};
      e.den = e.num;
      e.den[ps] = eve_noise;
      qf.eve_leak_pairs.push_back(std::move(e));
    }
    for (Index u = 0; u < k_users; ++u) {
      if (u == s) continue;
      QuadFormPair c{detail::signal_blocks(nb, gram[static_cast<std::size_t>(u)], r), {}};
      if (with_common) c.num[0] = noise;
      c.num[qf.layout.private_block(u)] = noise;
      c.den = c.num;
      c.den[ps] = noise;
      qf.user_leak_pairs.push_back(std::move(c));
    }
  }
  return qf;
}

/// Lower-bound rate pairs from estimates plus error covariance, and
/// collusion upper-bound leakage pairs from the user/eavesdropper covariances.
inline QuadFormSet build_quadforms_limited(const CsitKnowledge& know, const SystemConfig& cfg, bool with_common = true) {
  cfg.validate();
  const Index n = cfg.n_antennas;
  const Index k_users = cfg.n_users();
  const auto uk = static_cast<std::size_t>(k_users);
  if (know.user_estimates.size() != uk) throw InvalidArgument("build_quadforms_limited: estimate count mismatch");
  if (know.error_covs.size() != uk) throw InvalidArgument("build_quadforms_limited: missing error covariances");
  if (cfg.n_secret > 0 && know.user_covs.size() != uk)
    throw InvalidArgument("build_quadforms_limited: missing user covariances");
  if (cfg.n_secret > 0 && static_cast<Index>(know.eve_covs.size()) != cfg.n_eves)
    throw InvalidArgument("build_quadforms_limited: missing eavesdropper covariances");
  auto check_sq = [n](const CMat& m) {
    if (m.rows() != n || m.cols() != n) throw InvalidArgument("build_quadforms_limited: covariance dimension mismatch");
  };
  for (const auto& h : know.user_estimates)
    if (h.size() != n) throw InvalidArgument("build_quadforms_limited: estimate dimension mismatch");
  for (const auto& m : know.error_covs) check_sq(m);
  for (const auto& m : know.user_covs) check_sq(m);
  for (const auto& m : know.eve_covs) check_sq(m);

  QuadFormSet qf;
  qf.variant = CsitMode::limited;
  qf.layout = {n, k_users, with_common};
  qf.n_secret = cfg.n_secret;
  qf.n_eves = cfg.n_eves;
  const Index nb = qf.layout.n_blocks();
  const double r = cfg.user_ridge();
  const double re = cfg.eve_ridge();
  const CMat noise = detail::ridge(n, r);
  const CMat eve_noise = detail::ridge(n, re);

  for (Index k = 0; k < k_users; ++k) {
    const CVec& hk = know.user_estimates[static_cast<std::size_t>(k)];
    const CMat& phi = know.error_covs[static_cast<std::size_t>(k)];
    const CMat est = hk * hk.adjoint();
    const CMat total = est + phi;
    const Index pk = qf.layout.private_block(k);
    if (with_common) {
      QuadFormPair c{detail::signal_blocks(nb, total, r), {}};
      c.den = c.num;
      c.den[0] = phi + noise;
      qf.common_pairs.push_back(std::move(c));
    }
    QuadFormPair p{detail::signal_blocks(nb, total, r), {}};
    if (with_common) p.num[0] = noise;
    p.den = p.num;
    p.den[pk] = phi + noise;
    qf.private_pairs.push_back(std::move(p));
  }

  const CMat zero = CMat::Zero(n, n);
  for (Index s = 0; s < cfg.n_secret; ++s) {
    const Index ps = qf.layout.private_block(s);
    for (const auto& re_cov : know.eve_covs) {
      QuadFormPair e{BlockDiag::uniform(nb, zero), detail::signal_blocks(nb, re_cov, re)};
      e.num[ps] = re_cov;
      e.den[ps] = eve_noise;
      qf.eve_leak_pairs.push_back(std::move(e));
    }
    for (Index u = 0; u < k_users; ++u) {
      if (u == s) continue;
      const CMat& ru = know.user_covs[static_cast<std::size_t>(u)];
      QuadFormPair c{BlockDiag::uniform(nb, zero), detail::signal_blocks(nb, ru, r)};
      c.num[ps] = ru;
      if (with_common) c.den[0] = noise;
      c.den[qf.layout.private_block(u)] = noise;
      c.den[ps] = noise;
      qf.user_leak_pairs.push_back(std::move(c));
    }
  }
  return qf;
}

}  // namespace ssrs
