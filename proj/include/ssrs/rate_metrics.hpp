// SPDX-License-Identifier: Apache-2.0
//
// Direct spectral-efficiency formulas (bits/channel use) for the common
// stream, private streams, and wiretap leakage of secret streams.

#pragma once

#include "ssrs/channel_model.hpp"
#include "ssrs/precoder.hpp"

#include <algorithm>
#include <numeric>

namespace ssrs {

namespace detail {

inline double power_towards(const CVec& channel, const auto& precoder) {
  return std::norm(channel.dot(precoder));  // |h^H f|^2
}

inline void check_dims(const ChannelSet& ch, const PrecoderStack& f, const SystemConfig& cfg) {
  if (static_cast<Index>(ch.users.size()) != cfg.n_users() || f.n_users() != cfg.n_users())
    throw InvalidArgument("rate: user count mismatch");
  if (static_cast<Index>(ch.eves.size()) != cfg.n_eves) throw InvalidArgument("rate: eavesdropper count mismatch");
  if (f.n_antennas() != cfg.n_antennas) throw InvalidArgument("rate: antenna count mismatch");
  for (const auto& h : ch.users)
    if (h.size() != cfg.n_antennas) throw InvalidArgument("rate: user channel dimension mismatch");
  for (const auto& g : ch.eves)
    if (g.size() != cfg.n_antennas) throw InvalidArgument("rate: eavesdropper channel dimension mismatch");
}

inline double log2_1p(double sinr) { return std::log1p(sinr) / kLn2; }

}  // namespace detail

struct CommonRates {
  std::vector<double> per_user;
  double min = 0.0;
};

inline CommonRates common_se(const ChannelSet& ch, const PrecoderStack& f, const SystemConfig& cfg) {
  detail::check_dims(ch, f, cfg);
  CommonRates out;
  for (Index k = 0; k < cfg.n_users(); ++k) {
    const CVec& h = ch.users[static_cast<std::size_t>(k)];
    double interference = cfg.user_ridge();
    for (Index i = 0; i < cfg.n_users(); ++i) interference += detail::power_towards(h, f.stream(i));
    out.per_user.push_back(detail::log2_1p(detail::power_towards(h, f.common()) / interference));
  }
  out.min = *std::min_element(out.per_user.begin(), out.per_user.end());
  return out;
}

/// Post-SIC private rates: the common stream is already cancelled.
inline std::vector<double> private_se(const ChannelSet& ch, const PrecoderStack& f, const SystemConfig& cfg) {
  detail::check_dims(ch, f, cfg);
  std::vector<double> out;
  for (Index k = 0; k < cfg.n_users(); ++k) {
    const CVec& h = ch.users[static_cast<std::size_t>(k)];
    double interference = cfg.user_ridge();
    for (Index i = 0; i < cfg.n_users(); ++i)
      if (i != k) interference += detail::power_towards(h, f.stream(i));
    out.push_back(detail::log2_1p(detail::power_towards(h, f.stream(k)) / interference));
  }
  return out;
}

struct LeakageRates {
  std::vector<double> eves;   // one per eavesdropper
  std::vector<double> users;  // one per u != s, in increasing u
  double max = 0.0;
};

/// Wiretap rates on secret stream `s`. Eavesdroppers see the common stream as
/// interference; a legitimate wiretapper u has cancelled it and knows f_u.
inline LeakageRates leakage_se(const ChannelSet& ch, const PrecoderStack& f, const SystemConfig& cfg, Index s) {
  detail::check_dims(ch, f, cfg);
  if (s < 0 || s >= cfg.n_secret) throw InvalidArgument("leakage_se: s is not a secret user");
  LeakageRates out;
  for (const CVec& g : ch.eves) {
    double interference = cfg.eve_ridge() + detail::power_towards(g, f.common());
    for (Index i = 0; i < cfg.n_users(); ++i)
      if (i != s) interference += detail::power_towards(g, f.stream(i));
    out.eves.push_back(detail::log2_1p(detail::power_towards(g, f.stream(s)) / interference));
  }
  for (Index u = 0; u < cfg.n_users(); ++u) {
    if (u == s) continue;
    const CVec& h = ch.users[static_cast<std::size_t>(u)];
    double interference = cfg.user_ridge();
    for (Index i = 0; i < cfg.n_users(); ++i)
      if (i != u && i != s) interference += detail::power_towards(h, f.stream(i));
    out.users.push_back(detail::log2_1p(detail::power_towards(h, f.stream(s)) / interference));
  }
  for (double r : out.eves) out.max = std::max(out.max, r);
  for (double r : out.users) out.max = std::max(out.max, r);
  return out;
}

struct RateReport {
  std::vector<double> common_per_user;
  double common_min = 0.0;
  std::vector<double> private_rates;
  std::vector<double> leakage_per_secret;
  std::vector<double> secrecy_per_secret;
  double sum_secrecy_se = 0.0;
};

/// Evaluation objective with the [.]^+ clamp on each secret user.
inline RateReport sum_secrecy_se(const ChannelSet& ch, const PrecoderStack& f, const SystemConfig& cfg) {
  RateReport rep;
  const CommonRates c = common_se(ch, f, cfg);
  rep.common_per_user = c.per_user;
  rep.common_min = c.min;
  rep.private_rates = private_se(ch, f, cfg);
  rep.sum_secrecy_se = rep.common_min;
  for (Index s = 0; s < cfg.n_secret; ++s) {
    const double leak = leakage_se(ch, f, cfg, s).max;
    const double secrecy = std::max(rep.private_rates[static_cast<std::size_t>(s)] - leak, 0.0);
    rep.leakage_per_secret.push_back(leak);
    rep.secrecy_per_secret.push_back(secrecy);
    rep.sum_secrecy_se += secrecy;
  }
  for (Index m = cfg.n_secret; m < cfg.n_users(); ++m) rep.sum_secrecy_se += rep.private_rates[static_cast<std::size_t>(m)];
  return rep;
}

inline RateReport sum_secrecy_se(const ChannelSet& ch, const SdmaPrecoderStack& f, const SystemConfig& cfg) {
  return sum_secrecy_se(ch, with_zero_common(f), cfg);
}

}  // namespace ssrs
