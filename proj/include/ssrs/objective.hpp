// SPDX-License-Identifier: Apache-2.0
//
// Smoothed sum-secrecy objectives maximized by the power iteration. Rates are
// in bits; the LogSumExp temperature alpha is in bits as well, so that
// w_{c,k} = ratio^{-1/(alpha ln 2)} = exp(-R_{c,k} / alpha).

#pragma once

#include "ssrs/quadforms.hpp"
#include "ssrs/smoothing.hpp"

namespace ssrs {

inline double bits(double ratio) { return std::log(ratio) / kLn2; }

/// Per-term rates read off the quadratic forms of one QuadFormSet.
struct QuadFormRates {
  std::vector<double> common;                // R_{c,k}, empty without a common stream
  std::vector<double> privates;              // R_k
  std::vector<std::vector<double>> leakage;  // per secret: perfect -> E eve rates then K-1 user rates;
                                             // limited -> the raw ub ratios in the same order
};

inline void check_stack(const QuadFormSet& qf, const CVec& f) {
  if (f.size() != qf.layout.dim()) throw InvalidArgument("precoder dimension does not match the quadratic forms");
}

inline QuadFormRates quadform_rates(const QuadFormSet& qf, const CVec& f) {
  check_stack(qf, f);
  QuadFormRates out;
  for (const auto& p : qf.common_pairs) out.common.push_back(bits(p.ratio(f)));
  for (const auto& p : qf.private_pairs) out.privates.push_back(bits(p.ratio(f)));
  for (Index s = 0; s < qf.n_secret; ++s) {
    std::vector<double> terms;
    for (Index e = 0; e < qf.n_eves; ++e) {
      const double r = qf.eve_leak(s, e).ratio(f);
      terms.push_back(qf.variant == CsitMode::perfect ? bits(r) : r);
    }
    for (Index j = 0; j < qf.n_wiretap_users(); ++j) {
      const double r = qf.user_leak(s, j).ratio(f);
      terms.push_back(qf.variant == CsitMode::perfect ? bits(r) : r);
    }
    out.leakage.push_back(std::move(terms));
  }
  return out;
}

/// Leakage of secret stream s as it enters the smoothed objective.
inline double smoothed_leakage(const QuadFormSet& qf, const std::vector<double>& terms, double alpha) {
  if (terms.empty()) return 0.0;
  if (qf.variant == CsitMode::perfect) return lse_max(terms, alpha);
  double acc = 0.0;
  for (double r : terms) acc += r;
  return std::log1p(acc) / kLn2;
}

/// Perfect: lse_min(R_c) + sum_s [R_s - lse_max(leakage_s)] + sum_m R_m.
/// Limited: lse_min(R_c^lb) + sum_s [R_s^lb - log2(1 + sum ub ratios)] + sum_m R_m^lb.
/// No [.]^+ clamp. Without a common stream the first term is absent.
inline double smoothed_objective(const QuadFormSet& qf, const CVec& f, const SystemConfig& cfg) {
  const QuadFormRates rates = quadform_rates(qf, f);
  double value = 0.0;
  if (!rates.common.empty()) value += lse_min(rates.common, cfg.alpha);
  for (Index k = 0; k < qf.n_users(); ++k) value += rates.privates[static_cast<std::size_t>(k)];
  for (Index s = 0; s < qf.n_secret; ++s)
    value -= smoothed_leakage(qf, rates.leakage[static_cast<std::size_t>(s)], cfg.alpha);
  return value;
}

template <bool C>
double smoothed_objective(const QuadFormSet& qf, const BasicPrecoderStack<C>& f, const SystemConfig& cfg) {
  if (qf.layout.has_common != C) throw InvalidArgument("smoothed_objective: stack/quadform layout mismatch");
  return smoothed_objective(qf, f.entries(), cfg);
}

/// Guarded variant check for callers that expect a particular CSIT mode.
inline double smoothed_objective(const QuadFormSet& qf, const CVec& f, const SystemConfig& cfg, CsitMode expected) {
  if (qf.variant != expected) throw InvalidArgument("smoothed_objective: quadform variant mismatch");
  return smoothed_objective(qf, f, cfg);
}

}  // namespace ssrs
