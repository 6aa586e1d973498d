// SPDX-License-Identifier: Apache-2.0
//
// Generalized power iteration for the eigenvector-dependent eigenproblem
//   B(f)^{-1} A(f) f = lambda(f) f
// that characterizes stationary points of the smoothed objective.
//
// A(f) and B(f) are weighted sums of the normalized numerator/denominator
// matrices of every rate term. The gradient of the objective with respect to
// conj(f) is (A(f) - B(f)) f / ln 2, and f^H A f = f^H B f for every f, so a
// fixed point of f <- normalize(B^{-1} A f) is a stationary point.

#pragma once

#include "ssrs/objective.hpp"

#include <limits>
#include <numeric>
#include <optional>

namespace ssrs {

/// Term weights at one precoder.
///
/// Raw weights follow the closed forms (common: ratio^{-1/(alpha ln 2)};
/// perfect leakage: ratio^{1/(alpha ln 2)}; limited leakage: the ub ratio).
/// For very small alpha the raw values can under/overflow; the normalized
/// shares are computed in shifted form and are what the operator uses.
struct WeightSet {
  CsitMode variant = CsitMode::perfect;
  std::vector<double> common_w;
  std::vector<double> common_share;
  std::vector<std::vector<double>> eve_w;   // [s][e]
  std::vector<std::vector<double>> user_w;  // [s][j], j over K \ {s}
  std::vector<std::vector<double>> eve_share;
  std::vector<std::vector<double>> user_share;
};

namespace detail {

inline double checked_ratio(const QuadFormPair& p, const CVec& f, Index index, bool allow_zero) {
  double r = p.ratio(f);
  if (allow_zero && r < 0.0 && r > -1e-12) r = 0.0;  // rounding on a PSD numerator
  if (!std::isfinite(r) || r < 0.0 || (!allow_zero && r <= 0.0))
    throw NumericFailure("non-finite or non-positive quadratic-form ratio", index);
  return r;
}

}  // namespace detail

inline WeightSet compute_weights(const QuadFormSet& qf, const CVec& f, const SystemConfig& cfg) {
  check_stack(qf, f);
  const double expo = 1.0 / (cfg.alpha * kLn2);
  WeightSet w;
  w.variant = qf.variant;

  std::vector<double> common_bits;
  for (std::size_t k = 0; k < qf.common_pairs.size(); ++k) {
    const double r = detail::checked_ratio(qf.common_pairs[k], f, static_cast<Index>(k), false);
    w.common_w.push_back(std::pow(r, -expo));
    common_bits.push_back(bits(r));
  }
  w.common_share = softmin_weights(common_bits, cfg.alpha);

  Index term = 0;
  for (Index s = 0; s < qf.n_secret; ++s) {
    std::vector<double> eve_raw, user_raw, terms;
    for (Index e = 0; e < qf.n_eves; ++e, ++term) {
      const bool limited = qf.variant == CsitMode::limited;
      const double r = detail::checked_ratio(qf.eve_leak(s, e), f, term, limited);
      eve_raw.push_back(limited ? r : std::pow(r, expo));
      terms.push_back(limited ? r : bits(r));
    }
    for (Index j = 0; j < qf.n_wiretap_users(); ++j, ++term) {
      const bool limited = qf.variant == CsitMode::limited;
      const double r = detail::checked_ratio(qf.user_leak(s, j), f, term, limited);
      user_raw.push_back(limited ? r : std::pow(r, expo));
      terms.push_back(limited ? r : bits(r));
    }

    std::vector<double> share;
    if (qf.variant == CsitMode::perfect) {
      share = softmax_weights(terms, cfg.alpha);
    } else {
      double total = 1.0;
      for (double r : terms) total += r;
      for (double r : terms) share.push_back(r / total);
    }
    const auto split = share.begin() + static_cast<std::ptrdiff_t>(qf.n_eves);
    w.eve_share.emplace_back(share.begin(), split);
    w.user_share.emplace_back(split, share.end());
    w.eve_w.push_back(std::move(eve_raw));
    w.user_w.push_back(std::move(user_raw));
  }
  return w;
}

struct KktOperator {
  BlockDiag a;
  BlockDiag b;
  double lambda = 0.0;  // exp(smoothed objective), diagnostics only
};

namespace detail {

inline void accumulate(BlockDiag& target, const BlockDiag& term, double coeff) {
  if (coeff == 0.0) return;
  for (Index b = 0; b < target.n_blocks(); ++b) target[b] += coeff * term[b];
}

}  // namespace detail

/// Operators with unit scalar prefactors; any positive rescaling of either
/// side leaves the normalized iteration unchanged.
inline KktOperator assemble_kkt(const QuadFormSet& qf, const CVec& f, const SystemConfig& cfg) {
  const WeightSet w = compute_weights(qf, f, cfg);
  const Index n = qf.layout.n_antennas;
  const CMat zero = CMat::Zero(n, n);
  KktOperator op{BlockDiag::uniform(qf.layout.n_blocks(), zero), BlockDiag::uniform(qf.layout.n_blocks(), zero), 0.0};

  // Increasing ratio term: +A/(f^H A f) on the numerator side, +B/(f^H B f) on the denominator side.
  auto rate_term = [&](const QuadFormPair& p, double weight) {
    detail::accumulate(op.a, p.num, weight / p.num.form(f));
    detail::accumulate(op.b, p.den, weight / p.den.form(f));
  };

  for (std::size_t k = 0; k < qf.common_pairs.size(); ++k) rate_term(qf.common_pairs[k], w.common_share[k]);
  for (const auto& p : qf.private_pairs) rate_term(p, 1.0);

  for (Index s = 0; s < qf.n_secret; ++s) {
    const auto su = static_cast<std::size_t>(s);
    auto leak_term = [&](const QuadFormPair& p, double share) {
      // Decreasing ratio term: roles of numerator and denominator swap.
      const double den_form = p.den.form(f);
      detail::accumulate(op.a, p.den, share / den_form);
      if (qf.variant == CsitMode::perfect) {
        detail::accumulate(op.b, p.num, share / p.num.form(f));
      } else {
        // share / (f^H N f) = 1 / ((f^H D f) (1 + sum ratios)); well-defined when f_s = 0.
        const double total = 1.0 + std::accumulate(w.eve_w[su].begin(), w.eve_w[su].end(), 0.0) +
                             std::accumulate(w.user_w[su].begin(), w.user_w[su].end(), 0.0);
        detail::accumulate(op.b, p.num, 1.0 / (den_form * total));
      }
    };
    for (Index e = 0; e < qf.n_eves; ++e) leak_term(qf.eve_leak(s, e), w.eve_share[su][static_cast<std::size_t>(e)]);
    for (Index j = 0; j < qf.n_wiretap_users(); ++j)
      leak_term(qf.user_leak(s, j), w.user_share[su][static_cast<std::size_t>(j)]);
  }

  for (Index b = 0; b < qf.layout.n_blocks(); ++b) {
    op.a[b] = hermitian_part(op.a[b]);
    op.b[b] = hermitian_part(op.b[b]);
  }
  op.lambda = std::exp(smoothed_objective(qf, f, cfg));
  return op;
}

/// B^{-1} rhs for block-diagonal Hermitian positive definite B, one N x N
/// Cholesky per block with a full-pivot LU fallback.
inline CVec block_solve(const BlockDiag& b, const CVec& rhs) {
  const Index n = b.block_dim();
  if (rhs.size() != n * b.n_blocks()) throw InvalidArgument("block_solve: rhs dimension mismatch");
  CVec out(rhs.size());
  for (Index k = 0; k < b.n_blocks(); ++k) {
    const auto seg = rhs.segment(k * n, n);
    Eigen::LLT<CMat> llt(b[k]);
    if (llt.info() == Eigen::Success) {
      out.segment(k * n, n) = llt.solve(seg);
      continue;
    }
    Eigen::FullPivLU<CMat> lu(b[k]);
    if (!lu.isInvertible()) throw NumericFailure("block_solve: singular block", k);
    out.segment(k * n, n) = lu.solve(seg);
  }
  if (!out.allFinite()) throw NumericFailure("block_solve: non-finite solution");
  return out;
}

/// Multiply g by the unit scalar that makes ref^H g real and nonnegative.
inline void align_phase(CVec& g, const CVec& ref) {
  const cdouble c = ref.dot(g);
  const double mag = std::abs(c);
  if (mag > 0.0) g *= std::conj(c) / mag;
}

/// One power-iteration step: normalize(B^{-1} A f), phase-aligned to f.
inline CVec gpi_step(const KktOperator& op, const CVec& f) {
  CVec g = block_solve(op.b, op.a.apply(f));
  const double nrm = g.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericFailure("gpi_step: projection vanished");
  g /= nrm;
  align_phase(g, f);
  return g;
}

/// ||normalize(B^{-1} A f) - e^{j phi*} f|| for a given operator.
inline double nepv_residual(const KktOperator& op, const CVec& f) {
  const CVec unit = f / f.norm();
  return (gpi_step(op, unit) - unit).norm();
}

inline double kkt_residual(const QuadFormSet& qf, const CVec& f, const SystemConfig& cfg) {
  return nepv_residual(assemble_kkt(qf, f, cfg), f);
}

struct IterateRecord {
  int iteration = 0;
  double step_norm = std::numeric_limits<double>::quiet_NaN();  // NaN at iteration 0
  double objective = 0.0;
  double lambda = 0.0;
};

struct SolveTrace {
  std::vector<IterateRecord> iterates;  // iterates[0] is the initializer
  std::vector<CVec> precoders;          // filled only when requested
  bool converged = false;
  int iterations_used = 0;
};

struct GpiOptions {
  bool keep_precoders = false;
};

template <bool C>
struct GpiResult {
  BasicPrecoderStack<C> precoder;
  SolveTrace trace;
};

/// Iterate f <- normalize(B(f)^{-1} A(f) f) until the phase-aligned step
/// ||f_{t+1} - f_t|| <= epsilon or t_max projections. On exhaustion the
/// best-objective iterate is returned with converged = false.
template <bool C>
GpiResult<C> gpi_solve(const QuadFormSet& qf, const BasicPrecoderStack<C>& f0, const SystemConfig& cfg,
                       const GpiOptions& opts = {}) {
  if (qf.layout.has_common != C || !(qf.layout == f0.layout()))
    throw InvalidArgument("gpi_solve: initializer layout does not match the quadratic forms");
  if (std::abs(f0.norm() - 1.0) > 1e-9) throw InvalidArgument("gpi_solve: initializer must have unit norm");

  GpiResult<C> out{f0, {}};
  CVec f = f0.entries();
  double obj = smoothed_objective(qf, f, cfg);
  out.trace.iterates.push_back({0, std::numeric_limits<double>::quiet_NaN(), obj, std::exp(obj)});
  if (opts.keep_precoders) out.trace.precoders.push_back(f);

  CVec best = f;
  double best_obj = obj;
  for (int t = 1; t <= cfg.t_max; ++t) {
    const KktOperator op = assemble_kkt(qf, f, cfg);
    CVec next = gpi_step(op, f);
    const double step = (next - f).norm();
    f = std::move(next);
    obj = smoothed_objective(qf, f, cfg);
    out.trace.iterates.push_back({t, step, obj, std::exp(obj)});
    if (opts.keep_precoders) out.trace.precoders.push_back(f);
    out.trace.iterations_used = t;
    if (obj > best_obj) {
      best_obj = obj;
      best = f;
    }
    if (step <= cfg.epsilon) {
      out.trace.converged = true;
      break;
    }
  }
  out.precoder.entries() = out.trace.converged ? f : best;
  return out;
}

}  // namespace ssrs
