#include "ssrs/baselines.hpp"

#include "generators.hpp"

#include <catch_amalgamated.hpp>

#include <chrono>

using namespace ssrs;
using Catch::Matchers::WithinAbs;

namespace {

QuadFormSet forms(const ChannelRealization& real, const SystemConfig& cfg, CsitMode mode) {
  return mode == CsitMode::perfect ? build_quadforms_perfect(real.truth(), cfg)
                                   : build_quadforms_limited(real.knowledge(), cfg);
}

double herm_defect(const BlockDiag& m) {
  double d = 0, n = 0;
  for (const auto& b : m.blocks) {
    d += (b - b.adjoint()).squaredNorm();
    n += b.squaredNorm();
  }
  return std::sqrt(d) / std::sqrt(n);
}

BlockDiag random_hpd(Index n, Index blocks, std::mt19937_64& rng) {
  BlockDiag b;
  for (Index k = 0; k < blocks; ++k) {
    CMat m(n, n);
    for (Index j = 0; j < n; ++j) m.col(j) = complex_normal_vector(n, rng);
    b.blocks.push_back(hermitian_part(m * m.adjoint() + 0.1 * CMat::Identity(n, n)));
  }
  return b;
}

}  // namespace

TEST_CASE("identical users get identical common weights") {
  std::mt19937_64 rng(41);
  const SystemConfig cfg = gen::system(4, 0, 3, 0);
  const CVec h = gen::unit(4, rng);
  const QuadFormSet qf = build_quadforms_perfect({{h, h, h}, {}}, cfg);
  const WeightSet w = compute_weights(qf, gen::unit(qf.layout.dim(), rng), cfg);
  for (double s : w.common_share) CHECK_THAT(s, WithinAbs(1.0 / 3.0, 1e-12));
  CHECK_THAT(w.common_w[0], WithinAbs(w.common_w[2], 1e-14));
}

TEST_CASE("weights follow their closed forms") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 30; ++t) {
    SystemConfig cfg = gen::system(4, 2, 2, 2, 15.0);
    cfg.alpha = 0.7;
    const ChannelRealization real = gen::scenario(cfg, rng);
    const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
    const CVec f = gen::unit(qf.layout.dim(), rng);
    const WeightSet w = compute_weights(qf, f, cfg);
    const QuadFormRates r = quadform_rates(qf, f);
    for (std::size_t k = 0; k < r.common.size(); ++k) {
      CHECK_THAT(w.common_w[k], WithinAbs(std::exp(-r.common[k] / cfg.alpha), 1e-10));
      CHECK(w.common_w[k] > 0.0);
    }
    for (Index s = 0; s < cfg.n_secret; ++s)
      for (Index e = 0; e < cfg.n_eves; ++e)
        CHECK_THAT(w.eve_w[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)],
                   WithinAbs(std::exp(r.leakage[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] / cfg.alpha), 1e-10));

    cfg.alpha = 1e4;  // weights are exp(R / alpha) with R up to a few bits here
    const WeightSet flat = compute_weights(qf, f, cfg);
    for (double x : flat.common_w) CHECK_THAT(x, WithinAbs(1.0, 1e-3));
    for (const auto& row : flat.eve_w)
      for (double x : row) CHECK_THAT(x, WithinAbs(1.0, 1e-3));
    for (const auto& row : flat.user_w)
      for (double x : row) CHECK_THAT(x, WithinAbs(1.0, 1e-3));
  }
}

TEST_CASE("limited leakage weights are the raw bound ratios") {
  std::mt19937_64 rng(43);
  const SystemConfig cfg = gen::system(4, 2, 2, 2);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const QuadFormSet qf = build_quadforms_limited(real.knowledge(), cfg);
  const CVec f = gen::unit(qf.layout.dim(), rng);
  const WeightSet w = compute_weights(qf, f, cfg);
  for (Index s = 0; s < cfg.n_secret; ++s) {
    double total = 1.0;
    for (Index e = 0; e < cfg.n_eves; ++e) {
      CHECK_THAT(w.eve_w[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)], WithinAbs(qf.eve_leak(s, e).ratio(f), 1e-14));
      total += qf.eve_leak(s, e).ratio(f);
    }
    for (Index j = 0; j < qf.n_wiretap_users(); ++j) total += qf.user_leak(s, j).ratio(f);
    CHECK_THAT(w.eve_share[static_cast<std::size_t>(s)][0], WithinAbs(qf.eve_leak(s, 0).ratio(f) / total, 1e-14));
  }
}

TEST_CASE("non-finite ratios raise a numeric failure naming the term") {
  std::mt19937_64 rng(44);
  const SystemConfig cfg = gen::system(4, 1, 1, 1);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
  CVec f = gen::unit(qf.layout.dim(), rng);
  f(0) = cdouble(std::numeric_limits<double>::quiet_NaN(), 0.0);
  try {
    compute_weights(qf, f, cfg);
    FAIL("expected a numeric failure");
  } catch (const NumericFailure& e) {
    CHECK(e.index() == 0);
  }
}

TEST_CASE("assembled operators are Hermitian and match the gradient") {
  std::mt19937_64 rng(45);
  for (CsitMode mode : {CsitMode::perfect, CsitMode::limited}) {
    for (int t = 0; t < 50; ++t) {
      SystemConfig cfg = gen::any_system(rng);
      cfg.alpha = 0.3 + t % 3;
      const ChannelRealization real = gen::scenario(cfg, rng);
      const QuadFormSet qf = forms(real, cfg, mode);
      const CVec f = gen::unit(qf.layout.dim(), rng);
      const KktOperator op = assemble_kkt(qf, f, cfg);
      CHECK(herm_defect(op.a) <= 1e-10);
      CHECK(herm_defect(op.b) <= 1e-10);
      // f^H A f = f^H B f: the sum of per-term identities with unit prefactors.
      CHECK_THAT(op.a.form(f), WithinAbs(op.b.form(f), 1e-9 * op.a.form(f)));
      CHECK_THAT(op.lambda, WithinAbs(std::exp(smoothed_objective(qf, f, cfg)), 1e-9 * op.lambda));

      const CVec g = (op.a.apply(f) - op.b.apply(f)) / kLn2;  // dJ / d conj(f)
      const double h = 1e-5;
      CVec fd(f.size());
      for (Index i = 0; i < f.size(); ++i) {
        CVec p = f, m = f;
        p(i) += h;
        m(i) -= h;
        const double dx = (smoothed_objective(qf, p, cfg) - smoothed_objective(qf, m, cfg)) / (2 * h);
        p = f;
        m = f;
        p(i) += cdouble(0, h);
        m(i) -= cdouble(0, h);
        const double dy = (smoothed_objective(qf, p, cfg) - smoothed_objective(qf, m, cfg)) / (2 * h);
        fd(i) = 0.5 * cdouble(dx, dy);
      }
      // One user on one antenna: common plus private rate is constant on the sphere.
      if (fd.norm() < 1e-8) {
        CHECK(g.norm() < 1e-6);
        continue;
      }
      CHECK(g.dot(fd).real() / (g.norm() * fd.norm()) >= 0.999);
      CHECK_THAT((g - fd).norm(), WithinAbs(0.0, 1e-5 * std::max(1.0, fd.norm())));
    }
  }
}

TEST_CASE("without leakage terms the operator is common plus private terms") {
  std::mt19937_64 rng(46);
  const SystemConfig cfg = gen::system(3, 0, 3, 0);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
  const CVec f = gen::unit(qf.layout.dim(), rng);
  const KktOperator op = assemble_kkt(qf, f, cfg);
  const WeightSet w = compute_weights(qf, f, cfg);
  BlockDiag a = BlockDiag::uniform(qf.layout.n_blocks(), CMat::Zero(3, 3));
  for (std::size_t k = 0; k < 3; ++k) {
    for (Index b = 0; b < a.n_blocks(); ++b) {
      a[b] += w.common_share[k] / qf.common_pairs[k].num.form(f) * qf.common_pairs[k].num[b];
      a[b] += 1.0 / qf.private_pairs[k].num.form(f) * qf.private_pairs[k].num[b];
    }
  }
  for (Index b = 0; b < a.n_blocks(); ++b) CHECK((a[b] - op.a[b]).norm() <= 1e-12 * a[b].norm());
}

TEST_CASE("block solve equals a dense solve") {
  std::mt19937_64 rng(47);
  const BlockDiag eye = BlockDiag::uniform(4, CMat::Identity(4, 4));
  const CVec x = complex_normal_vector(16, rng);
  CHECK(block_solve(eye, x) == x);
  for (int t = 0; t < 100; ++t) {
    const BlockDiag b = random_hpd(4, 4, rng);  // N = 4, K = 3
    const CVec rhs = complex_normal_vector(16, rng);
    const CVec dense = b.dense().partialPivLu().solve(rhs);
    CHECK((block_solve(b, rhs) - dense).norm() <= 1e-8 * dense.norm());
  }
  CHECK_THROWS_AS(block_solve(eye, CVec::Zero(3)), InvalidArgument);
  const BlockDiag singular = BlockDiag::uniform(2, CMat::Zero(2, 2));
  CHECK_THROWS_AS(block_solve(singular, CVec::Ones(4)), NumericFailure);
}

TEST_CASE("block solve timing against a dense solve", "[benchmark]") {
  // Informational: N = 8 with K = 8 users.
  std::mt19937_64 rng(48);
  std::vector<double> tb, td;
  for (int rep = 0; rep < 100; ++rep) {
    const BlockDiag b = random_hpd(8, 9, rng);
    const CVec rhs = complex_normal_vector(72, rng);
    auto t0 = std::chrono::steady_clock::now();
    const CVec xb = block_solve(b, rhs);
    auto t1 = std::chrono::steady_clock::now();
    const CVec xd = b.dense().llt().solve(rhs);
    auto t2 = std::chrono::steady_clock::now();
    tb.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    td.push_back(std::chrono::duration<double, std::micro>(t2 - t1).count());
    CHECK((xb - xd).norm() <= 1e-8 * xd.norm());
  }
  std::nth_element(tb.begin(), tb.begin() + 50, tb.end());
  std::nth_element(td.begin(), td.begin() + 50, td.end());
  WARN("median block solve " << tb[50] << " us, dense solve " << td[50] << " us");
}

TEST_CASE("positive rescaling of either operator leaves the step unchanged") {
  std::mt19937_64 rng(49);
  for (int t = 0; t < 30; ++t) {
    const SystemConfig cfg = gen::system(4, 2, 2, 2);
    const ChannelRealization real = gen::scenario(cfg, rng);
    const QuadFormSet qf = forms(real, cfg, t % 2 ? CsitMode::limited : CsitMode::perfect);
    const CVec f = gen::unit(qf.layout.dim(), rng);
    const KktOperator op = assemble_kkt(qf, f, cfg);
    KktOperator scaled = op;
    const double ca = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
    const double cb = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
    for (auto& b : scaled.a.blocks) b *= ca;
    for (auto& b : scaled.b.blocks) b *= cb;
    CHECK((gpi_step(op, f) - gpi_step(scaled, f)).norm() <= 1e-12);
  }
}

TEST_CASE("proportional operators have zero residual") {
  std::mt19937_64 rng(50);
  KktOperator op;
  op.b = random_hpd(4, 1, rng);
  op.a = op.b;
  for (auto& b : op.a.blocks) b *= 2.0;
  for (int t = 0; t < 10; ++t) CHECK(nepv_residual(op, gen::unit(4, rng)) <= 1e-12);
}

TEST_CASE("iterates stay unit norm and the trace is consistent") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    const SystemConfig cfg = gen::system(4, 2, 2, 2, 10.0 + t);
    const ChannelRealization real = gen::scenario(cfg, rng);
    const QuadFormSet qf = forms(real, cfg, CsitMode::limited);
    const PrecoderStack f0 = mrt_init(real.user_estimates);
    GpiOptions opts;
    opts.keep_precoders = true;
    const auto out = gpi_solve(qf, f0, cfg, opts);
    const SolveTrace& tr = out.trace;
    REQUIRE(tr.iterates.size() == static_cast<std::size_t>(tr.iterations_used) + 1);
    CHECK(tr.iterations_used <= cfg.t_max);
    CHECK(std::isnan(tr.iterates[0].step_norm));
    CHECK(tr.iterates[0].objective == smoothed_objective(qf, f0, cfg));
    for (const auto& p : tr.precoders) CHECK_THAT(p.norm(), WithinAbs(1.0, 1e-12));
    for (std::size_t i = 1; i < tr.iterates.size(); ++i) {
      CHECK(tr.iterates[i].iteration == static_cast<int>(i));
      CHECK_THAT(tr.iterates[i].step_norm, WithinAbs((tr.precoders[i] - tr.precoders[i - 1]).norm(), 1e-12));
    }
    if (tr.converged) CHECK(tr.iterates.back().step_norm <= cfg.epsilon);
    CHECK_THAT(out.precoder.norm(), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("restarting at a fixed point converges in one iteration") {
  std::mt19937_64 rng(52);
  int checked = 0;
  for (int t = 0; t < 20; ++t) {
    SystemConfig cfg = gen::system(4, 2, 2, 2);
    const ChannelRealization real = gen::scenario(cfg, rng);
    const QuadFormSet qf = forms(real, cfg, CsitMode::perfect);
    SystemConfig tight = cfg;
    tight.epsilon = 1e-9;
    tight.t_max = 2000;
    const auto first = gpi_solve(qf, mrt_init(real.user_channels), tight);
    if (!first.trace.converged) continue;
    ++checked;
    const auto again = gpi_solve(qf, first.precoder, cfg);
    CHECK(again.trace.converged);
    CHECK(again.trace.iterations_used == 1);
  }
  CHECK(checked >= 10);
}

TEST_CASE("the solution improves on the initializer") {
  std::mt19937_64 rng(53);
  int better = 0, residual_drop = 0;
  const int n = 100;
  for (int t = 0; t < n; ++t) {
    SystemConfig cfg = gen::system(4, 2, 2, 2, 5.0 * (t % 7));
    const ChannelRealization real = gen::scenario(cfg, rng);
    const QuadFormSet qf = forms(real, cfg, t % 2 ? CsitMode::limited : CsitMode::perfect);
    const PrecoderStack f0 = mrt_init(t % 2 ? real.user_estimates : real.user_channels);
    const auto out = gpi_solve(qf, f0, cfg);
    if (smoothed_objective(qf, out.precoder, cfg) >= smoothed_objective(qf, f0, cfg)) ++better;
    if (kkt_residual(qf, out.precoder.entries(), cfg) < kkt_residual(qf, f0.entries(), cfg)) ++residual_drop;
  }
  CHECK(better >= 95);
  CHECK(residual_drop >= 95);
}

TEST_CASE("solver input validation") {
  std::mt19937_64 rng(54);
  const SystemConfig cfg = gen::system(4, 1, 1, 1);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
  PrecoderStack f = mrt_init(real.user_channels);
  f.entries() *= 2.0;
  CHECK_THROWS_AS(gpi_solve(qf, f, cfg), InvalidArgument);
  CHECK_THROWS_AS(gpi_solve(qf, mrt_init_sdma(real.user_channels), cfg), InvalidArgument);
}
