#include "ssrs/objective.hpp"
#include "ssrs/rate_metrics.hpp"

#include "generators.hpp"

#include <catch_amalgamated.hpp>

using namespace ssrs;
using Catch::Matchers::WithinAbs;

namespace {

// Relaxed non-smooth objective: true min / max, no clamp.
double exact_perfect(const ChannelSet& ch, const PrecoderStack& f, const SystemConfig& cfg) {
  const RateReport rep = sum_secrecy_se(ch, f, cfg);
  double v = rep.common_min;
  for (Index s = 0; s < cfg.n_secret; ++s) v += rep.private_rates[static_cast<std::size_t>(s)] - leakage_se(ch, f, cfg, s).max;
  for (Index m = cfg.n_secret; m < cfg.n_users(); ++m) v += rep.private_rates[static_cast<std::size_t>(m)];
  return v;
}

bool hpd(const CMat& m) {
  if ((m - m.adjoint()).norm() > 1e-12 * std::max(1.0, m.norm())) return false;
  return Eigen::SelfAdjointEigenSolver<CMat>(m).eigenvalues().minCoeff() > 0.0;
}

}  // namespace

TEST_CASE("quadratic-form rates equal the direct formulas") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    const SystemConfig cfg = gen::any_system(rng);
    const ChannelRealization real = gen::scenario(cfg, rng);
    const PrecoderStack f = gen::stack(cfg, rng);
    const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
    REQUIRE(qf.common_pairs.size() == static_cast<std::size_t>(cfg.n_users()));
    REQUIRE(qf.eve_leak_pairs.size() == static_cast<std::size_t>(cfg.n_secret * cfg.n_eves));
    REQUIRE(qf.user_leak_pairs.size() == static_cast<std::size_t>(cfg.n_secret * (cfg.n_users() - 1)));

    const CommonRates c = common_se(real.truth(), f, cfg);
    const auto p = private_se(real.truth(), f, cfg);
    for (Index k = 0; k < cfg.n_users(); ++k) {
      const auto ku = static_cast<std::size_t>(k);
      CHECK_THAT(qf.common_pairs[ku].ratio(f.entries()), WithinAbs(std::exp2(c.per_user[ku]), 1e-10));
      CHECK_THAT(bits(qf.private_pairs[ku].ratio(f.entries())), WithinAbs(p[ku], 1e-10));
    }
    for (Index s = 0; s < cfg.n_secret; ++s) {
      const LeakageRates l = leakage_se(real.truth(), f, cfg, s);
      for (Index e = 0; e < cfg.n_eves; ++e)
        CHECK_THAT(qf.eve_leak(s, e).ratio(f.entries()), WithinAbs(std::exp2(l.eves[static_cast<std::size_t>(e)]), 1e-10));
      for (Index j = 0; j < qf.n_wiretap_users(); ++j)
        CHECK_THAT(bits(qf.user_leak(s, j).ratio(f.entries())), WithinAbs(l.users[static_cast<std::size_t>(j)], 1e-10));
    }
  }
}

TEST_CASE("rate pairs have HPD denominators and numerators dominating them") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 40; ++t) {
    const SystemConfig cfg = gen::any_system(rng);
    const ChannelRealization real = gen::scenario(cfg, rng);
    for (const QuadFormSet& qf : {build_quadforms_perfect(real.truth(), cfg), build_quadforms_limited(real.knowledge(), cfg)}) {
      const CVec f = gen::unit(qf.layout.dim(), rng);
      for (const auto* pairs : {&qf.common_pairs, &qf.private_pairs}) {
        for (const auto& p : *pairs) {
          for (const auto& b : p.den.blocks) CHECK(hpd(b));
          CHECK(p.num.form(f) >= p.den.form(f) - 1e-14);
        }
      }
      for (const auto& p : qf.eve_leak_pairs)
        for (const auto& b : p.den.blocks) CHECK(hpd(b));
      for (const auto& p : qf.user_leak_pairs)
        for (const auto& b : p.den.blocks) CHECK(hpd(b));
    }
  }
}

TEST_CASE("a silent user channel gives a unit ratio") {
  const SystemConfig cfg = gen::system(3, 0, 2, 0);
  std::mt19937_64 rng(1);
  const ChannelSet ch{{CVec::Zero(3), gen::unit(3, rng)}, {}};
  const QuadFormSet qf = build_quadforms_perfect(ch, cfg);
  const CMat ridge = cfg.user_ridge() * CMat::Identity(3, 3);
  for (Index b = 0; b < qf.layout.n_blocks(); ++b) {
    CHECK((qf.common_pairs[0].num[b] - ridge).norm() == 0.0);
    CHECK((qf.common_pairs[0].den[b] - ridge).norm() == 0.0);
  }
  CHECK(qf.common_pairs[0].ratio(gen::unit(qf.layout.dim(), rng)) == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exact estimates collapse the lower-bound pairs onto the perfect ones") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    const SystemConfig cfg = gen::any_system(rng);
    const ChannelRealization real = gen::scenario(cfg, rng, 0.0);
    const CsitKnowledge kn = real.knowledge();
    for (const auto& phi : kn.error_covs) CHECK(phi.norm() == 0.0);
    const QuadFormSet lim = build_quadforms_limited(kn, cfg), per = build_quadforms_perfect(real.truth(), cfg);
    const CVec f = gen::unit(per.layout.dim(), rng);
    for (std::size_t k = 0; k < per.common_pairs.size(); ++k) {
      CHECK_THAT(bits(lim.common_pairs[k].ratio(f)), WithinAbs(bits(per.common_pairs[k].ratio(f)), 1e-10));
      CHECK_THAT(bits(lim.private_pairs[k].ratio(f)), WithinAbs(bits(per.private_pairs[k].ratio(f)), 1e-10));
    }
  }
}

TEST_CASE("collusion-bound numerators read off the secret stream only") {
  std::mt19937_64 rng(24);
  const SystemConfig cfg = gen::system(4, 2, 2, 2);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const CsitKnowledge kn = real.knowledge();
  const QuadFormSet qf = build_quadforms_limited(kn, cfg);
  for (int t = 0; t < 20; ++t) {
    const PrecoderStack f = gen::stack(cfg, rng);
    for (Index s = 0; s < cfg.n_secret; ++s) {
      for (Index e = 0; e < cfg.n_eves; ++e) {
        const double direct = f.stream(s).dot(kn.eve_covs[static_cast<std::size_t>(e)] * f.stream(s)).real();
        CHECK_THAT(qf.eve_leak(s, e).num.form(f.entries()), WithinAbs(direct, 1e-12));
      }
      for (Index j = 0; j < qf.n_wiretap_users(); ++j) {
        const CMat& ru = kn.user_covs[static_cast<std::size_t>(QuadFormSet::wiretapper_user(s, j))];
        CHECK_THAT(qf.user_leak(s, j).num.form(f.entries()), WithinAbs(f.stream(s).dot(ru * f.stream(s)).real(), 1e-12));
      }
    }
  }
}

TEST_CASE("no secret users means no leakage pairs") {
  std::mt19937_64 rng(25);
  const SystemConfig cfg = gen::system(4, 0, 3, 2);
  const ChannelRealization real = gen::scenario(cfg, rng);
  CHECK(build_quadforms_perfect(real.truth(), cfg).eve_leak_pairs.empty());
  const QuadFormSet lim = build_quadforms_limited(real.knowledge(), cfg);
  CHECK(lim.eve_leak_pairs.empty());
  CHECK(lim.user_leak_pairs.empty());

  // Objective = lse_min(common) + sum of private rates.
  const CVec f = gen::unit(lim.layout.dim(), rng);
  const QuadFormRates r = quadform_rates(lim, f);
  double expect = lse_min(r.common, cfg.alpha);
  for (double p : r.privates) expect += p;
  CHECK_THAT(smoothed_objective(lim, f, cfg), WithinAbs(expect, 1e-12));
}

TEST_CASE("builders reject inconsistent inputs") {
  std::mt19937_64 rng(26);
  const SystemConfig cfg = gen::system(4, 2, 1, 1);
  const ChannelRealization real = gen::scenario(cfg, rng);
  ChannelSet ch = real.truth();
  ch.eves.clear();
  CHECK_THROWS_AS(build_quadforms_perfect(ch, cfg), InvalidArgument);
  CsitKnowledge kn = real.knowledge();
  kn.eve_covs.clear();
  CHECK_THROWS_AS(build_quadforms_limited(kn, cfg), InvalidArgument);
  kn = real.knowledge();
  kn.error_covs.pop_back();
  CHECK_THROWS_AS(build_quadforms_limited(kn, cfg), InvalidArgument);
}

TEST_CASE("lse of equal values and of well separated values") {
  for (double a : {1.0, 0.3, 0.01}) {
    for (int n : {1, 2, 5}) {
      const std::vector<double> x(static_cast<std::size_t>(n), 3.25);
      CHECK(lse_min(x, a) == 3.25 - a * std::log(static_cast<double>(n)));
      CHECK(lse_max(x, a) == 3.25 + a * std::log(static_cast<double>(n)));
    }
  }
  const std::vector<double> x{1.0, 2.0};
  const double m = lse_min(x, 0.01);
  CHECK(m <= 1.0);
  CHECK(m >= 1.0 - 0.01 * std::log(2.0));
  CHECK_THAT(m, WithinAbs(1.0, 1e-4));
  CHECK_THROWS_AS(lse_min(std::vector<double>{}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(lse_max(std::vector<double>{}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(lse_max(x, 0.0), InvalidArgument);
  // Shift stabilization: no overflow far from zero.
  CHECK(std::isfinite(lse_max(std::vector<double>{1e4, 1e4 + 1}, 0.01)));
}

TEST_CASE("softmax and softmin weights are normalized gradients") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> v(0, 10);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(5);
    for (double& xi : x) xi = v(rng);
    const double a = 0.5;
    const auto wmax = softmax_weights(x, a), wmin = softmin_weights(x, a);
    CHECK_THAT(std::accumulate(wmax.begin(), wmax.end(), 0.0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(std::accumulate(wmin.begin(), wmin.end(), 0.0), WithinAbs(1.0, 1e-12));
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto p = x, m = x;
      p[i] += h;
      m[i] -= h;
      CHECK_THAT((lse_max(p, a) - lse_max(m, a)) / (2 * h), WithinAbs(wmax[i], 1e-7));
      CHECK_THAT((lse_min(p, a) - lse_min(m, a)) / (2 * h), WithinAbs(wmin[i], 1e-7));
    }
  }
}

TEST_CASE("smoothed objective approaches the relaxed objective as alpha shrinks") {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 50; ++t) {
    SystemConfig cfg = gen::system(4, 2, 2, 2, 10.0);
    const ChannelRealization real = gen::scenario(cfg, rng);
    const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
    const PrecoderStack f = gen::stack(cfg, rng);
    const double exact = exact_perfect(real.truth(), f, cfg);

    cfg.alpha = 0.001;
    const double bound = cfg.alpha * std::log(4.0) + cfg.n_secret * cfg.alpha * std::log(static_cast<double>(cfg.n_eves + 3));
    CHECK(std::abs(smoothed_objective(qf, f, cfg) - exact) <= bound);

    double prev = std::numeric_limits<double>::infinity();
    for (double a : {1.0, 0.1, 0.01}) {
      cfg.alpha = a;
      const double gap = std::abs(smoothed_objective(qf, f, cfg) - exact);
      CHECK(gap <= prev + 1e-12);
      prev = gap;
    }
  }
}

TEST_CASE("limited objective is lse_min of lb common rates minus log2 of the collusion sum") {
  std::mt19937_64 rng(29);
  const SystemConfig cfg = gen::system(4, 2, 2, 2);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const QuadFormSet qf = build_quadforms_limited(real.knowledge(), cfg);
  const CVec f = gen::unit(qf.layout.dim(), rng);
  double expect = 0.0;
  std::vector<double> common;
  for (const auto& p : qf.common_pairs) common.push_back(std::log2(p.ratio(f)));
  expect += lse_min(common, cfg.alpha);
  for (const auto& p : qf.private_pairs) expect += std::log2(p.ratio(f));
  for (Index s = 0; s < cfg.n_secret; ++s) {
    double sum = 1.0;
    for (Index e = 0; e < cfg.n_eves; ++e) sum += qf.eve_leak(s, e).ratio(f);
    for (Index j = 0; j < qf.n_wiretap_users(); ++j) sum += qf.user_leak(s, j).ratio(f);
    expect -= std::log2(sum);
  }
  CHECK_THAT(smoothed_objective(qf, f, cfg), WithinAbs(expect, 1e-12));
  CHECK_THROWS_AS(smoothed_objective(qf, f, cfg, CsitMode::perfect), InvalidArgument);
  CHECK_NOTHROW(smoothed_objective(qf, f, cfg, CsitMode::limited));
}

TEST_CASE("objective is invariant to a global phase") {
  std::mt19937_64 rng(30);
  for (int t = 0; t < 50; ++t) {
    const SystemConfig cfg = gen::any_system(rng);
    const ChannelRealization real = gen::scenario(cfg, rng);
    for (const QuadFormSet& qf : {build_quadforms_perfect(real.truth(), cfg), build_quadforms_limited(real.knowledge(), cfg)}) {
      const CVec f = gen::unit(qf.layout.dim(), rng);
      const CVec g = f * std::polar(1.0, 1.234 * t);
      CHECK_THAT(smoothed_objective(qf, f, cfg), WithinAbs(smoothed_objective(qf, g, cfg), 1e-12));
    }
  }
}

TEST_CASE("block operators agree with their dense expansion") {
  std::mt19937_64 rng(31);
  const SystemConfig cfg = gen::system(3, 1, 2, 1);
  const ChannelRealization real = gen::scenario(cfg, rng);
  const QuadFormSet qf = build_quadforms_perfect(real.truth(), cfg);
  const CVec f = gen::unit(qf.layout.dim(), rng);
  const BlockDiag& a = qf.private_pairs[1].num;
  CHECK((a.apply(f) - a.dense() * f).norm() <= 1e-13);
  CHECK_THAT(a.form(f), WithinAbs(f.dot(a.dense() * f).real(), 1e-13));
  CHECK_THROWS_AS(quadform_rates(qf, CVec::Zero(2)), InvalidArgument);
}
