#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "levybsde/parallel.hpp"
#include "levybsde/rng.hpp"
#include "levybsde/special.hpp"
#include "levybsde/quadrature.hpp"
#include "levybsde/stats.hpp"

using namespace levybsde;

TEST_CASE("stream output is a pure function of key and counter") {
  Stream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Stream c = Stream::keyed(1, tag64("x"), 0);
  Stream d = Stream::keyed(1, tag64("x"), 1);
  Stream e = Stream::keyed(1, tag64("y"), 0);
  CHECK(c.next_u64() != d.next_u64());
  CHECK(Stream::keyed(1, tag64("x"), 0).next_u64() != e.next_u64());
}

TEST_CASE("uniform stays inside the open unit interval and has the right moments") {
  Stream s(7);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.003);
  CHECK(std::fabs(sum2 / n - 1.0 / 3.0) < 0.003);
}

TEST_CASE("normal draws match the first two moments") {
  Stream s(11);
  double sum = 0, sum2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::fabs(sum / n) < 0.015);
  CHECK(std::fabs(sum2 / n - 1.0) < 0.03);
}

TEST_CASE("poisson sampling matches mean and variance in both regimes") {
  for (double mean : {0.3, 3.0, 100.0, 4000.0}) {
    Stream s(static_cast<std::uint64_t>(mean * 1000) + 5);
    const int n = mean > 50 ? 20000 : 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(s.poisson(mean));
      CHECK(k >= 0);
      sum += k;
      sum2 += k * k;
    }
    const double m = sum / n, v = sum2 / n - m * m;
    CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(std::fabs(v - mean) < 0.05 * mean + 5.0 * mean * std::sqrt(2.0 / n));
  }
}

TEST_CASE("sorted uniform times are sorted and inside (0, T]") {
  Stream s(3);
  const auto t = s.sorted_uniform_times(500, 2.5);
  REQUIRE(t.size() == 500);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i] > 0.0);
    CHECK(t[i] <= 2.5);
    if (i) CHECK(t[i - 1] <= t[i]);
  }
}

TEST_CASE("normal ppf inverts the cdf across the support") {
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double p = normal_cdf(x);
    // the inversion cannot beat the resolution of p itself: near p = 1 the
    // cdf rounds to within an ulp of 1 and dx = dp / pdf(x) is irreducible
    const double cond = 2.3e-16 * std::max(p, 1 - p) / normal_pdf(x);
    CHECK(std::fabs(normal_ppf(p) - x) <=
          1e-13 * std::max(1.0, std::fabs(x)) + 2.0 * cond);
  }
  CHECK(normal_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_ppf(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-13));
}

TEST_CASE("normal ppf against high-precision reference points") {
  // values frozen from 40-digit arithmetic at the exact double arguments
  const struct { double p, x; } ref[] = {
      {1e-300, -37.047096299361199}, {1e-16, -8.2220822161304356},
      {1e-10, -6.3613409024040562},  {1e-4, -3.7190164854556806},
      {0.3, -0.52440051270804082},   {0.7, 0.52440051270804066},
      {0.9999, 3.7190164854557084},  {0.999999999, 5.9978070196016374},
  };
  for (const auto& r : ref)
    CHECK(normal_ppf(r.p) ==
          doctest::Approx(r.x).epsilon(2e-14));
}

TEST_CASE("incomplete gamma identities") {
  for (double a : {0.25, 0.5, 1.0, 3.0, 8.0, 25.0}) {
    for (double x : {0.1, 0.7, 1.0, 4.0, 30.0}) {
      CHECK(igam(a, x) + igamc(a, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  for (double x : {0.2, 1.0, 5.0, 20.0})
    CHECK(upper_incomplete_gamma(1.0, x) ==
          doctest::Approx(std::exp(-x)).epsilon(1e-12));
  for (double x : {0.3, 2.0, 9.0})
    CHECK(upper_incomplete_gamma(0.5, x) ==
          doctest::Approx(std::sqrt(M_PI) * std::erfc(std::sqrt(x))).epsilon(1e-11));
  // survival of chi-square(16) at its 0.999 quantile
  CHECK(chi2_sf(39.252354790768476, 16) == doctest::Approx(0.001).epsilon(1e-9));
}

TEST_CASE("normal partial moments cover the whole line") {
  CHECK(normal_partial_mean(-40, 40) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_partial_m2(-40, 40) == doctest::Approx(1.0).epsilon(1e-14));
  // one-sided: E[Z; Z>0] = 1/sqrt(2 pi)
  CHECK(normal_partial_mean(0, 40) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature on smooth integrands") {
  auto sq = [](double x) { return x * x; };
  CHECK(gk_adaptive(sq, 0, 3, 1e-12) == doctest::Approx(9.0).epsilon(1e-13));
  auto sine = [](double x) { return std::sin(x); };
  CHECK(gk_adaptive(sine, 0, M_PI, 1e-13) == doctest::Approx(2.0).epsilon(1e-13));
  auto bump = [](double x) { return std::exp(-50.0 * (x - 0.37) * (x - 0.37)); };
  CHECK(gk_adaptive(bump, -2, 2, 1e-13) ==
        doctest::Approx(std::sqrt(M_PI / 50.0)).epsilon(1e-11));
}

TEST_CASE("log panels handle integrable singularities at zero") {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  const double a = 1e-11, b = 1.0;
  CHECK(integrate_log_panels(f, a, b, 1e-12) ==
        doctest::Approx(2.0 * (std::sqrt(b) - std::sqrt(a))).epsilon(1e-11));
  auto g = [](double x) { return std::pow(x, -1.4) * std::exp(-3.0 * x); };
  // reference value from 30-digit arithmetic: ∫_{0.01}^{10} x^-1.4 e^-3x dx
  CHECK(integrate_log_panels(g, 0.01, 10.0, 1e-12) ==
        doctest::Approx(10.310157578180446).epsilon(1e-10));
}

TEST_CASE("pairwise sum matches exact integer totals") {
  std::vector<double> v;
  for (int i = 1; i <= 100001; ++i) v.push_back(i);
  CHECK(pairwise_sum(v) == 100001.0 * 100002.0 / 2.0);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{3.5}) == 3.5);
}

TEST_CASE("mean and standard error") {
  const auto r = mean_se({1, 2, 3, 4});
  CHECK(r.mean == doctest::Approx(2.5));
  CHECK(r.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
  const auto c = mean_se({7, 7, 7});
  CHECK(c.mean == 7.0);
  CHECK(c.se == 0.0);
}

TEST_CASE("log-log slope fit recovers exact power laws") {
  std::vector<double> levels{2, 4, 8, 16, 32};
  std::vector<double> errors, ses(5, 0.0);
  for (double n : levels) errors.push_back(4.0 * std::pow(n, -0.75));
  const auto fit = fit_loglog_slope(levels, errors, ses);
  CHECK(fit.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> noisy_ses;
  for (double e : errors) noisy_ses.push_back(0.02 * e);
  const auto fit2 = fit_loglog_slope(levels, errors, noisy_ses, 99, 400);
  CHECK(fit2.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(fit2.ci_lo <= -0.75);
  CHECK(fit2.ci_hi >= -0.75);
  CHECK(fit2.ci_hi - fit2.ci_lo < 0.2);

  CHECK_THROWS_AS(fit_loglog_slope({2, 4}, {1, 0.5}, {0, 0}), std::domain_error);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman_rank_corr({1, 2, 3, 4}, {10, 20, 30, 40}) ==
        doctest::Approx(1.0));
  CHECK(spearman_rank_corr({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
  const double r = spearman_rank_corr({1, 1, 2, 2}, {1, 2, 1, 2});
  CHECK(std::fabs(r) < 1e-12);
}

TEST_CASE("independence test separates independent from dependent pairs") {
  Stream s(123);
  std::vector<double> x, y;
  for (int i = 0; i < 5000; ++i) {
    x.push_back(s.uniform());
    y.push_back(s.uniform());
  }
  const auto ind = chi2_independence(x, y);
  CHECK(!ind.degenerate);
  CHECK(ind.df == 16);
  CHECK(ind.p_value > 1e-4);

  const auto dep = chi2_independence(x, x);
  CHECK(dep.p_value < 1e-10);
  CHECK(dep.rank_corr == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> c(5000, 1.0);
  const auto deg = chi2_independence(c, y);
  CHECK(deg.degenerate);
  CHECK(deg.p_value == 1.0);
}

TEST_CASE("kolmogorov-smirnov statistic against a uniform reference") {
  std::vector<double> sample;
  for (int i = 1; i <= 9; ++i) sample.push_back(i / 10.0);
  const double d = ks_statistic(sample, [](double x) { return x; });
  CHECK(d == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("parallel for writes every slot identically at any thread count") {
  const std::size_t n = 10007;
  std::vector<std::uint64_t> one(n, 0), four(n, 0);
  parallel_for(n, [&](std::size_t i) { one[i] = mix64(i); }, 1);
  parallel_for(n, [&](std::size_t i) { four[i] = mix64(i); }, 4);
  CHECK(one == four);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(one[i] == mix64(i));
}

TEST_CASE("thread resolution respects the environment cap") {
  setenv("LEVY_BSDE_THREADS", "2", 1);
  CHECK(resolve_threads(8) == 2);
  unsetenv("LEVY_BSDE_THREADS");
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
