#include "levybsde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "levybsde/rng.hpp"
#include "levybsde/special.hpp"

namespace levybsde {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 128) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

MeanSE mean_se(const std::vector<double>& x) {
  MeanSE r;
  r.n = x.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(x) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  std::vector<double> d(r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    const double e = x[i] - r.mean;
    d[i] = e * e;
  }
  const double var = pairwise_sum(d) / static_cast<double>(r.n - 1);
  r.se = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

namespace {

struct WlsFit {
  double slope, intercept;
};

WlsFit wls(const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (det == 0) throw std::domain_error("fit_loglog_slope: degenerate levels");
  return {(sw * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

}  // namespace

SlopeFit fit_loglog_slope(const std::vector<double>& levels,
                          const std::vector<double>& errors,
                          const std::vector<double>& ses,
                          std::uint64_t bootstrap_seed, int bootstrap_reps) {
  const std::size_t n = levels.size();
  if (n < 3) throw std::domain_error("fit_loglog_slope: need at least 3 levels");
  if (errors.size() != n || (!ses.empty() && ses.size() != n))
    throw std::domain_error("fit_loglog_slope: size mismatch");
  const double ln2 = 0.6931471805599453094;
  std::vector<double> x(n), y(n), sig(n, 0.0), w(n, 1.0);
  bool any_se = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(levels[i] > 0) || !(errors[i] > 0))
      throw std::domain_error("fit_loglog_slope: levels and errors must be positive");
    x[i] = std::log2(levels[i]);
    y[i] = std::log2(errors[i]);
    if (!ses.empty() && ses[i] > 0) {
      sig[i] = ses[i] / (errors[i] * ln2);
      any_se = true;
    }
  }
  if (any_se)
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::max(sig[i], 1e-15);
      w[i] = 1.0 / (s * s);
    }
  const WlsFit fit = wls(x, y, w);
  SlopeFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.ci_lo = out.ci_hi = fit.slope;
  if (any_se && bootstrap_reps > 1) {
    // Parametric bootstrap in log space from the per-level SEs (used when no
    // path-level data is available; experiment drivers override with a
    // path-resampled CI).
    Stream rs = Stream::keyed(bootstrap_seed, tag64("slope-bootstrap"), 0);
    std::vector<double> slopes(static_cast<std::size_t>(bootstrap_reps));
    std::vector<double> yb(n);
    for (int b = 0; b < bootstrap_reps; ++b) {
      for (std::size_t i = 0; i < n; ++i) yb[i] = y[i] + sig[i] * rs.normal();
      slopes[static_cast<std::size_t>(b)] = wls(x, yb, w).slope;
    }
    std::sort(slopes.begin(), slopes.end());
    const auto q = [&](double p) {
      const double t = p * (static_cast<double>(slopes.size()) - 1.0);
      const std::size_t i = static_cast<std::size_t>(t);
      const double f = t - static_cast<double>(i);
      return i + 1 < slopes.size() ? (1 - f) * slopes[i] + f * slopes[i + 1]
                              : slopes.back();
    };
    out.ci_lo = q(0.025);
    out.ci_hi = q(0.975);
  }
  return out;
}

namespace {

std::vector<double> ranks_avg_ties(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  const double ma = pairwise_sum(a) / static_cast<double>(n);
  const double mb = pairwise_sum(b) / static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman_rank_corr(const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("spearman_rank_corr: need two equal samples");
  return pearson(ranks_avg_ties(x), ranks_avg_ties(y));
}

IndependenceTest chi2_independence(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  IndependenceTest t;
  t.n = x.size();
  if (x.size() != y.size() || x.size() < 25)
    throw std::domain_error("chi2_independence: need >= 25 paired samples");
  const auto distinct = [](const std::vector<double>& v) {
    std::vector<double> s(v);
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
  };
  if (distinct(x) < 5 || distinct(y) < 5) {
    t.degenerate = true;
    return t;  // a marginal carries (almost) no variation: vacuously independent
  }
  t.rank_corr = spearman_rank_corr(x, y);
  const std::size_t n = t.n;
  const auto cells = [&](const std::vector<double>& v) {
    const std::vector<double> r = ranks_avg_ties(v);
    std::vector<int> c(n);
    for (std::size_t i = 0; i < n; ++i) {
      int k = static_cast<int>(5.0 * (r[i] - 0.5) / static_cast<double>(n));
      c[i] = std::clamp(k, 0, 4);
    }
    return c;
  };
  const std::vector<int> cx = cells(x), cy = cells(y);
  double obs[5][5] = {};
  double rowt[5] = {}, colt[5] = {};
  for (std::size_t i = 0; i < n; ++i) {
    obs[cx[i]][cy[i]] += 1.0;
    rowt[cx[i]] += 1.0;
    colt[cy[i]] += 1.0;
  }
  double chi2 = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const double e = rowt[a] * colt[b] / static_cast<double>(n);
      if (e > 0) {
        const double d = obs[a][b] - e;
        chi2 += d * d / e;
      }
    }
  t.chi2 = chi2;
  t.df = 16;
  t.p_value = chi2_sf(chi2, 16.0);
  return t;
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::domain_error("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max(d, std::max(F - static_cast<double>(i) / n,
                             (static_cast<double>(i) + 1.0) / n - F));
  }
  return d;
}

}  // namespace levybsde
