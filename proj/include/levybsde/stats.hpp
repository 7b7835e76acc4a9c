#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace levybsde {

// Pairwise (cascade) summation: accuracy of compensated summation with a
// fixed, data-independent evaluation tree, so results are bit-stable.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;      // standard error of the mean
  std::size_t n = 0;
};
MeanSE mean_se(const std::vector<double>& x);

// Fit of log2(error) against log2(level) by weighted least squares.
// Weights are 1/sigma_i^2 with sigma_i = se_i / (err_i * ln 2), the SE
// propagated through the log; if every se is zero, weights are equal.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;   // value of log2(error) at log2(level) = 0
  double ci_lo = 0.0;       // bootstrap CI bounds for the slope
  double ci_hi = 0.0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& levels,
                          const std::vector<double>& errors,
                          const std::vector<double>& ses,
                          std::uint64_t bootstrap_seed = 7,
                          int bootstrap_reps = 200);

// Spearman rank correlation with average ranks on ties.
double spearman_rank_corr(const std::vector<double>& x,
                          const std::vector<double>& y);

// Chi-square independence test on a 5x5 grid of marginal quantile cells.
struct IndependenceTest {
  double chi2 = 0.0;
  int df = 0;
  double p_value = 1.0;
  double rank_corr = 0.0;
  bool degenerate = false;  // a marginal is (near) constant: test vacuous
  std::size_t n = 0;
};
IndependenceTest chi2_independence(const std::vector<double>& x,
                                   const std::vector<double>& y);

// Kolmogorov–Smirnov sup-distance of a sample against a reference CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

}  // namespace levybsde
