#pragma once
#include <cmath>
#include <stdexcept>

namespace levybsde {

inline double normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Inverse standard normal CDF: Wichura's PPND16 rational approximation,
// polished with one Halley step against erfc for full double accuracy.
double normal_ppf(double p);

// Regularized incomplete gamma functions P(a,x) (lower) and Q(a,x) (upper).
double igam(double a, double x);
double igamc(double a, double x);

// Unregularized upper incomplete gamma Γ(a,x).
inline double upper_incomplete_gamma(double a, double x) {
  return igamc(a, x) * std::tgamma(a);
}

// Survival function of the chi-square distribution with k degrees of freedom.
inline double chi2_sf(double x, double k) {
  if (x <= 0) return 1.0;
  return igamc(0.5 * k, 0.5 * x);
}

// Mean of a standard normal conditioned on the interval (a, b), times the
// interval probability: ∫_a^b x φ(x) dx = φ(a) − φ(b).
inline double normal_partial_mean(double a, double b) {
  return normal_pdf(a) - normal_pdf(b);
}

// ∫_a^b x² φ(x) dx = Φ(b) − Φ(a) + a·φ(a) − b·φ(b).
inline double normal_partial_m2(double a, double b) {
  return normal_cdf(b) - normal_cdf(a) + a * normal_pdf(a) - b * normal_pdf(b);
}

}  // namespace levybsde
