#include "levybsde/special.hpp"
#include "levybsde/rng.hpp"

#include <cmath>
#include <limits>

namespace levybsde {

namespace {

// Wichura's algorithm AS 241, PPND16 variant.
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0 ? -x : x;
}

}  // namespace

double normal_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_ppf: p must be in (0,1)");
  double x = ppnd16(p);
  // One Halley refinement on f(x) = Φ(x) − p; keeps relative error ~1 ulp.
  const double e = normal_cdf(x) - p;
  const double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double igam(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("igam: need x>=0, a>0");
  if (x == 0) return 0.0;
  if (x > a + 1.0) return 1.0 - igamc(a, x);
  // Series expansion for the lower function.
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double igamc(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("igamc: need x>=0, a>0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - igam(a, x);
  // Modified Lentz continued fraction for the upper function.
  const double fpmin = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double Stream::normal() { return normal_ppf(uniform()); }

long Stream::poisson(double mean) {
  if (mean < 0) throw std::domain_error("poisson: mean must be >= 0");
  if (mean == 0) return 0;
  if (mean < 30.0) {
    // Multiplicative inversion.
    const double L = std::exp(-mean);
    long k = 0;
    double p = uniform();
    while (p > L) { p *= uniform(); ++k; }
    return k;
  }
  // PTRD transformed-rejection sampler (Hoermann).
  const double mu = mean;
  const double smu = std::sqrt(mu);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u, v = uniform();
    if (v <= 0.86 * v_r) {
      u = v / v_r - 0.43;
      return static_cast<long>(std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + mu + 0.445));
    }
    if (v >= v_r) {
      u = uniform() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0 ? -0.5 : 0.5) - u;
      v = uniform() * v_r;
    }
    const double us = 0.5 - std::fabs(u);
    if (us < 0.013 && v > us) continue;
    const double k = std::floor((2.0 * a / us + b) * u + mu + 0.445);
    v = v * inv_alpha / (a / (us * us) + b);
    if (k >= 10.0) {
      if (std::log(v * smu) <= (k + 0.5) * std::log(mu / k) - mu -
                                   std::log(2.5066282746310002) +  // sqrt(2π)
                                   k - (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k) {
        return static_cast<long>(k);
      }
    } else if (k >= 0.0) {
      if (std::log(v) <= k * std::log(mu) - mu - std::lgamma(k + 1.0)) {
        return static_cast<long>(k);
      }
    }
  }
}

}  // namespace levybsde
