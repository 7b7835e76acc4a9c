#include "levybsde/bsde_lsmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "levybsde/errors.hpp"
#include "levybsde/parallel.hpp"
#include "levybsde/path_sim.hpp"

namespace levybsde {

namespace {

// Cholesky factorization of the leading m x m block of `a` (row-major,
// dimension `dim`).  Returns false when a pivot falls below the relative
// threshold, which signals a numerically singular basis.
bool cholesky_leading(std::vector<double>& a, int dim, int m, double maxdiag) {
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c <= r; ++c) {
      double s = a[static_cast<std::size_t>(r) * dim + c];
      for (int k = 0; k < c; ++k)
        s -= a[static_cast<std::size_t>(r) * dim + k] *
             a[static_cast<std::size_t>(c) * dim + k];
      if (r == c) {
        if (!(s > 1e-12 * maxdiag)) return false;
        a[static_cast<std::size_t>(r) * dim + c] = std::sqrt(s);
      } else {
        a[static_cast<std::size_t>(r) * dim + c] =
            s / a[static_cast<std::size_t>(c) * dim + c];
      }
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& l, int dim, int m,
                    std::vector<double>& b) {
  for (int r = 0; r < m; ++r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int k = 0; k < r; ++k)
      s -= l[static_cast<std::size_t>(r) * dim + k] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(r)] = s / l[static_cast<std::size_t>(r) * dim + r];
  }
  for (int r = m - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int k = r + 1; k < m; ++k)
      s -= l[static_cast<std::size_t>(k) * dim + r] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(r)] = s / l[static_cast<std::size_t>(r) * dim + r];
  }
}

struct Regression {
  std::vector<double> coef;  // basis coefficients, size degree+1
  double mu = 0.0, sigma = 1.0;
  int degree = 0;
  bool fell_back = false;

  double predict(double x) const {
    const double z = (x - mu) / sigma;
    double acc = 0.0, p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      acc += coef[static_cast<std::size_t>(k)] * p;
      p *= z;
    }
    return acc;
  }
};

// Least squares of y against standardized monomials of x, degrees 0..degree,
// dropping to a lower degree when the normal equations are singular.  The
// accumulation is single-threaded on purpose: the result must not depend on
// summation order.
template <typename GetX, typename GetY>
Regression fit_monomials(std::size_t n, const GetX& getx, const GetY& gety,
                         int degree) {
  Regression reg;
  double mu = 0.0;
  for (std::size_t p = 0; p < n; ++p) mu += getx(p);
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double d = getx(p) - mu;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double sigma = std::sqrt(var);
  reg.mu = mu;
  reg.sigma = sigma > 0.0 ? sigma : 1.0;
  int d = sigma > 0.0 ? degree : 0;
  if (d < degree) reg.fell_back = true;

  const int dim = d + 1;
  std::vector<double> gram(static_cast<std::size_t>(dim) * dim, 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> pw(static_cast<std::size_t>(dim));
  for (std::size_t p = 0; p < n; ++p) {
    const double z = (getx(p) - reg.mu) / reg.sigma;
    pw[0] = 1.0;
    for (int k = 1; k < dim; ++k)
      pw[static_cast<std::size_t>(k)] = pw[static_cast<std::size_t>(k) - 1] * z;
    const double y = gety(p);
    for (int r = 0; r < dim; ++r) {
      const double br = pw[static_cast<std::size_t>(r)];
      rhs[static_cast<std::size_t>(r)] += br * y;
      for (int c = 0; c <= r; ++c)
        gram[static_cast<std::size_t>(r) * dim + c] +=
            br * pw[static_cast<std::size_t>(c)];
    }
  }
  for (int r = 0; r < dim; ++r)
    for (int c = r + 1; c < dim; ++c)
      gram[static_cast<std::size_t>(r) * dim + c] =
          gram[static_cast<std::size_t>(c) * dim + r];
  double maxdiag = 0.0;
  for (int r = 0; r < dim; ++r)
    maxdiag = std::max(maxdiag, gram[static_cast<std::size_t>(r) * dim + r]);

  // Basis functions are ordered by degree, so the leading block of the Gram
  // matrix is exactly the lower-degree fit.
  for (int m = dim; m >= 1; --m) {
    std::vector<double> l = gram;
    if (!cholesky_leading(l, dim, m, maxdiag)) {
      reg.fell_back = true;
      continue;
    }
    std::vector<double> c(rhs.begin(), rhs.begin() + m);
    cholesky_solve(l, dim, m, c);
    reg.coef = std::move(c);
    reg.degree = m - 1;
    return reg;
  }
  throw std::logic_error("regression basis degenerate even at degree zero");
}

}  // namespace

LsmcSolution solve_lsmc(const BSDEProblem& pb, const LsmcSpec& spec) {
  if (!(pb.T > 0.0)) throw ConfigError("horizon T must be positive");
  if (!pb.terminal) throw ConfigError("terminal function is required");
  if (spec.time_steps < 1) throw ConfigError("time_steps must be >= 1");
  if (spec.paths < 2) throw ConfigError("paths must be >= 2");
  if (spec.degree < 0 || spec.degree > 6)
    throw ConfigError("basis degree must be between 0 and 6");
  if (spec.bootstrap < 0) throw ConfigError("bootstrap must be >= 0");
  if (!generator_y_only(pb.generator))
    throw std::domain_error(
        "regression solver supports y-only drivers; couplings through the "
        "jump increment need the grid solver");

  const GeneratorContext ctx{pb.T, 0.0, nullptr};
  const double Lf = generator_lipschitz(pb.generator, ctx);
  const int K = spec.time_steps;
  const double dt = pb.T / K;
  if (!(dt * Lf < 0.5))
    throw ConfigError(
        "time step too coarse for the implicit solve to contract: "
        "dt * L_f >= 0.5; increase time_steps");

  // Simulated state table X[p*(K+1) + i] = X_{t_i} on path p, filled into
  // indexed slots so the thread count cannot change any value.
  const std::size_t N = spec.paths;
  std::vector<double> X(N * (static_cast<std::size_t>(K) + 1));
  parallel_for(N, [&](std::size_t p) {
    Stream rng = Stream::keyed(spec.seed, tag64("lsmc"), p);
    const JumpPath path = simulate_reference(pb.model, pb.eps, pb.T, rng);
    for (int i = 0; i <= K; ++i) {
      const double t = pb.T * static_cast<double>(i) / K;
      X[p * (static_cast<std::size_t>(K) + 1) + static_cast<std::size_t>(i)] =
          evaluate(path, t);
    }
  });

  const auto never_u = [](double) -> double {
    throw std::logic_error("jump increment queried by a y-only solver");
  };

  int max_iters = 0;
  const auto implicit_solve = [&](double t, double e) {
    if (pb.generator.kind == GeneratorSpec::Kind::ZERO) return e;
    if (pb.generator.kind == GeneratorSpec::Kind::LINEAR)
      return (e + dt * pb.generator.b) / (1.0 - dt * pb.generator.a);
    double y = e;
    for (int it = 1; it <= 200; ++it) {
      const double yn = e + dt * evaluate_generator(pb.generator, ctx, t, y, never_u);
      if (std::fabs(yn - y) < 1e-12) {
        max_iters = std::max(max_iters, it);
        return yn;
      }
      y = yn;
    }
    throw ConfigError(
        "per-path implicit solve did not converge; the declared Lipschitz "
        "constant likely understates the driver");
  };

  int fallbacks = 0;
  // One backward pass over a path multiset given by `index` (identity for the
  // point estimate, a resample for bootstrap replicates).
  const auto run = [&](const std::vector<std::size_t>* index) {
    const std::size_t n = index ? index->size() : N;
    const auto xat = [&](std::size_t p, int i) {
      const std::size_t r = index ? (*index)[p] : p;
      return X[r * (static_cast<std::size_t>(K) + 1) + static_cast<std::size_t>(i)];
    };
    std::vector<double> Y(n);
    for (std::size_t p = 0; p < n; ++p)
      Y[p] = pb.terminal(spec.x0 + xat(p, K));
    for (int i = K - 1; i >= 1; --i) {
      const double t = pb.T * static_cast<double>(i) / K;
      const Regression reg = fit_monomials(
          n, [&](std::size_t p) { return xat(p, i); },
          [&](std::size_t p) { return Y[p]; }, spec.degree);
      if (reg.fell_back && !index) ++fallbacks;
      for (std::size_t p = 0; p < n; ++p)
        Y[p] = implicit_solve(t, reg.predict(xat(p, i)));
    }
    // The state at time zero is deterministic, so the conditional
    // expectation is the plain mean.
    double e = 0.0;
    for (double y : Y) e += y;
    e /= static_cast<double>(n);
    return implicit_solve(0.0, e);
  };

  LsmcSolution out;
  out.y0 = run(nullptr);
  out.degree_fallbacks = fallbacks;

  if (spec.bootstrap > 0) {
    std::vector<double> reps(static_cast<std::size_t>(spec.bootstrap));
    for (int b = 0; b < spec.bootstrap; ++b) {
      Stream rng = Stream::keyed(spec.seed, tag64("lsmc-boot"),
                                 static_cast<std::uint64_t>(b));
      std::vector<std::size_t> idx(N);
      for (auto& v : idx)
        v = static_cast<std::size_t>(rng.uniform() * static_cast<double>(N));
      reps[static_cast<std::size_t>(b)] = run(&idx);
    }
    double m = 0.0;
    for (double r : reps) m += r;
    m /= static_cast<double>(reps.size());
    double v = 0.0;
    for (double r : reps) v += (r - m) * (r - m);
    v /= static_cast<double>(reps.size() - 1);
    out.se = std::sqrt(v);
  }
  out.max_point_iters = max_iters;
  return out;
}

}  // namespace levybsde
