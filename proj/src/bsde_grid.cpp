#include "levybsde/bsde_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "levybsde/errors.hpp"
#include "levybsde/parallel.hpp"
#include "levybsde/path_sim.hpp"

namespace levybsde {

namespace {

// Piecewise-linear evaluation of a table at fractional index `pos`, extended
// beyond [0, J-1] with the boundary slope (first-order for Lipschitz data).
double interp_pos(const std::vector<double>& v, double pos) {
  const std::size_t J = v.size();
  if (pos <= 0.0) return v[0] + (v[1] - v[0]) * pos;
  const double top = static_cast<double>(J - 1);
  if (pos >= top) return v[J - 1] + (v[J - 1] - v[J - 2]) * (pos - top);
  const std::size_t j = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(j);
  return v[j] + (v[j + 1] - v[j]) * f;
}

// out[j] += w * v(index j + sh), where v is extended with boundary slopes.
// Split into the three exact index ranges so the hot loop is branch-free.
void add_shifted(std::vector<double>& out, const std::vector<double>& v,
                 double sh, double w) {
  const std::ptrdiff_t J = static_cast<std::ptrdiff_t>(v.size());
  const double fl = std::floor(sh);
  const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(fl);
  const double f = sh - fl;
  const double dL = v[1] - v[0];
  const double dR = v[J - 1] - v[J - 2];
  const std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(-s, 0, J);
  const std::ptrdiff_t hi = std::clamp<std::ptrdiff_t>(J - 1 - s, 0, J);
  for (std::ptrdiff_t j = 0; j < lo; ++j)
    out[j] += w * (v[0] + dL * (static_cast<double>(j) + sh));
  const double omf = 1.0 - f;
  for (std::ptrdiff_t j = lo; j < hi; ++j)
    out[j] += w * (omf * v[j + s] + f * v[j + s + 1]);
  const double top = static_cast<double>(J - 1);
  for (std::ptrdiff_t j = hi; j < J; ++j)
    out[j] += w * (v[J - 1] + dR * (static_cast<double>(j) + sh - top));
}

// Jump-count probabilities P(N = 0..jmax) with tail below 1e-12, renormalized
// so they sum to one.  Returns (probabilities, truncated tail).
std::pair<std::vector<double>, double> count_probabilities(double mean) {
  std::vector<double> p;
  if (!(mean > 0.0)) {
    p.push_back(1.0);
    return {std::move(p), 0.0};
  }
  const double lm = std::log(mean);
  double cum = 0.0;
  for (int j = 0;; ++j) {
    const double lp =
        -mean + static_cast<double>(j) * lm - std::lgamma(static_cast<double>(j) + 1.0);
    const double pj = std::exp(lp);
    p.push_back(pj);
    cum += pj;
    if (cum >= 1.0 - 1e-12 && static_cast<double>(j) >= mean) break;
    if (j > 4000)
      throw ConfigError(
          "jump intensity per time step too large for count conditioning; "
          "increase time_steps");
  }
  const double tail = std::max(0.0, 1.0 - cum);
  for (double& x : p) x /= cum;
  return {std::move(p), tail};
}

// Largest |X_t| along a piecewise-linear jump path (extremes occur at jump
// epochs and at the horizon).
double running_sup_abs(const JumpPath& p) {
  double sup = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    const double before = s + p.drift * p.t[i];
    s += p.j[i];
    const double after = s + p.drift * p.t[i];
    sup = std::max({sup, std::fabs(before), std::fabs(after)});
  }
  sup = std::max(sup, std::fabs(s + p.drift * p.T));
  return sup;
}

}  // namespace

double GridSolution::value_at(int ti, double x) const {
  if (ti < 0 || ti >= static_cast<int>(u.size()))
    throw std::out_of_range("time index outside the solution grid");
  const double h = xgrid[1] - xgrid[0];
  return interp_pos(u[static_cast<std::size_t>(ti)], (x - xgrid[0]) / h);
}

double GridSolution::jump_increment(int ti, double x, double z) const {
  return value_at(ti, x + z) - value_at(ti, x);
}

GridSolution solve_markovian_grid(const BSDEProblem& pb, const GridSpec& gs) {
  if (!(pb.T > 0.0)) throw ConfigError("horizon T must be positive");
  if (!pb.terminal) throw ConfigError("terminal function is required");
  if (gs.time_steps < 1) throw ConfigError("time_steps must be >= 1");
  if (gs.space_nodes < 3) throw ConfigError("space_nodes must be >= 3");
  if (gs.quad_nodes < 1) throw ConfigError("quad_nodes must be >= 1");

  const double lambda = tail_mass(pb.model, pb.eps);
  const double drift = -compensator_mean(pb.model, pb.eps);

  // Quadrature against the restricted normalized jump law.  Weights are
  // renormalized so the transition operator preserves constants to rounding.
  std::vector<QuadNode> nodes;
  if (lambda > 0.0) {
    nodes = restricted_quad_nodes(pb.model, pb.eps, gs.quad_nodes);
    double wsum = 0.0;
    for (const auto& nd : nodes) wsum += nd.w;
    for (auto& nd : nodes) nd.w /= wsum;
  }

  const GeneratorContext ctx{pb.T, lambda, &nodes};
  const double Lf = generator_lipschitz(pb.generator, ctx);
  const int K = gs.time_steps;
  const double dt = pb.T / K;
  const double contraction = dt * Lf * (1.0 + std::sqrt(lambda));
  if (!(contraction < 0.5))
    throw ConfigError(
        "time step too coarse for the implicit solve to contract: "
        "dt * L_f * (1 + sqrt(lambda)) = " +
        std::to_string(contraction) + " >= 0.5; increase time_steps");

  GridSolution sol;
  sol.lambda = lambda;
  sol.drift = drift;
  sol.nodes = nodes;
  sol.x0 = gs.x0;

  // Grid half-width: calibrate against the running maximum of simulated
  // paths unless the caller pinned it.  The calibration stream is fixed, so
  // the grid never depends on a user seed.
  double q = gs.q;
  if (gs.calibration_paths > 0) {
    double max_sup = 0.0;
    std::size_t over = 0;
    for (std::size_t i = 0; i < gs.calibration_paths; ++i) {
      Stream rng = Stream::keyed(0, tag64("gridq"), i);
      const JumpPath path = simulate_reference(pb.model, pb.eps, pb.T, rng);
      const double s = running_sup_abs(path);
      max_sup = std::max(max_sup, s);
      if (q > 0.0 && s > q) ++over;
    }
    if (q <= 0.0) {
      q = 1.25 * max_sup + 0.5;
    } else if (static_cast<double>(over) >
               1e-4 * static_cast<double>(gs.calibration_paths)) {
      sol.warning =
          "space grid may truncate the state distribution: " +
          std::to_string(over) + " of " + std::to_string(gs.calibration_paths) +
          " calibration paths left half-width " + std::to_string(q);
    }
  } else if (!(q > 0.0)) {
    throw ConfigError("grid half-width q must be positive when calibration is disabled");
  }
  sol.q = q;

  const int J = gs.space_nodes;
  const double h = 2.0 * q / (J - 1);
  const double xmin = gs.x0 - q;
  sol.xgrid.resize(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) sol.xgrid[static_cast<std::size_t>(j)] = xmin + h * j;
  sol.tgrid.resize(static_cast<std::size_t>(K) + 1);
  for (int i = 0; i <= K; ++i)
    sol.tgrid[static_cast<std::size_t>(i)] = pb.T * static_cast<double>(i) / K;

  // Per-node fractional index shifts for the jump operator.
  std::vector<double> sh(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) sh[k] = nodes[k].z / h;
  const double shd = drift * dt / h;

  auto [pcount, tail] = count_probabilities(lambda * dt);
  sol.count_tail = tail;

  sol.u.assign(static_cast<std::size_t>(K) + 1,
               std::vector<double>(static_cast<std::size_t>(J), 0.0));
  for (int j = 0; j < J; ++j)
    sol.u[static_cast<std::size_t>(K)][static_cast<std::size_t>(j)] =
        pb.terminal(sol.xgrid[static_cast<std::size_t>(j)]);

  // One application of the jump-transition operator T v(x) = E[v(x + Z)].
  auto apply_jump = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      add_shifted(out, v, sh[k], nodes[k].w);
    return out;
  };

  const auto kind = pb.generator.kind;
  // Closed-form row solve for the integral driver: with
  // A = lambda * sum w_k delta_k and S(x) = lambda * sum w_k delta_k u(x+z_k),
  // the implicit equation y = acc + dt*(cy*A*y + cz*(S - A*y)) solves to
  // y = (acc + dt*cz*S) / (1 - dt*(cy - cz)*A) for S frozen at the previous
  // sweep.
  double A = 0.0;
  std::vector<double> sdelta(nodes.size(), 0.0);
  if (kind == GeneratorSpec::Kind::INTEGRAL) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double a = std::pow(std::fabs(nodes[k].z), pb.generator.beta_bar);
      const double d = a < 1.0 ? a : 1.0;
      sdelta[k] = lambda * nodes[k].w * d;
      A += sdelta[k];
    }
  }

  const double tol = 1e-10;
  const int max_sweeps = 50;

  for (int i = K - 1; i >= 0; --i) {
    const std::vector<double>& vnext = sol.u[static_cast<std::size_t>(i) + 1];
    const double t = sol.tgrid[static_cast<std::size_t>(i)];

    // Conditional expectation: deterministic drift move, then jump-count
    // conditioning with the truncated, renormalized count distribution.
    std::vector<double> cur(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j)
      cur[static_cast<std::size_t>(j)] =
          interp_pos(vnext, static_cast<double>(j) + shd);
    std::vector<double> acc(static_cast<std::size_t>(J), 0.0);
    for (std::size_t jj = 0; jj < pcount.size(); ++jj) {
      if (jj > 0) cur = apply_jump(cur);
      const double pj = pcount[jj];
      for (int j = 0; j < J; ++j)
        acc[static_cast<std::size_t>(j)] += pj * cur[static_cast<std::size_t>(j)];
    }

    std::vector<double>& y = sol.u[static_cast<std::size_t>(i)];
    switch (kind) {
      case GeneratorSpec::Kind::ZERO:
        y = std::move(acc);
        break;
      case GeneratorSpec::Kind::LINEAR: {
        const double denom = 1.0 - dt * pb.generator.a;
        for (int j = 0; j < J; ++j)
          y[static_cast<std::size_t>(j)] =
              (acc[static_cast<std::size_t>(j)] + dt * pb.generator.b) / denom;
        sol.max_picard = std::max(sol.max_picard, 1);
        break;
      }
      case GeneratorSpec::Kind::INTEGRAL: {
        const double denom =
            1.0 - dt * (pb.generator.phi_cy - pb.generator.phi_cz) * A;
        std::vector<double> yold = acc;
        int sweeps = 0;
        for (;;) {
          ++sweeps;
          std::vector<double> S(static_cast<std::size_t>(J), 0.0);
          for (std::size_t k = 0; k < nodes.size(); ++k)
            add_shifted(S, yold, sh[k], sdelta[k]);
          double delta = 0.0;
          for (int j = 0; j < J; ++j) {
            const double yn = (acc[static_cast<std::size_t>(j)] +
                               dt * pb.generator.phi_cz * S[static_cast<std::size_t>(j)]) /
                              denom;
            delta = std::max(delta, std::fabs(yn - yold[static_cast<std::size_t>(j)]));
            y[static_cast<std::size_t>(j)] = yn;
          }
          if (delta < tol) break;
          if (sweeps >= max_sweeps)
            throw ConfigError(
                "fixed-point sweeps did not converge; the contraction "
                "precondition appears violated");
          yold = y;
        }
        sol.max_picard = std::max(sol.max_picard, sweeps);
        break;
      }
      case GeneratorSpec::Kind::TIME_DISCRETIZED:
      case GeneratorSpec::Kind::CUSTOM: {
        std::vector<double> yold = acc;
        std::vector<double> ynew(static_cast<std::size_t>(J), 0.0);
        int sweeps = 0;
        for (;;) {
          ++sweeps;
          parallel_for(static_cast<std::size_t>(J), [&](std::size_t j) {
            const auto U = [&](double z) {
              return interp_pos(yold, static_cast<double>(j) + z / h) - yold[j];
            };
            ynew[j] = acc[j] + dt * evaluate_generator(pb.generator, ctx, t,
                                                       yold[j], U);
          });
          double delta = 0.0;
          for (int j = 0; j < J; ++j)
            delta = std::max(delta, std::fabs(ynew[static_cast<std::size_t>(j)] -
                                              yold[static_cast<std::size_t>(j)]));
          if (delta < tol) break;
          if (sweeps >= max_sweeps)
            throw ConfigError(
                "fixed-point sweeps did not converge; the declared Lipschitz "
                "constant likely understates the generator");
          std::swap(yold, ynew);
        }
        y = ynew;
        sol.max_picard = std::max(sol.max_picard, sweeps);
        break;
      }
    }
  }
  return sol;
}

MeanSE terminal_expectation(const BSDEProblem& pb, double x,
                            std::size_t samples, Stream& rng) {
  if (!pb.terminal) throw ConfigError("terminal function is required");
  if (samples == 0) throw std::domain_error("terminal_expectation: samples must be positive");
  const double lambda = tail_mass(pb.model, pb.eps);
  const double drift = -compensator_mean(pb.model, pb.eps);
  std::shared_ptr<const RestrictedLaw> law;
  if (lambda > 0.0) law = restricted_law(pb.model, pb.eps);
  std::vector<double> vals;
  vals.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    double xt = x + drift * pb.T;
    if (law) {
      const long n = rng.poisson(lambda * pb.T);
      for (long i = 0; i < n; ++i) xt += law->sample(rng);
    }
    vals.push_back(pb.terminal(xt));
  }
  return mean_se(vals);
}

}  // namespace levybsde
