#include "levybsde/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "levybsde/errors.hpp"
#include "levybsde/levy_measures.hpp"
#include "levybsde/parallel.hpp"
#include "levybsde/path_sim.hpp"
#include "levybsde/rng.hpp"

namespace levybsde {
namespace {

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

void validate_levels(const std::vector<double>& levels) {
  if (levels.size() < 3)
    throw ConfigError("rate experiment: need at least 3 levels for a slope fit");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 1))
      throw ConfigError("rate experiment: every level must satisfy n > 1");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw ConfigError("rate experiment: levels must be strictly increasing");
  }
}

double resolve_beta(const LevyModel& model, double beta) {
  const double bstar = bg_index(model);
  if (beta <= 0) beta = std::min(bstar + 0.25, 1.9);
  if (!(beta > bstar) || !(beta < 2))
    throw ConfigError("rate experiment: beta must lie in (activity_index, 2); "
                      "the activity index here is " +
                      num(bstar) + " and beta = " + num(beta));
  return beta;
}

// L2 bound on the substitution error of measuring against the eps_ref level
// instead of the full process: the residual is a martingale whose terminal
// variance is T * m2(eps_ref), and its running sup picks up a Doob factor 2.
double reference_bias(const LevyModel& model, double T, double eps_ref) {
  return 2.0 * std::sqrt(T * partial_moment(model, 2, eps_ref).value);
}

// Refuses reference cutoffs whose substitution bias could distort the finest
// level: the bias bound must stay below 5% of the predicted finest error
// sqrt(T * m2(1/n_max)). On failure reports the largest admissible eps_ref.
void preflight_reference(const LevyModel& model, double T, double eps_ref,
                         double n_max) {
  const double m2_fine = partial_moment(model, 2, 1.0 / n_max).value;
  const double predicted = std::sqrt(T * m2_fine);
  if (!(predicted > 0)) return;  // nothing below the finest cutoff to resolve
  const double bias = reference_bias(model, T, eps_ref);
  if (bias <= 0.05 * predicted) return;
  const double target = 6.25e-4 * m2_fine;  // (0.05/2)^2 * m2(1/n_max)
  double lo = 1e-14, hi = 1.0 / n_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (partial_moment(model, 2, mid).value <= target)
      lo = mid;
    else
      hi = mid;
  }
  throw ConfigError("reference cutoff eps_ref = " + num(eps_ref) +
                    " is too coarse: its substitution-bias bound " + num(bias) +
                    " exceeds 5% of the predicted finest-level error " +
                    num(predicted) + "; use eps_ref <= " + num(lo));
}

// Weighted slope fit plus a percentile CI from path-level resamples of the
// per-path squared errors (sq[level][path]).
SlopeFit path_bootstrap_fit(const std::vector<double>& levels,
                            const std::vector<std::vector<double>>& sq,
                            const std::vector<double>& errors,
                            const std::vector<double>& ses, std::uint64_t seed,
                            const char* tag, int reps) {
  SlopeFit fit = fit_loglog_slope(levels, errors, ses, 0, 0);
  if (reps < 2 || sq.empty()) return fit;
  const std::size_t L = levels.size();
  const std::size_t P = sq.front().size();
  std::vector<double> slopes(static_cast<std::size_t>(reps),
                             std::numeric_limits<double>::quiet_NaN());
  const std::uint64_t boot_tag = tag64(tag);
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t b) {
    Stream bs = Stream::keyed(seed, boot_tag, b);
    std::vector<std::size_t> idx(P);
    for (auto& i : idx)
      i = static_cast<std::size_t>(bs.uniform() * static_cast<double>(P));
    std::vector<double> e(L), s(L);
    for (std::size_t l = 0; l < L; ++l) {
      double sum = 0, sum2 = 0;
      for (std::size_t i : idx) {
        const double v = sq[l][i];
        sum += v;
        sum2 += v * v;
      }
      const double mean = sum / static_cast<double>(P);
      const double var =
          std::max(sum2 / static_cast<double>(P) - mean * mean, 0.0);
      const double err = std::sqrt(std::max(mean, 0.0));
      if (!(err > 0)) return;  // degenerate resample: drop this replicate
      e[l] = err;
      s[l] = std::sqrt(var / static_cast<double>(P)) / (2 * err);
    }
    slopes[b] = fit_loglog_slope(levels, e, s, 0, 0).slope;
  });
  std::vector<double> ok;
  ok.reserve(slopes.size());
  for (double v : slopes)
    if (!std::isnan(v)) ok.push_back(v);
  if (ok.size() < 10) return fit;  // CI collapses to the point estimate
  std::sort(ok.begin(), ok.end());
  const auto q = [&](double p) {
    const double t = p * (static_cast<double>(ok.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(t);
    const double f = t - static_cast<double>(i);
    return i + 1 < ok.size() ? (1 - f) * ok[i] + f * ok[i + 1] : ok.back();
  };
  fit.ci_lo = q(0.025);
  fit.ci_hi = q(0.975);
  return fit;
}

RateReport make_report(const std::vector<double>& levels,
                       const std::vector<std::vector<double>>& sq, double beta,
                       double cb, double T, double bias, std::size_t paths,
                       std::uint64_t seed, const char* boot_tag, int reps,
                       const std::vector<double>* gap_terms = nullptr) {
  RateReport rep;
  rep.beta = beta;
  rep.theory_slope = -(1.0 - beta / 2.0);
  rep.reference_bias_bound = bias;
  rep.paths = paths;
  std::vector<double> errors(levels.size()), ses(levels.size());
  std::vector<double> theory(levels.size());
  bool all_positive = true;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const MeanSE m = mean_se(sq[l]);
    errors[l] = std::sqrt(std::max(m.mean, 0.0));
    ses[l] = errors[l] > 0 ? m.se / (2 * errors[l]) : 0.0;
    all_positive = all_positive && errors[l] > 0;
    RateLevel lv;
    lv.n = levels[l];
    lv.error = errors[l];
    lv.se = ses[l];
    lv.bound = cb * std::sqrt(T) * std::pow(levels[l], rep.theory_slope);
    rep.levels.push_back(lv);
    theory[l] = std::pow(levels[l], rep.theory_slope) +
                (gap_terms ? (*gap_terms)[l] : 0.0);
  }
  // Decay of the normalized theory curve itself (a pure power law unless a
  // driver-gap term flattens it); this is what the two-term bound predicts
  // for the fitted slope, independent of Monte-Carlo noise.
  rep.bound_fit = fit_loglog_slope(levels, theory, {}, 0, 0);
  if (all_positive) {
    rep.fit =
        path_bootstrap_fit(levels, sq, errors, ses, seed, boot_tag, reps);
  } else {
    rep.fit = SlopeFit{};
    rep.note = "at least one level has zero error; slope fit skipped";
  }
  return rep;
}

// Values of the thinned path x0 + X^cutoff(t) at the grid times, in one
// ordered sweep over the reference jumps (same keep rule as thin_to_level).
void grid_path_values(const JumpPath& ref, double cutoff, double drift,
                      double x0, const std::vector<double>& tg,
                      std::vector<double>& out) {
  double cur = 0;
  std::size_t jp = 0;
  for (std::size_t i = 0; i < tg.size(); ++i) {
    while (jp < ref.t.size() && ref.t[jp] <= tg[i]) {
      if (std::fabs(ref.j[jp]) >= cutoff) cur += ref.j[jp];
      ++jp;
    }
    out[i] = x0 + cur + drift * tg[i];
  }
}

struct CoupledBsdeErrors {
  std::vector<std::vector<double>> y2;  // [level][path] squared Y sup errors
  std::vector<std::vector<double>> u2;  // [level][path] U-norm quadratures
};

// Per-path coupled errors of the level solves against the reference solve:
// Y part is the sup over the solver time grid of the value-function gap on
// coupled thinned paths; the optional U part integrates the squared
// jump-increment gap against the reference jump measure and time.
CoupledBsdeErrors coupled_bsde_errors(const LevyModel& model, double T,
                                      double x0,
                                      const std::vector<GridSolution>& sols,
                                      const GridSolution& ref, double eref,
                                      const std::vector<double>& levels,
                                      std::size_t paths, std::uint64_t seed,
                                      const char* tag,
                                      const std::vector<QuadNode>* unodes,
                                      double ulam) {
  const std::size_t L = levels.size();
  const std::size_t nt = ref.tgrid.size();
  const int K = static_cast<int>(nt) - 1;
  const double dt = T / K;
  std::vector<double> cutoffs(L), drifts(L);
  for (std::size_t l = 0; l < L; ++l) {
    cutoffs[l] = 1.0 / levels[l];
    drifts[l] = -compensator_mean(model, cutoffs[l]);
  }
  CoupledBsdeErrors out;
  out.y2.assign(L, std::vector<double>(paths));
  if (unodes) out.u2.assign(L, std::vector<double>(paths));
  const std::uint64_t path_tag = tag64(tag);
  parallel_for(paths, [&](std::size_t p) {
    Stream rs = Stream::keyed(seed, path_tag, p);
    const JumpPath path = simulate_reference(model, eref, T, rs);
    std::vector<double> xr(nt), ur(nt), xn(nt);
    grid_path_values(path, eref, path.drift, x0, ref.tgrid, xr);
    for (std::size_t i = 0; i < nt; ++i)
      ur[i] = ref.value_at(static_cast<int>(i), xr[i]);
    std::vector<double> Ur;
    const std::size_t nk = unodes ? unodes->size() : 0;
    if (unodes) {
      Ur.resize(static_cast<std::size_t>(K) * nk);
      for (int i = 0; i < K; ++i)
        for (std::size_t k = 0; k < nk; ++k)
          Ur[static_cast<std::size_t>(i) * nk + k] =
              ref.value_at(i, xr[static_cast<std::size_t>(i)] + (*unodes)[k].z) -
              ur[static_cast<std::size_t>(i)];
    }
    for (std::size_t l = 0; l < L; ++l) {
      grid_path_values(path, cutoffs[l], drifts[l], x0, ref.tgrid, xn);
      double ys = 0;
      for (std::size_t i = 0; i < nt; ++i)
        ys = std::max(
            ys, std::fabs(sols[l].value_at(static_cast<int>(i), xn[i]) - ur[i]));
      out.y2[l][p] = ys * ys;
      if (unodes) {
        double uq = 0;
        for (int i = 0; i < K; ++i) {
          const double x = xn[static_cast<std::size_t>(i)];
          const double base = sols[l].value_at(i, x);
          double cell = 0;
          for (std::size_t k = 0; k < nk; ++k) {
            const double d = sols[l].value_at(i, x + (*unodes)[k].z) - base -
                             Ur[static_cast<std::size_t>(i) * nk + k];
            cell += (*unodes)[k].w * d * d;
          }
          uq += cell;
        }
        out.u2[l][p] = uq * ulam * dt;
      }
    }
  });
  return out;
}

}  // namespace

double resolve_moment_order(const LevyModel& model, double beta) {
  return resolve_beta(model, beta);
}

RateReport run_process_rate(const ProcessRateSpec& spec) {
  validate_levels(spec.levels);
  if (!(spec.T > 0)) throw ConfigError("process rate: T must be positive");
  if (spec.paths < 2) throw ConfigError("process rate: need at least 2 paths");
  const double n_max = spec.levels.back();
  if (!(spec.eps_ref > 0) || spec.eps_ref > 1.0 / n_max)
    throw ConfigError("process rate: eps_ref must lie in (0, 1/n_max]");
  const double beta = resolve_beta(spec.model, spec.beta);
  const double cb = c_beta(spec.model, beta);
  preflight_reference(spec.model, spec.T, spec.eps_ref, n_max);

  const std::size_t L = spec.levels.size();
  std::vector<double> cutoffs(L), drifts(L);
  for (std::size_t l = 0; l < L; ++l) {
    cutoffs[l] = 1.0 / spec.levels[l];
    drifts[l] = -compensator_mean(spec.model, cutoffs[l]);
  }
  std::vector<std::vector<double>> sup2(L, std::vector<double>(spec.paths));
  parallel_for(spec.paths, [&](std::size_t p) {
    Stream rs = Stream::keyed(spec.seed, tag64("rate"), p);
    const JumpPath ref =
        simulate_reference(spec.model, spec.eps_ref, spec.T, rs);
    const std::vector<double> sups = sup_distances_at(ref, cutoffs, drifts);
    for (std::size_t l = 0; l < L; ++l) sup2[l][p] = sups[l] * sups[l];
  });
  RateReport rep = make_report(
      spec.levels, sup2, beta, cb, spec.T,
      reference_bias(spec.model, spec.T, spec.eps_ref), spec.paths, spec.seed,
      "rateboot", spec.bootstrap);
  const std::string pn = "coupled-thinning strong error vs the eps_ref = " +
                         num(spec.eps_ref) + " reference level";
  rep.note = rep.note.empty() ? pn : rep.note + "; " + pn;
  return rep;
}

BsdeRateReport run_bsde_rate(const BsdeRateSpec& spec) {
  validate_levels(spec.levels);
  if (spec.paths < 2) throw ConfigError("bsde rate: need at least 2 paths");
  if (spec.u_quad_nodes < 1)
    throw ConfigError("bsde rate: u_quad_nodes must be >= 1");
  if (!(spec.n_ref >= 2 * spec.levels.back()))
    throw ConfigError(
        "bsde rate: the reference level n_ref must be at least twice the "
        "finest level");
  const LevyModel& model = spec.problem.model;
  const double T = spec.problem.T;
  const double beta = resolve_beta(model, spec.beta);
  const double cb = c_beta(model, beta);
  const double eref = 1.0 / spec.n_ref;

  BSDEProblem pbref = spec.problem;
  pbref.eps = eref;
  GridSpec g = spec.grid;
  const GridSolution ref = solve_markovian_grid(pbref, g);
  if (g.q == 0) g.q = ref.q;  // share the calibrated box across all solves

  GridSpec g2 = g;
  g2.time_steps *= 2;
  const GridSolution ref2 = solve_markovian_grid(pbref, g2);
  double refine = 0;
  for (std::size_t j = 0; j < ref.xgrid.size(); ++j)
    refine = std::max(refine, std::fabs(ref.u[0][j] - ref2.u[0][j]));

  std::vector<GridSolution> sols;
  sols.reserve(spec.levels.size());
  for (double n : spec.levels) {
    BSDEProblem pb = spec.problem;
    pb.eps = 1.0 / n;
    sols.push_back(solve_markovian_grid(pb, g));
  }

  const std::vector<QuadNode> unodes =
      restricted_quad_nodes(model, eref, spec.u_quad_nodes);
  const double ulam = tail_mass(model, eref);
  const CoupledBsdeErrors errs =
      coupled_bsde_errors(model, T, g.x0, sols, ref, eref, spec.levels,
                          spec.paths, spec.seed, "bsderate", &unodes, ulam);

  const double bias = reference_bias(model, T, eref);
  BsdeRateReport rep;
  rep.y = make_report(spec.levels, errs.y2, beta, cb, T, bias, spec.paths,
                      spec.seed, "bsdeboot-y", spec.bootstrap);
  rep.u = make_report(spec.levels, errs.u2, beta, cb, T, bias, spec.paths,
                      spec.seed, "bsdeboot-u", spec.bootstrap);
  rep.refine_delta = refine;
  const std::string yn = "value-function sup gap vs the reference solve at "
                         "n = " + num(spec.n_ref) +
                         "; time-refinement delta (K vs 2K) = " + num(refine);
  const std::string un =
      "jump-increment gap integrated against the reference jump measure and "
      "time on coupled paths";
  rep.y.note = rep.y.note.empty() ? yn : rep.y.note + "; " + yn;
  rep.u.note = rep.u.note.empty() ? un : rep.u.note + "; " + un;
  return rep;
}

RateReport run_generator_gap_rate(const GapRateSpec& spec) {
  validate_levels(spec.levels);
  if (spec.paths < 2) throw ConfigError("gap rate: need at least 2 paths");
  if (!spec.terminal)
    throw ConfigError("gap rate: a terminal function is required");
  if (spec.driver.kind != GeneratorSpec::Kind::INTEGRAL &&
      spec.driver.kind != GeneratorSpec::Kind::TIME_DISCRETIZED)
    throw ConfigError(
        "gap rate: the driver must be an integral driver or a frozen-clock "
        "(time-discretized) driver; other kinds have no approximation gap");
  if (!(spec.n_ref >= 2 * spec.levels.back()))
    throw ConfigError(
        "gap rate: the reference level n_ref must be at least twice the "
        "finest level");
  const double T = spec.T;
  const double beta = resolve_beta(spec.model, spec.beta);
  const double cb = c_beta(spec.model, beta);
  const double eref = 1.0 / spec.n_ref;

  const bool integral = spec.driver.kind == GeneratorSpec::Kind::INTEGRAL;
  const GeneratorSpec base =
      spec.driver.kind == GeneratorSpec::Kind::TIME_DISCRETIZED
          ? *spec.driver.inner
          : spec.driver;

  // Per-level drivers and their gap terms first: cheap, and it surfaces
  // unusable driver kinds before any solve runs.
  std::vector<GeneratorSpec> drivers;
  std::vector<double> gap_terms;
  for (double n : spec.levels) {
    GeneratorSpec dn =
        integral ? base
                 : GeneratorSpec::time_discretized(
                       base, static_cast<int>(std::llround(n)));
    gap_terms.push_back(generator_gap_cn(spec.model, dn, n, T));
    drivers.push_back(std::move(dn));
  }

  BSDEProblem pb;
  pb.model = spec.model;
  pb.T = T;
  pb.terminal = spec.terminal;
  pb.terminal_lipschitz = spec.terminal_lipschitz;

  BSDEProblem pbref = pb;
  pbref.eps = eref;
  pbref.generator = base;  // the reference never freezes the clock
  GridSpec g = spec.grid;
  const GridSolution ref = solve_markovian_grid(pbref, g);
  if (g.q == 0) g.q = ref.q;

  std::vector<GridSolution> sols;
  sols.reserve(spec.levels.size());
  for (std::size_t l = 0; l < spec.levels.size(); ++l) {
    BSDEProblem pl = pb;
    pl.eps = 1.0 / spec.levels[l];
    pl.generator = drivers[l];
    sols.push_back(solve_markovian_grid(pl, g));
  }

  const CoupledBsdeErrors errs =
      coupled_bsde_errors(spec.model, T, g.x0, sols, ref, eref, spec.levels,
                          spec.paths, spec.seed, "gaprate", nullptr, 0.0);
  RateReport rep = make_report(spec.levels, errs.y2, beta, cb, T,
                               reference_bias(spec.model, T, eref), spec.paths,
                               spec.seed, "gapboot", spec.bootstrap,
                               &gap_terms);
  std::size_t gap_dominant = 0;
  for (std::size_t l = 0; l < spec.levels.size(); ++l) {
    RateLevel& lv = rep.levels[l];
    lv.gap_term = gap_terms[l];
    // Dominance compares the normalized terms n^{-(1-beta/2)} vs c_n: the
    // same weighting under which the two-term curve's fitted slope is
    // reported, so "gap"-dominated levels are the ones that flatten it.
    const double proc_norm = std::pow(lv.n, rep.theory_slope);
    lv.bound += gap_terms[l];
    lv.dominant = gap_terms[l] > proc_norm ? "gap" : "process";
    if (gap_terms[l] > proc_norm) ++gap_dominant;
  }
  const std::string dom = "driver-gap term dominates " +
                          std::to_string(gap_dominant) + "/" +
                          std::to_string(spec.levels.size()) + " levels";
  rep.note = rep.note.empty() ? dom : rep.note + "; " + dom;
  return rep;
}

LowerBoundReport wasserstein_bounds(const WassersteinSpec& spec) {
  if (!(spec.T > 0)) throw ConfigError("wasserstein: T must be positive");
  if (!(spec.n > 1)) throw ConfigError("wasserstein: n must exceed 1");
  if (spec.paths < 2) throw ConfigError("wasserstein: need at least 2 paths");
  const LevyModel& m = spec.model;
  LowerBoundReport rep;
  rep.n = spec.n;
  const bool degenerate = std::isinf(spec.n);
  const double half = degenerate ? 0.0 : 1.0 / (2.0 * spec.n);
  rep.m2_half = partial_moment(m, 2, half).value;
  rep.c_T = m.finite_activity()
                ? std::sqrt(-std::expm1(-tail_mass(m, 0.0) * spec.T))
                : 1.0;
  rep.lower = rep.c_T * std::sqrt(rep.m2_half);
  // Coupled empirical upper bound at the level cutoff; for the degenerate
  // all-jumps-kept case the thinned path coincides with the reference.
  const double cutoff = degenerate ? spec.eps_ref : 1.0 / spec.n;
  if (!(spec.eps_ref > 0) || spec.eps_ref > cutoff)
    throw ConfigError("wasserstein: eps_ref must lie in (0, 1/n]");
  if (rep.m2_half > 0)
    preflight_reference(m, spec.T, spec.eps_ref, spec.n);
  const std::vector<double> cuts{cutoff};
  const std::vector<double> drifts{-compensator_mean(m, cutoff)};
  std::vector<double> sup2(spec.paths);
  parallel_for(spec.paths, [&](std::size_t p) {
    Stream rs = Stream::keyed(spec.seed, tag64("wass"), p);
    const JumpPath ref = simulate_reference(m, spec.eps_ref, spec.T, rs);
    const double s = sup_distances_at(ref, cuts, drifts)[0];
    sup2[p] = s * s;
  });
  const MeanSE ms = mean_se(sup2);
  rep.coupled_upper = std::sqrt(std::max(ms.mean, 0.0));
  rep.upper_se =
      rep.coupled_upper > 0 ? ms.se / (2 * rep.coupled_upper) : 0.0;
  rep.ordered = rep.lower <= rep.coupled_upper + 3 * rep.upper_se;
  return rep;
}

DivergenceRecord check_optimality_divergence(const LevyModel& model,
                                             double beta_below,
                                             const std::vector<double>& levels) {
  const double bstar = bg_index(model);
  if (!(beta_below > 0) || !(beta_below < bstar))
    throw ConfigError(
        "divergence check: beta must lie in (0, activity_index); the "
        "activity index here is " +
        num(bstar));
  if (levels.size() < 2)
    throw ConfigError("divergence check: need at least 2 levels");
  DivergenceRecord rec;
  double rm = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double n = levels[i];
    if (!(n > 1) || (i > 0 && !(n > levels[i - 1])))
      throw ConfigError(
          "divergence check: levels must be strictly increasing with n > 1");
    const double v = std::pow(n, 2.0 - beta_below) *
                     partial_moment(model, 2, 1.0 / (2.0 * n)).value;
    rm = std::max(rm, v);
    rec.levels.push_back(n);
    rec.values.push_back(v);
    rec.running_max.push_back(rm);
  }
  const std::size_t mid = (rec.running_max.size() - 1) / 2;
  rec.growth = rec.running_max.back() / rec.running_max.front();
  rec.second_half_growth = rec.running_max.back() / rec.running_max[mid];
  rec.diverging = rec.second_half_growth >= 1.02;
  return rec;
}

namespace {

double atomic_sq_term(AtomicRule rule, std::int64_t i) {
  const double d = static_cast<double>(i);
  return rule == AtomicRule::HARMONIC ? 1.0 / (d * d) : std::log(d) / (d * d);
}

// S[n] = sum_{i >= n} x_i^2 for n in [2, n_max], from one tail estimate at
// n_max+1 (direct summation to M plus a midpoint-rule integral completion,
// error well below 1e-12) and a downward recurrence.
std::vector<double> index_tail_sums(AtomicRule rule, int n_max) {
  const std::int64_t M =
      std::max<std::int64_t>(200000, 20LL * static_cast<std::int64_t>(n_max));
  long double acc = 0;
  for (std::int64_t i = M; i > n_max; --i) acc += atomic_sq_term(rule, i);
  const long double m = static_cast<long double>(M) + 0.5L;
  acc += rule == AtomicRule::HARMONIC
             ? 1.0L / m
             : (std::log(static_cast<double>(m)) + 1.0L) / m;
  std::vector<double> S(static_cast<std::size_t>(n_max) + 2, 0.0);
  long double run = acc;
  S[static_cast<std::size_t>(n_max) + 1] = static_cast<double>(run);
  for (int n = n_max; n >= 2; --n) {
    run += atomic_sq_term(rule, n);
    S[static_cast<std::size_t>(n)] = static_cast<double>(run);
  }
  return S;
}

}  // namespace

BoundaryReport check_bg_boundary_examples(int n_max) {
  if (n_max < 2)
    throw ConfigError("boundary examples: n_max must be at least 2");
  if (n_max > 2000000)
    throw ConfigError("boundary examples: n_max above 2e6 is not supported");
  BoundaryReport rep;
  const double tol = 1e-12;
  for (const AtomicRule rule :
       {AtomicRule::HARMONIC, AtomicRule::LOGHARMONIC}) {
    const std::vector<double> S = index_tail_sums(rule, n_max);
    for (int n = 2; n <= n_max; ++n) {
      BoundaryRow row;
      row.rule = rule;
      row.n = n;
      row.value = S[static_cast<std::size_t>(n)];
      if (rule == AtomicRule::HARMONIC) {
        row.lo = 1.0 / n;
        row.hi = 1.0 / (n - 1.0);
      } else {
        const double ln = std::log(static_cast<double>(n));
        row.lo = ln / n;
        row.hi = 2.0 * ln / n;
      }
      row.pass = row.value >= row.lo - tol && row.value <= row.hi + tol;
      if (!row.pass) ++rep.failures;
      rep.rows.push_back(row);
    }
  }
  rep.all_pass = rep.failures == 0;
  return rep;
}

MeanSE appendix_random_walk_gap(double T, double k_n, std::size_t paths,
                                std::uint64_t seed) {
  if (!(T > 0)) throw ConfigError("random-walk gap: T must be positive");
  if (!(k_n >= 1))
    throw ConfigError("random-walk gap: the grid frequency must be >= 1");
  if (paths < 10000)
    throw ConfigError("random-walk gap: need at least 10^4 paths");
  std::vector<double> sups(paths);
  parallel_for(paths, [&](std::size_t p) {
    Stream rs = Stream::keyed(seed, tag64("appendix"), p);
    const auto m = rs.poisson(T);
    const std::vector<double> jt =
        rs.sorted_uniform_times(static_cast<std::size_t>(m), T);
    // Right boundaries of the occupied cells ((c-1)/k_n, c/k_n]; sorted jump
    // times give nondecreasing cells, so adjacent dedup suffices.
    std::vector<double> bt;
    bt.reserve(jt.size());
    std::int64_t last_cell = -1;
    for (const double t : jt) {
      const auto c = static_cast<std::int64_t>(std::ceil(t * k_n));
      if (c != last_cell) {
        last_cell = c;
        const double b = static_cast<double>(c) / k_n;
        if (b <= T) bt.push_back(b);
      }
    }
    // The coupled difference gains +1 at each jump and loses 1 when an
    // occupied cell closes; it is constant in between, so its sup is found
    // by one merged sweep. Simultaneous events apply together (both counts
    // are right-continuous).
    std::size_t a = 0, b = 0;
    long long d = 0, sup = 0;
    const double inf = std::numeric_limits<double>::infinity();
    while (a < jt.size() || b < bt.size()) {
      const double ta = a < jt.size() ? jt[a] : inf;
      const double tb = b < bt.size() ? bt[b] : inf;
      const double t = std::min(ta, tb);
      while (a < jt.size() && jt[a] == t) {
        ++d;
        ++a;
      }
      while (b < bt.size() && bt[b] == t) {
        --d;
        ++b;
      }
      sup = std::max(sup, std::llabs(d));
    }
    sups[p] = static_cast<double>(sup);
  });
  return mean_se(sups);
}

}  // namespace levybsde
