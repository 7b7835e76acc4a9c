#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levybsde/bsde_grid.hpp"
#include "levybsde/generators.hpp"
#include "levybsde/levy_models.hpp"
#include "levybsde/stats.hpp"

namespace levybsde {

// One refinement level of a convergence experiment. `n` is the jump cutoff
// parameter (the approximation keeps jumps of magnitude >= 1/n); for frozen
// drivers the clock resolution m is tied to n.
struct RateLevel {
  double n = 0;
  double error = 0;        // L2 error estimate at this level
  double se = 0;           // standard error of `error` (delta method)
  double bound = 0;        // theory curve: c_beta * sqrt(T) * n^{-(1-beta/2)}
                           // (+ the driver-gap term for gap experiments)
  double gap_term = 0;     // driver-gap part c_n of a two-term bound
  std::string dominant;    // "process" or "gap" for two-term bounds, else ""
};

struct RateReport {
  std::vector<RateLevel> levels;
  SlopeFit fit;                     // weighted log2-log2 fit; CI from path
                                    // bootstrap when path data is available
  SlopeFit bound_fit;               // fitted slope of the normalized theory
                                    // curve n^{-(1-beta/2)} (+ c_n for
                                    // driver-gap runs) over the same levels
  double theory_slope = 0;          // -(1 - beta/2) with the beta below
  double beta = 0;                  // moment order used for the bound curve
  double reference_bias_bound = 0;  // substitution bias of the eps_ref proxy
  std::size_t paths = 0;
  std::string note;
};

// Moment order used by the bound curves: validates an explicit beta against
// (activity_index, 2), or derives activity_index + 0.25 (capped at 1.9)
// when beta <= 0.
double resolve_moment_order(const LevyModel& model, double beta);

// Strong pathwise error sqrt(E[sup_t |X - X^n|^2]) across cutoff levels,
// estimated by coupled thinning from one reference path per sample.
struct ProcessRateSpec {
  LevyModel model;
  std::vector<double> levels{2, 4, 8, 16, 32, 64};
  double eps_ref = 1e-4;
  std::size_t paths = 10000;
  double T = 1.0;
  double beta = 0;        // bound-curve moment order in (beta_star, 2);
                          // <= 0 selects beta_star + 0.25 (capped below 2)
  std::uint64_t seed = 1;
  int bootstrap = 200;    // path-resample replicates for the slope CI
};
RateReport run_process_rate(const ProcessRateSpec& spec);

// Backward-equation error across cutoff levels: per path, the sup over the
// solver time grid of |u^n(t, X^n_t) - u^ref(t, X^ref_t)| on coupled paths
// (L2-averaged), plus the jump-increment error |U^n - U^ref|^2 integrated
// against the jump measure and time along the same paths.
struct BsdeRateSpec {
  BSDEProblem problem;    // eps is overwritten per level with 1/n
  GridSpec grid;          // shared solver config; q = 0 calibrates once at
                          // the reference level and reuses that box
  std::vector<double> levels{2, 4, 8, 16, 32};
  double n_ref = 256;
  std::size_t paths = 2000;
  int u_quad_nodes = 128;  // jump-measure quadrature size for the U norm
  double beta = 0;         // as in ProcessRateSpec
  std::uint64_t seed = 2;
  int bootstrap = 200;
};
struct BsdeRateReport {
  RateReport y;
  RateReport u;
  double refine_delta = 0;  // sup_x |u_ref(0,x) at K steps - at 2K steps|
};
BsdeRateReport run_bsde_rate(const BsdeRateSpec& spec);

// Driver-approximation error across levels with the two-term bound
// C''{ c_beta sqrt(T) n^{-(1-beta/2)} + c_n }. An INTEGRAL driver is used
// as-is per level (its jump quadrature follows the level cutoff); a
// TIME_DISCRETIZED driver has its inner generator re-frozen at clock
// resolution m = n per level (the declared steps value is superseded), and
// the reference solve uses the unfrozen inner driver at the reference
// cutoff. Any other driver kind has no approximation gap and is rejected.
struct GapRateSpec {
  LevyModel model;
  GeneratorSpec driver = GeneratorSpec::zero();
  std::function<double(double)> terminal;
  double terminal_lipschitz = 0;
  GridSpec grid;
  std::vector<double> levels{2, 4, 8, 16, 32};
  double n_ref = 256;
  std::size_t paths = 2000;
  double T = 1.0;
  double beta = 0;
  std::uint64_t seed = 3;
  int bootstrap = 200;
};
RateReport run_generator_gap_rate(const GapRateSpec& spec);

// Distribution-distance bracket at one cutoff level: analytic lower bound
// c_T * sqrt(m2(1/(2n))) against the coupled empirical L2 sup upper bound.
struct WassersteinSpec {
  LevyModel model;
  double n = 8;
  double eps_ref = 1e-4;
  std::size_t paths = 10000;
  double T = 1.0;
  std::uint64_t seed = 4;
};
struct LowerBoundReport {
  double n = 0;
  double m2_half = 0;        // second moment of the ball of radius 1/(2n)
  double c_T = 0;            // sqrt(P(first jump by T)); 1 if infinite activity
  double lower = 0;          // c_T * sqrt(m2_half)
  double coupled_upper = 0;  // empirical sqrt(E[sup|X - X^n|^2])
  double upper_se = 0;
  bool ordered = false;      // lower <= coupled_upper + 3 * upper_se
};
LowerBoundReport wasserstein_bounds(const WassersteinSpec& spec);

// Finite-range restatement of the rate-optimality divergence: for any
// beta below the activity index, n^{2-beta} * m2(1/(2n)) has running max
// growing without an upper plateau across the tested levels.
struct DivergenceRecord {
  std::vector<double> levels;
  std::vector<double> values;       // n^{2-beta} * m2(1/(2n))
  std::vector<double> running_max;
  double growth = 0;                // running_max back / front
  double second_half_growth = 0;    // running_max back / middle
  bool diverging = false;           // second_half_growth >= 1.02
};
DivergenceRecord check_optimality_divergence(const LevyModel& model,
                                             double beta_below,
                                             const std::vector<double>& levels);

// Closed-form small-ball brackets for the built-in atomic rules, checked for
// every n in [2, n_max] at tolerance 1e-12 via one tail evaluation and a
// downward recurrence:
//   unit weights on 1/i:          1/n     <= sum_{i>=n} i^{-2}      <= 1/(n-1)
//   unit weights on sqrt(ln i)/i: ln(n)/n <= sum_{i>=n} ln(i)·i^{-2} <= 2ln(n)/n
struct BoundaryRow {
  AtomicRule rule;
  double n = 0;
  double value = 0;
  double lo = 0;
  double hi = 0;
  bool pass = false;
};
struct BoundaryReport {
  std::vector<BoundaryRow> rows;  // both rules, n ascending
  std::size_t failures = 0;
  bool all_pass = false;
};
BoundaryReport check_bg_boundary_examples(int n_max);

// Mean over paths of sup_t |N(t) - S_n(t)| where N is a rate-1 Poisson path
// and S_n(t) = sum_{i <= floor(k_n t)} 1{N jumps in ((i-1)/k_n, i/k_n]} is its
// Bernoulli partial-sum coupling on the same probability space. The sup is
// exact: it is attained at jump epochs or occupied-cell boundaries. The
// estimate stays >= (1 - e^{-T})/2 no matter how fine the grid.
MeanSE appendix_random_walk_gap(double T, double k_n, std::size_t paths,
                                std::uint64_t seed);

}  // namespace levybsde
