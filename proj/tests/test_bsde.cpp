#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "levybsde/bsde_grid.hpp"
#include "levybsde/bsde_lsmc.hpp"
#include "levybsde/errors.hpp"
#include "levybsde/generators.hpp"
#include "levybsde/levy_measures.hpp"
#include "levybsde/levy_models.hpp"
#include "levybsde/path_sim.hpp"
#include "oracles.hpp"

using namespace levybsde;

namespace {

LevyModel cgmy_std() { return LevyModel::cgmy(1.0, 5.0, 5.0, 0.5); }
LevyModel merton_std() { return LevyModel::merton(1.0, 0.0, 1.0); }

double clip2(double x) { return std::min(std::fabs(x), 2.0); }

}  // namespace

TEST_CASE("generator factories validate their inputs") {
  CHECK_THROWS_AS(GeneratorSpec::integral_linear_yz(1, 1, 1, 0.0), std::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::integral_linear_yz(1, 1, 1, -1.0), std::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::time_discretized(GeneratorSpec::zero(), 0), std::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::hoelder(1.0, 0.0, 3), std::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::hoelder(1.0, 1.5, 3), std::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::hoelder(1.0, 0.5, 0), std::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::custom_fn(nullptr, -1.0, 1.0, true, "bad"), std::domain_error);
}

TEST_CASE("zero and linear drivers evaluate in closed form") {
  const GeneratorContext ctx{1.0, 0.0, nullptr};
  const auto noU = [](double) { return 0.0; };
  CHECK(evaluate_generator(GeneratorSpec::zero(), ctx, 0.3, 5.0, noU) == 0.0);
  const auto lin = GeneratorSpec::linear(0.5, 1.0);
  CHECK(evaluate_generator(lin, ctx, 0.0, 3.0, noU) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(generator_lipschitz(lin, ctx) == 0.5);
  CHECK(generator_y_only(lin));
}

TEST_CASE("integral driver is the weighted jump-size quadrature") {
  // Hand quadrature: cells z=2 (weight 1/2, delta = 1) and z=1/2 (weight 1/2,
  // delta = 1/4 for beta_bar = 2), total mass 4.  With U(z) = z and
  // Phi(y, v) = y + 2 v:
  //   f = 4 * [ 1/2 * (y + 4) * 1 + 1/2 * (y + 1) * 1/4 ] = 2.5 y + 8.5.
  std::vector<QuadNode> nodes{{2.0, 0.5}, {0.5, 0.5}};
  const GeneratorContext ctx{1.0, 4.0, &nodes};
  const auto spec = GeneratorSpec::integral_linear_yz(1.0, 2.0, 3.0, 2.0);
  const auto U = [](double z) { return z; };
  CHECK(evaluate_generator(spec, ctx, 0.0, 1.0, U) == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(evaluate_generator(spec, ctx, 0.7, -2.0, U) == doctest::Approx(3.5).epsilon(1e-14));
  // Lipschitz bound: |cy| * Lambda * sum(w d) + |cz| * sqrt(Lambda * sum(w d^2))
  // with sum(w d) = 5/8 and sum(w d^2) = 17/32, both computed by hand.
  const double expect = 1.0 * 4.0 * 0.625 + 2.0 * std::sqrt(4.0 * 0.53125);
  CHECK(generator_lipschitz(spec, ctx) == doctest::Approx(expect).epsilon(1e-15));
  CHECK_FALSE(generator_y_only(spec));
  CHECK_THROWS_AS(evaluate_generator(spec, GeneratorContext{1.0, 4.0, nullptr}, 0, 0,
                                     U),
                  std::logic_error);
}

TEST_CASE("time-discretized wrapper freezes the clock on a dyadic grid") {
  const auto frozen = GeneratorSpec::time_discretized(GeneratorSpec::ramp(1.0), 4);
  const GeneratorContext ctx{1.0, 0.0, nullptr};
  const auto noU = [](double) { return 0.0; };
  CHECK(evaluate_generator(frozen, ctx, 0.3, 0.0, noU) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(evaluate_generator(frozen, ctx, 0.999, 0.0, noU) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(evaluate_generator(frozen, ctx, 0.1, 0.0, noU) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(generator_y_only(frozen));
  const auto inner_int = GeneratorSpec::integral_linear_yz(1, 1, 1, 1.0);
  CHECK_FALSE(generator_y_only(GeneratorSpec::time_discretized(inner_int, 3)));
}

TEST_CASE("rough-in-time driver has the advertised sawtooth values") {
  const GeneratorContext ctx{1.0, 0.0, nullptr};
  const auto noU = [](double) { return 0.0; };
  const auto h1 = GeneratorSpec::hoelder(2.0, 1.0, 1);
  CHECK(evaluate_generator(h1, ctx, 0.25, 9.0, noU) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(evaluate_generator(h1, ctx, 0.5, 0.0, noU) == doctest::Approx(1.0).epsilon(1e-15));
  const auto h2 = GeneratorSpec::hoelder(2.0, 1.0, 2);
  // 2 * (dist(0.25) + 2^{-1} dist(0.5 + 0.6180339887498949)) =
  // 2 * (0.25 + 0.5 * 0.1180339887498949) = 0.6180339887498949.
  CHECK(evaluate_generator(h2, ctx, 0.25, 0.0, noU) ==
        doctest::Approx(0.6180339887498949).epsilon(1e-14));
  // The phased sum is non-degenerate on the binary grid: with many terms the
  // tail contributions at t=0.25 must not all vanish.
  const auto h9 = GeneratorSpec::hoelder(1.0, 0.1, 32);
  double tail_sum = evaluate_generator(h9, ctx, 0.25, 0.0, noU) -
                    evaluate_generator(GeneratorSpec::hoelder(1.0, 0.1, 2), ctx, 0.25, 0.0, noU);
  CHECK(tail_sum > 0.5);  // ~30 active terms averaging dist ~ 1/4 each
  const auto r = GeneratorSpec::ramp(-3.0);
  CHECK(evaluate_generator(r, ctx, 0.5, 7.0, noU) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(generator_lipschitz(h1, ctx) == 0.0);
}

TEST_CASE("discretization gap: frozen clock at unit regularity gives T/m") {
  const auto g = GeneratorSpec::time_discretized(GeneratorSpec::ramp(1.0), 10);
  CHECK(generator_gap_cn(cgmy_std(), g, 5.0, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  // Freezing a time-constant driver changes nothing.
  CHECK(generator_gap_cn(cgmy_std(),
                         GeneratorSpec::time_discretized(GeneratorSpec::zero(), 7),
                         5.0, 1.0) == 0.0);
  CHECK(generator_gap_cn(cgmy_std(),
                         GeneratorSpec::time_discretized(GeneratorSpec::linear(1, 2), 7),
                         5.0, 1.0) == 0.0);
  // Fractional regularity: (T/m)^alpha.
  const auto rough = GeneratorSpec::time_discretized(GeneratorSpec::hoelder(1.0, 0.5, 9), 16);
  CHECK(generator_gap_cn(cgmy_std(), rough, 2.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("discretization gap: integral driver on unit-weight atoms brackets 1/n") {
  const auto model = LevyModel::atomic(AtomicRule::HARMONIC);
  const auto spec = GeneratorSpec::integral_linear_yz(1.0, 1.0, 1.0, 2.0);
  for (double n : {2.0, 5.0, 32.0}) {
    const double gap = generator_gap_cn(model, spec, n, 1.0);
    CHECK(gap > 1.0 / n);
    CHECK(gap < 1.0 / (n - 1.0));
  }
}

TEST_CASE("discretization gap: integral driver vanishes for finite activity") {
  const auto spec = GeneratorSpec::integral_linear_yz(1.0, 1.0, 1.0, 2.0);
  double prev = 1e300;
  for (double n = 2.0; n <= 1024.0; n *= 2.0) {
    const double gap = generator_gap_cn(merton_std(), spec, n, 1.0);
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(generator_gap_cn(merton_std(), spec, 1e6, 1.0) < 1e-3);
}

TEST_CASE("discretization gap: undefined kinds and too-small exponents throw") {
  CHECK_THROWS_AS(generator_gap_cn(cgmy_std(), GeneratorSpec::zero(), 4.0, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(generator_gap_cn(cgmy_std(), GeneratorSpec::linear(1, 1), 4.0, 1.0),
                  std::domain_error);
  // Exponent at or below the activity index: the gap moment is not usable.
  const auto low = GeneratorSpec::integral_linear_yz(1, 1, 1, 0.4);
  CHECK_THROWS_AS(generator_gap_cn(cgmy_std(), low, 4.0, 1.0), std::domain_error);
}

// ---------------------------------------------------------------------------
// Grid solver
// ---------------------------------------------------------------------------

TEST_CASE("grid solver: zero driver with constant terminal stays constant") {
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.125;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = [](double) { return 7.0; };
  GridSpec gs;
  gs.time_steps = 8;
  gs.space_nodes = 65;
  gs.quad_nodes = 128;
  gs.q = 4.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  REQUIRE(sol.u.size() == 9);
  REQUIRE(sol.xgrid.size() == 65);
  CHECK(sol.tgrid.back() == 1.0);
  CHECK(sol.xgrid[32] == 0.0);  // odd node count centers the anchor exactly
  for (const auto& row : sol.u)
    for (double v : row) CHECK(v == doctest::Approx(7.0).epsilon(1e-12));
  // Terminal row is the raw terminal function, untouched.
  for (double v : sol.u.back()) CHECK(v == 7.0);
  CHECK(sol.max_picard == 0);
  CHECK(sol.count_tail < 1e-11);
  CHECK(sol.warning.empty());
}

TEST_CASE("grid solver: terminal row reproduces the terminal function exactly") {
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.0;
  pb.T = 0.5;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = [](double x) { return std::sin(x); };
  GridSpec gs;
  gs.time_steps = 4;
  gs.space_nodes = 33;
  gs.quad_nodes = 64;
  gs.q = 2.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  for (std::size_t j = 0; j < sol.xgrid.size(); ++j)
    CHECK(sol.u.back()[j] == std::sin(sol.xgrid[j]));
}

TEST_CASE("grid solver: linear driver with constant terminal matches the recursion") {
  const double a = 0.5, b = 1.0, c = 3.0, T = 1.0;
  const int K = 64;
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.125;
  pb.T = T;
  pb.generator = GeneratorSpec::linear(a, b);
  pb.terminal = [c](double) { return c; };
  GridSpec gs;
  gs.time_steps = K;
  gs.space_nodes = 65;
  gs.quad_nodes = 128;
  gs.q = 4.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  // Constants propagate through the expectation, so every step is exactly
  // y <- (y + dt b) / (1 - dt a).
  const double dt = T / K;
  double y = c;
  for (int i = 0; i < K; ++i) y = (y + dt * b) / (1.0 - dt * a);
  CHECK(sol.value_at(0, 0.0) == doctest::Approx(y).epsilon(1e-10));
  // And the scheme is first-order consistent with the continuous solution.
  const double cont = std::exp(a * T) * c + (b / a) * (std::exp(a * T) - 1.0);
  CHECK(sol.value_at(0, 0.0) == doctest::Approx(cont).epsilon(0.01));
  CHECK(sol.max_picard == 1);
}

TEST_CASE("grid solver: zero driver matches direct terminal sampling") {
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.125;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 32;
  gs.space_nodes = 513;
  gs.quad_nodes = 256;
  gs.q = 4.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  Stream rng = Stream::keyed(1234, tag64("gridmc"), 0);
  const MeanSE mc = terminal_expectation(pb, 0.0, 200000, rng);
  INFO("grid ", sol.value_at(0, 0.0), " mc ", mc.mean, " se ", mc.se);
  CHECK(std::fabs(sol.value_at(0, 0.0) - mc.mean) < 4.0 * mc.se + 0.008);
}

TEST_CASE("grid solver: empty jump support reduces to the deterministic recursion") {
  // No atom of the harmonic measure reaches past 2, so the state never moves.
  BSDEProblem pb;
  pb.model = LevyModel::atomic(AtomicRule::HARMONIC);
  pb.eps = 2.0;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::linear(0.5, 1.0);
  pb.terminal = [](double x) { return clip2(x) - 0.25 * x; };
  GridSpec gs;
  gs.time_steps = 16;
  gs.space_nodes = 65;
  gs.quad_nodes = 32;
  gs.q = 2.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  CHECK(sol.lambda == 0.0);
  CHECK(sol.drift == 0.0);
  const double dt = pb.T / 16;
  for (std::size_t j = 0; j < sol.xgrid.size(); ++j) {
    double y = pb.terminal(sol.xgrid[j]);
    for (int i = 0; i < 16; ++i) y = (y + dt) / (1.0 - 0.5 * dt);
    CHECK(sol.u[0][j] == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("grid solver: integral driver row solve agrees with the generic sweep") {
  const double cy = 0.3, cz = 0.2, bb = 1.0;
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.25;
  pb.T = 0.5;
  pb.generator = GeneratorSpec::integral_linear_yz(cy, cz, 1.0, bb);
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 8;
  gs.space_nodes = 129;
  gs.quad_nodes = 128;
  gs.q = 3.0;
  gs.calibration_paths = 0;
  const GridSolution fast = solve_markovian_grid(pb, gs);

  // The same driver expressed as an opaque callback over the same quadrature
  // must land on the same fixed point through the generic sweep path.
  const double lambda = tail_mass(pb.model, pb.eps);
  std::vector<QuadNode> nodes = restricted_quad_nodes(pb.model, pb.eps, gs.quad_nodes);
  double wsum = 0.0;
  for (const auto& nd : nodes) wsum += nd.w;
  for (auto& nd : nodes) nd.w /= wsum;
  const GeneratorContext ctx{pb.T, lambda, &nodes};
  const double lip = generator_lipschitz(pb.generator, ctx);
  auto wrapped = [lambda, nodes, cy, cz, bb](
                     double, double y, const std::function<double(double)>& U) {
    double s = 0.0;
    for (const auto& nd : nodes) {
      const double d = std::min(1.0, std::pow(std::fabs(nd.z), bb));
      s += nd.w * (cy * y + cz * U(nd.z)) * d;
    }
    return lambda * s;
  };
  BSDEProblem pb2 = pb;
  pb2.generator = GeneratorSpec::custom_fn(wrapped, lip, 1.0, false, "wrapped");
  const GridSolution slow = solve_markovian_grid(pb2, gs);
  double worst = 0.0;
  for (std::size_t i = 0; i < fast.u.size(); ++i)
    for (std::size_t j = 0; j < fast.u[i].size(); ++j)
      worst = std::max(worst, std::fabs(fast.u[i][j] - slow.u[i][j]));
  INFO("max row-solve vs sweep gap ", worst);
  CHECK(worst < 1e-8);
  CHECK(fast.max_picard >= 2);
}

TEST_CASE("grid solver: integral driver over empty support equals the zero driver") {
  BSDEProblem pb;
  pb.model = LevyModel::atomic(AtomicRule::HARMONIC);
  pb.eps = 2.0;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::integral_linear_yz(0.4, 0.3, 1.0, 1.0);
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 8;
  gs.space_nodes = 33;
  gs.quad_nodes = 16;
  gs.q = 2.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  BSDEProblem pb0 = pb;
  pb0.generator = GeneratorSpec::zero();
  const GridSolution ref = solve_markovian_grid(pb0, gs);
  for (std::size_t i = 0; i < sol.u.size(); ++i)
    for (std::size_t j = 0; j < sol.u[i].size(); ++j)
      CHECK(sol.u[i][j] == doctest::Approx(ref.u[i][j]).epsilon(1e-13));
}

TEST_CASE("grid solver: value accessor extends with the boundary slope") {
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.0;
  pb.T = 0.25;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 4;
  gs.space_nodes = 33;
  gs.quad_nodes = 64;
  gs.q = 2.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  const double h = sol.xgrid[1] - sol.xgrid[0];
  const auto& row = sol.u[1];
  const double xr = sol.xgrid.back() + 0.7;
  const double expect_r = row[32] + (row[32] - row[31]) * (0.7 / h);
  CHECK(sol.value_at(1, xr) == doctest::Approx(expect_r).epsilon(1e-12));
  const double xl = sol.xgrid.front() - 1.3;
  const double expect_l = row[0] - (row[1] - row[0]) * (1.3 / h);
  CHECK(sol.value_at(1, xl) == doctest::Approx(expect_l).epsilon(1e-12));
  CHECK(sol.jump_increment(1, 0.1, 0.5) ==
        doctest::Approx(sol.value_at(1, 0.6) - sol.value_at(1, 0.1)).epsilon(1e-14));
  CHECK_THROWS_AS(sol.value_at(9, 0.0), std::out_of_range);
}

TEST_CASE("grid solver: contraction and configuration guards") {
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.0;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::linear(40.0, 0.0);
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 8;
  gs.space_nodes = 33;
  gs.quad_nodes = 32;
  gs.q = 2.0;
  gs.calibration_paths = 0;
  CHECK_THROWS_AS(solve_markovian_grid(pb, gs), ConfigError);
  pb.generator = GeneratorSpec::zero();
  GridSpec bad = gs;
  bad.time_steps = 0;
  CHECK_THROWS_AS(solve_markovian_grid(pb, bad), ConfigError);
  bad = gs;
  bad.space_nodes = 2;
  CHECK_THROWS_AS(solve_markovian_grid(pb, bad), ConfigError);
  bad = gs;
  bad.q = 0.0;  // calibration disabled and no width given
  CHECK_THROWS_AS(solve_markovian_grid(pb, bad), ConfigError);
  BSDEProblem nog = pb;
  nog.terminal = nullptr;
  CHECK_THROWS_AS(solve_markovian_grid(nog, gs), ConfigError);
}

TEST_CASE("grid solver: calibration widens the grid and flags a too-small override") {
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.125;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 4;
  gs.space_nodes = 65;
  gs.quad_nodes = 64;
  gs.calibration_paths = 2000;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  CHECK(sol.q >= 0.5);  // margin alone guarantees this
  CHECK(sol.warning.empty());
  GridSpec tight = gs;
  tight.q = 0.05;
  const GridSolution flagged = solve_markovian_grid(pb, tight);
  CHECK_FALSE(flagged.warning.empty());
}

TEST_CASE("grid solver: Lipschitz and boundedness propagate") {
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.125;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::linear(0.5, 1.0);
  pb.terminal = clip2;  // Lipschitz 1, bounded by 2
  pb.terminal_lipschitz = 1.0;
  GridSpec gs;
  gs.time_steps = 32;
  gs.space_nodes = 257;
  gs.quad_nodes = 128;
  gs.q = 4.0;
  gs.calibration_paths = 0;
  const GridSolution sol = solve_markovian_grid(pb, gs);
  const double h = sol.xgrid[1] - sol.xgrid[0];
  const double lip_bound = pb.terminal_lipschitz * std::exp(0.5 * pb.T) * 1.01;
  double lip = 0.0, amax = 0.0;
  for (const auto& row : sol.u) {
    for (std::size_t j = 0; j + 1 < row.size(); ++j)
      lip = std::max(lip, std::fabs(row[j + 1] - row[j]) / h);
    for (double v : row) amax = std::max(amax, std::fabs(v));
  }
  CHECK(lip <= lip_bound);
  // A-priori bound: (|g|_inf + T |f(0,0)|) e^{L_f T}, with slack.
  CHECK(amax <= (2.0 + 1.0) * std::exp(0.5) * 1.01);
}

TEST_CASE("grid solver: identical tables across thread settings") {
  const char* saved = std::getenv("LEVY_BSDE_THREADS");
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.25;
  pb.T = 0.5;
  pb.generator = GeneratorSpec::hoelder(0.5, 0.5, 9);
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 8;
  gs.space_nodes = 65;
  gs.quad_nodes = 64;
  gs.q = 3.0;
  gs.calibration_paths = 0;
  setenv("LEVY_BSDE_THREADS", "1", 1);
  const GridSolution one = solve_markovian_grid(pb, gs);
  setenv("LEVY_BSDE_THREADS", "2", 1);
  const GridSolution two = solve_markovian_grid(pb, gs);
  if (saved)
    setenv("LEVY_BSDE_THREADS", saved, 1);
  else
    unsetenv("LEVY_BSDE_THREADS");
  for (std::size_t i = 0; i < one.u.size(); ++i)
    for (std::size_t j = 0; j < one.u[i].size(); ++j)
      CHECK(one.u[i][j] == two.u[i][j]);
}

// ---------------------------------------------------------------------------
// Regression solver
// ---------------------------------------------------------------------------

TEST_CASE("regression solver: constant terminal with zero driver is exact") {
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.5;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = [](double) { return 4.25; };
  LsmcSpec ls;
  ls.time_steps = 16;
  ls.paths = 4000;
  ls.degree = 3;
  ls.seed = 7;
  const LsmcSolution sol = solve_lsmc(pb, ls);
  CHECK(sol.y0 == doctest::Approx(4.25).epsilon(1e-11));
}

TEST_CASE("regression solver: linear driver with constant terminal matches the recursion") {
  const double a = 0.5, b = 1.0, c = 3.0;
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.5;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::linear(a, b);
  pb.terminal = [c](double) { return c; };
  LsmcSpec ls;
  ls.time_steps = 32;
  ls.paths = 3000;
  ls.degree = 2;
  ls.seed = 3;
  const LsmcSolution sol = solve_lsmc(pb, ls);
  const double dt = pb.T / ls.time_steps;
  double y = c;
  for (int i = 0; i < ls.time_steps; ++i) y = (y + dt * b) / (1.0 - dt * a);
  CHECK(sol.y0 == doctest::Approx(y).epsilon(1e-9));
}

TEST_CASE("regression solver: linear terminal under a symmetric process") {
  // g(x) = x and a centered driving process make the conditional expectations
  // exactly linear, so the scheme converges to the linear-driver closed form.
  const double a = 0.5, b = 1.0, T = 1.0;
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.0;
  pb.T = T;
  pb.generator = GeneratorSpec::linear(a, b);
  pb.terminal = [](double x) { return x; };
  LsmcSpec ls;
  ls.time_steps = 64;
  ls.paths = 20000;
  ls.degree = 3;
  ls.seed = 11;
  ls.bootstrap = 30;
  const LsmcSolution sol = solve_lsmc(pb, ls);
  const double target = (b / a) * (std::exp(a * T) - 1.0);
  INFO("y0 ", sol.y0, " se ", sol.se, " target ", target);
  CHECK(sol.se > 0.0);
  CHECK(std::fabs(sol.y0 - target) < 3.0 * sol.se + 0.01);
}

TEST_CASE("regression solver: rough time-only driver adds its integral") {
  // f depends only on t, so y0 = E[g] + sum dt f(t_i) exactly (implicit
  // iteration converges in one step).
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.5;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::ramp(2.0);
  pb.terminal = [](double) { return 1.0; };
  LsmcSpec ls;
  ls.time_steps = 16;
  ls.paths = 2000;
  ls.degree = 2;
  ls.seed = 5;
  const LsmcSolution sol = solve_lsmc(pb, ls);
  const double dt = pb.T / ls.time_steps;
  double expect = 1.0;
  for (int i = 0; i < ls.time_steps; ++i) expect += dt * 2.0 * (dt * i);
  CHECK(sol.y0 == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("regression solver rejects drivers that query the jump increment") {
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.5;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::integral_linear_yz(1, 1, 1, 1.0);
  pb.terminal = clip2;
  LsmcSpec ls;
  CHECK_THROWS_AS(solve_lsmc(pb, ls), std::domain_error);
}

TEST_CASE("regression solver and grid solver agree on a nonlinear terminal") {
  BSDEProblem pb;
  pb.model = cgmy_std();
  pb.eps = 0.125;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::linear(0.25, 0.5);
  pb.terminal = clip2;
  GridSpec gs;
  gs.time_steps = 32;
  gs.space_nodes = 513;
  gs.quad_nodes = 256;
  gs.q = 4.0;
  gs.calibration_paths = 0;
  const GridSolution grid = solve_markovian_grid(pb, gs);
  LsmcSpec ls;
  ls.time_steps = 32;
  ls.paths = 20000;
  ls.degree = 4;
  ls.seed = 21;
  const LsmcSolution reg = solve_lsmc(pb, ls);
  INFO("grid ", grid.value_at(0, 0.0), " lsmc ", reg.y0);
  CHECK(std::fabs(grid.value_at(0, 0.0) - reg.y0) <
        0.02 * std::max(1.0, std::fabs(reg.y0)));
}

TEST_CASE("terminal sampling of the truncated process is centered") {
  BSDEProblem pb;
  pb.model = merton_std();
  pb.eps = 0.0;
  pb.T = 1.0;
  pb.generator = GeneratorSpec::zero();
  pb.terminal = [](double x) { return x; };
  Stream rng = Stream::keyed(99, tag64("tc"), 0);
  const MeanSE m = terminal_expectation(pb, 1.5, 100000, rng);
  CHECK(std::fabs(m.mean - 1.5) < 4.0 * m.se);
  CHECK(m.se < 0.02);
}
