// Python bindings for the main operations: jump-measure functionals, the
// coupled rate experiments, the backward-equation solvers, and the
// distance/boundary checks.  Specs are built declaratively (no Python
// callbacks cross into the parallel sections), so every function can drop
// the GIL while it computes.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "levybsde/bsde_grid.hpp"
#include "levybsde/bsde_lsmc.hpp"
#include "levybsde/config.hpp"
#include "levybsde/errors.hpp"
#include "levybsde/generators.hpp"
#include "levybsde/levy_measures.hpp"
#include "levybsde/levy_models.hpp"
#include "levybsde/rates.hpp"
#include "levybsde/rng.hpp"

namespace py = pybind11;
using namespace levybsde;

namespace {

double moment_or_inf(const Moment& m) {
  return m.infinite ? std::numeric_limits<double>::infinity() : m.value;
}

BSDEProblem make_problem(const LevyModel& model, double eps, double T,
                         const GeneratorSpec& generator,
                         const TerminalSpec& terminal) {
  BSDEProblem p;
  p.model = model;
  p.eps = eps;
  p.T = T;
  p.generator = generator;
  p.terminal = terminal.fn();
  p.terminal_lipschitz = terminal.lipschitz();
  return p;
}

GridSpec make_grid(int time_steps, int space_nodes, int quad_nodes, double x0,
                   double q, std::size_t calibration_paths) {
  GridSpec g;
  g.time_steps = time_steps;
  g.space_nodes = space_nodes;
  g.quad_nodes = quad_nodes;
  g.x0 = x0;
  g.q = q;
  g.calibration_paths = calibration_paths;
  return g;
}

}  // namespace

PYBIND11_MODULE(_levybsde, m) {
  m.doc() =
      "Compound-Poisson approximation of pure-jump processes and the "
      "backward equations they drive: measures, solvers, and convergence "
      "experiments.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<LevyModel>(m, "Model", "A square-integrable pure-jump measure.")
      .def_static("cgmy", &LevyModel::cgmy, py::arg("C"), py::arg("G"),
                  py::arg("M"), py::arg("Y"))
      .def_static("merton", &LevyModel::merton, py::arg("lam"), py::arg("mu"),
                  py::arg("sigma"))
      .def_static("stable_like", &LevyModel::stable_like, py::arg("cp"),
                  py::arg("cm"), py::arg("alpha"), py::arg("lam_pos"),
                  py::arg("lam_neg"))
      .def_static("atomic_harmonic",
                  [] { return LevyModel::atomic(AtomicRule::HARMONIC); })
      .def_static("atomic_logharmonic",
                  [] { return LevyModel::atomic(AtomicRule::LOGHARMONIC); })
      .def_property_readonly("kind", &LevyModel::kind_name)
      .def_property_readonly("finite_activity", &LevyModel::finite_activity)
      .def("__repr__",
           [](const LevyModel& mo) { return "Model(" + mo.kind_name() + ")"; });

  m.def("bg_index", &bg_index, py::arg("model"),
        "Small-jump activity index of the measure.");
  m.def(
      "tail_mass", [](const LevyModel& mo, double eps) { return tail_mass(mo, eps); },
      py::arg("model"), py::arg("eps"), "Mass of {|x| >= eps}.");
  m.def(
      "partial_moment",
      [](const LevyModel& mo, double p, double eps) {
        return moment_or_inf(partial_moment(mo, p, eps));
      },
      py::arg("model"), py::arg("p"), py::arg("eps"),
      "Integral of |x|^p over {|x| <= eps}; inf when divergent.");
  m.def(
      "absolute_moment",
      [](const LevyModel& mo, double p) {
        return moment_or_inf(absolute_moment(mo, p));
      },
      py::arg("model"), py::arg("p"));
  m.def("c_beta", &c_beta, py::arg("model"), py::arg("beta"),
        "Rate constant 2*sqrt(integral |x|^beta d(measure)).");
  m.def("compensator_mean", &compensator_mean, py::arg("model"),
        py::arg("eps"));
  m.def("resolve_moment_order", &resolve_moment_order, py::arg("model"),
        py::arg("beta") = 0.0,
        "Moment order used by the bound curves; beta <= 0 selects the "
        "automatic choice.");

  py::class_<GeneratorSpec>(m, "Generator",
                            "Driver f(t, y, U) of the backward equation.")
      .def_static("zero", &GeneratorSpec::zero)
      .def_static("linear", &GeneratorSpec::linear, py::arg("a"), py::arg("b"))
      .def_static("integral", &GeneratorSpec::integral_linear_yz,
                  py::arg("cy"), py::arg("cz"), py::arg("ctilde"),
                  py::arg("beta_bar"))
      .def_static("time_discretized", &GeneratorSpec::time_discretized,
                  py::arg("inner"), py::arg("steps"))
      .def_static("hoelder", &GeneratorSpec::hoelder, py::arg("amplitude"),
                  py::arg("alpha"), py::arg("terms"))
      .def_static("ramp", &GeneratorSpec::ramp, py::arg("slope"))
      .def_property_readonly(
          "name", [](const GeneratorSpec& g) { return g.name; });

  py::class_<TerminalSpec>(m, "Terminal",
                           "Declarative terminal condition g.")
      .def_static("identity",
                  [] {
                    TerminalSpec t;
                    t.kind = TerminalSpec::Kind::IDENTITY;
                    return t;
                  })
      .def_static(
          "clip_abs",
          [](double cap, double shift) {
            TerminalSpec t;
            t.kind = TerminalSpec::Kind::CLIP_ABS;
            t.cap = cap;
            t.shift = shift;
            return t;
          },
          py::arg("cap"), py::arg("shift") = 0.0)
      .def_static(
          "linear",
          [](double a, double b) {
            TerminalSpec t;
            t.kind = TerminalSpec::Kind::LINEAR;
            t.a = a;
            t.b = b;
            return t;
          },
          py::arg("a"), py::arg("b"))
      .def("__call__",
           [](const TerminalSpec& t, double x) { return t.fn()(x); });

  py::class_<SlopeFit>(m, "SlopeFit")
      .def_readonly("slope", &SlopeFit::slope)
      .def_readonly("intercept", &SlopeFit::intercept)
      .def_readonly("ci_lo", &SlopeFit::ci_lo)
      .def_readonly("ci_hi", &SlopeFit::ci_hi);

  py::class_<RateLevel>(m, "RateLevel")
      .def_readonly("n", &RateLevel::n)
      .def_readonly("error", &RateLevel::error)
      .def_readonly("se", &RateLevel::se)
      .def_readonly("bound", &RateLevel::bound)
      .def_readonly("gap_term", &RateLevel::gap_term)
      .def_readonly("dominant", &RateLevel::dominant);

  py::class_<RateReport>(m, "RateReport")
      .def_readonly("levels", &RateReport::levels)
      .def_readonly("fit", &RateReport::fit)
      .def_readonly("bound_fit", &RateReport::bound_fit)
      .def_readonly("theory_slope", &RateReport::theory_slope)
      .def_readonly("beta", &RateReport::beta)
      .def_readonly("reference_bias_bound", &RateReport::reference_bias_bound)
      .def_readonly("paths", &RateReport::paths)
      .def_readonly("note", &RateReport::note);

  py::class_<BsdeRateReport>(m, "BsdeRateReport")
      .def_readonly("y", &BsdeRateReport::y)
      .def_readonly("u", &BsdeRateReport::u)
      .def_readonly("refine_delta", &BsdeRateReport::refine_delta);

  py::class_<LowerBoundReport>(m, "LowerBoundReport")
      .def_readonly("n", &LowerBoundReport::n)
      .def_readonly("m2_half", &LowerBoundReport::m2_half)
      .def_readonly("c_T", &LowerBoundReport::c_T)
      .def_readonly("lower", &LowerBoundReport::lower)
      .def_readonly("coupled_upper", &LowerBoundReport::coupled_upper)
      .def_readonly("upper_se", &LowerBoundReport::upper_se)
      .def_readonly("ordered", &LowerBoundReport::ordered);

  py::class_<BoundaryRow>(m, "BoundaryRow")
      .def_property_readonly(
          "rule",
          [](const BoundaryRow& r) {
            return r.rule == AtomicRule::HARMONIC ? "harmonic" : "logharmonic";
          })
      .def_readonly("n", &BoundaryRow::n)
      .def_readonly("value", &BoundaryRow::value)
      .def_readonly("lo", &BoundaryRow::lo)
      .def_readonly("hi", &BoundaryRow::hi)
      .def_readonly("passed", &BoundaryRow::pass);

  py::class_<BoundaryReport>(m, "BoundaryReport")
      .def_readonly("rows", &BoundaryReport::rows)
      .def_readonly("failures", &BoundaryReport::failures)
      .def_readonly("all_pass", &BoundaryReport::all_pass);

  py::class_<DivergenceRecord>(m, "DivergenceRecord")
      .def_readonly("levels", &DivergenceRecord::levels)
      .def_readonly("values", &DivergenceRecord::values)
      .def_readonly("running_max", &DivergenceRecord::running_max)
      .def_readonly("growth", &DivergenceRecord::growth)
      .def_readonly("second_half_growth", &DivergenceRecord::second_half_growth)
      .def_readonly("diverging", &DivergenceRecord::diverging);

  py::class_<MeanSE>(m, "MeanSE")
      .def_readonly("mean", &MeanSE::mean)
      .def_readonly("se", &MeanSE::se)
      .def_readonly("n", &MeanSE::n);

  py::class_<GridSolution>(m, "GridSolution")
      .def_readonly("tgrid", &GridSolution::tgrid)
      .def_readonly("xgrid", &GridSolution::xgrid)
      .def_readonly("u", &GridSolution::u)
      .def_property_readonly(
          "intensity", [](const GridSolution& s) { return s.lambda; })
      .def_readonly("drift", &GridSolution::drift)
      .def_readonly("warning", &GridSolution::warning)
      .def_readonly("q", &GridSolution::q)
      .def_readonly("x0", &GridSolution::x0)
      .def("value_at", &GridSolution::value_at, py::arg("ti"), py::arg("x"),
           "Piecewise-linear value u(t_i, x) at time index ti.")
      .def("jump_increment", &GridSolution::jump_increment, py::arg("ti"),
           py::arg("x"), py::arg("z"));

  py::class_<LsmcSolution>(m, "LsmcSolution")
      .def_readonly("y0", &LsmcSolution::y0)
      .def_readonly("se", &LsmcSolution::se)
      .def_readonly("degree_fallbacks", &LsmcSolution::degree_fallbacks);

  m.def(
      "process_rate",
      [](const LevyModel& model, const std::vector<double>& levels,
         double eps_ref, std::size_t paths, double T, double beta,
         std::uint64_t seed, int bootstrap) {
        ProcessRateSpec spec;
        spec.model = model;
        spec.levels = levels;
        spec.eps_ref = eps_ref;
        spec.paths = paths;
        spec.T = T;
        spec.beta = beta;
        spec.seed = seed;
        spec.bootstrap = bootstrap;
        return run_process_rate(spec);
      },
      py::arg("model"), py::arg("levels") = std::vector<double>{2, 4, 8, 16, 32, 64},
      py::arg("eps_ref") = 1e-4, py::arg("paths") = 10000, py::arg("T") = 1.0,
      py::arg("beta") = 0.0, py::arg("seed") = 1, py::arg("bootstrap") = 200,
      py::call_guard<py::gil_scoped_release>(),
      "Strong pathwise error of the jump-truncated process across levels.");

  m.def(
      "bsde_rate",
      [](const LevyModel& model, const std::vector<double>& levels,
         const GeneratorSpec& generator, const TerminalSpec& terminal,
         double n_ref, std::size_t paths, double T, double beta,
         std::uint64_t seed, int bootstrap, int time_steps, int space_nodes,
         int quad_nodes, double x0, double q, int u_quad_nodes) {
        BsdeRateSpec spec;
        spec.problem = make_problem(model, 0.0, T, generator, terminal);
        spec.grid = make_grid(time_steps, space_nodes, quad_nodes, x0, q, 20000);
        spec.levels = levels;
        spec.n_ref = n_ref;
        spec.paths = paths;
        spec.u_quad_nodes = u_quad_nodes;
        spec.beta = beta;
        spec.seed = seed;
        spec.bootstrap = bootstrap;
        return run_bsde_rate(spec);
      },
      py::arg("model"), py::arg("levels") = std::vector<double>{2, 4, 8, 16, 32},
      py::arg("generator") = GeneratorSpec::zero(),
      py::arg("terminal") = TerminalSpec{}, py::arg("n_ref") = 256.0,
      py::arg("paths") = 2000, py::arg("T") = 1.0, py::arg("beta") = 0.0,
      py::arg("seed") = 2, py::arg("bootstrap") = 200,
      py::arg("time_steps") = 64, py::arg("space_nodes") = 513,
      py::arg("quad_nodes") = 512, py::arg("x0") = 0.0, py::arg("q") = 0.0,
      py::arg("u_quad_nodes") = 128,
      py::call_guard<py::gil_scoped_release>(),
      "Backward-equation value and jump-increment errors across levels.");

  m.def(
      "generator_gap_rate",
      [](const LevyModel& model, const GeneratorSpec& driver,
         const TerminalSpec& terminal, const std::vector<double>& levels,
         double n_ref, std::size_t paths, double T, double beta,
         std::uint64_t seed, int bootstrap, int time_steps, int space_nodes,
         int quad_nodes, double x0, double q) {
        GapRateSpec spec;
        spec.model = model;
        spec.driver = driver;
        spec.terminal = terminal.fn();
        spec.terminal_lipschitz = terminal.lipschitz();
        spec.grid = make_grid(time_steps, space_nodes, quad_nodes, x0, q, 20000);
        spec.levels = levels;
        spec.n_ref = n_ref;
        spec.paths = paths;
        spec.T = T;
        spec.beta = beta;
        spec.seed = seed;
        spec.bootstrap = bootstrap;
        return run_generator_gap_rate(spec);
      },
      py::arg("model"), py::arg("driver"), py::arg("terminal"),
      py::arg("levels") = std::vector<double>{2, 4, 8, 16, 32},
      py::arg("n_ref") = 256.0, py::arg("paths") = 2000, py::arg("T") = 1.0,
      py::arg("beta") = 0.0, py::arg("seed") = 3, py::arg("bootstrap") = 200,
      py::arg("time_steps") = 64, py::arg("space_nodes") = 513,
      py::arg("quad_nodes") = 512, py::arg("x0") = 0.0, py::arg("q") = 0.0,
      py::call_guard<py::gil_scoped_release>(),
      "Driver-approximation error with its two-term bound across levels.");

  m.def(
      "wasserstein_bounds",
      [](const LevyModel& model, double n, double eps_ref, std::size_t paths,
         double T, std::uint64_t seed) {
        WassersteinSpec spec;
        spec.model = model;
        spec.n = n;
        spec.eps_ref = eps_ref;
        spec.paths = paths;
        spec.T = T;
        spec.seed = seed;
        return wasserstein_bounds(spec);
      },
      py::arg("model"), py::arg("n") = 8.0, py::arg("eps_ref") = 1e-4,
      py::arg("paths") = 10000, py::arg("T") = 1.0, py::arg("seed") = 4,
      py::call_guard<py::gil_scoped_release>(),
      "Analytic lower vs coupled upper distance bound at one level.");

  m.def("boundary_brackets", &check_bg_boundary_examples, py::arg("n_max"),
        py::call_guard<py::gil_scoped_release>(),
        "Closed-form small-ball brackets for the atomic rules.");

  m.def("optimality_divergence", &check_optimality_divergence,
        py::arg("model"), py::arg("beta_below"), py::arg("levels"),
        py::call_guard<py::gil_scoped_release>(),
        "Growth of n^(2-beta) * m2(1/(2n)) below the activity index.");

  m.def("random_walk_gap", &appendix_random_walk_gap, py::arg("T"),
        py::arg("k_n"), py::arg("paths"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>(),
        "Mean coupling gap between a Poisson path and its Bernoulli "
        "partial-sum approximation.");

  m.def(
      "solve_grid",
      [](const LevyModel& model, double eps, double T,
         const GeneratorSpec& generator, const TerminalSpec& terminal,
         int time_steps, int space_nodes, int quad_nodes, double x0, double q,
         std::size_t calibration_paths) {
        return solve_markovian_grid(
            make_problem(model, eps, T, generator, terminal),
            make_grid(time_steps, space_nodes, quad_nodes, x0, q,
                      calibration_paths));
      },
      py::arg("model"), py::arg("eps"), py::arg("T") = 1.0,
      py::arg("generator") = GeneratorSpec::zero(),
      py::arg("terminal") = TerminalSpec{}, py::arg("time_steps") = 64,
      py::arg("space_nodes") = 513, py::arg("quad_nodes") = 512,
      py::arg("x0") = 0.0, py::arg("q") = 0.0,
      py::arg("calibration_paths") = 20000,
      py::call_guard<py::gil_scoped_release>(),
      "Backward dynamic-programming solve on a time-space grid.");

  m.def(
      "solve_lsmc",
      [](const LevyModel& model, double eps, double T,
         const GeneratorSpec& generator, const TerminalSpec& terminal,
         int time_steps, std::size_t paths, int degree, double x0,
         std::uint64_t seed, int bootstrap) {
        LsmcSpec spec;
        spec.time_steps = time_steps;
        spec.paths = paths;
        spec.degree = degree;
        spec.x0 = x0;
        spec.seed = seed;
        spec.bootstrap = bootstrap;
        return solve_lsmc(make_problem(model, eps, T, generator, terminal),
                          spec);
      },
      py::arg("model"), py::arg("eps"), py::arg("T") = 1.0,
      py::arg("generator") = GeneratorSpec::zero(),
      py::arg("terminal") = TerminalSpec{}, py::arg("time_steps") = 64,
      py::arg("paths") = 20000, py::arg("degree") = 4, py::arg("x0") = 0.0,
      py::arg("seed") = 0, py::arg("bootstrap") = 0,
      py::call_guard<py::gil_scoped_release>(),
      "Regression-based pathwise solve; reports u(0, x0).");

  m.def(
      "terminal_value_mc",
      [](const LevyModel& model, double eps, double T,
         const TerminalSpec& terminal, double x, std::size_t samples,
         std::uint64_t seed) {
        BSDEProblem p =
            make_problem(model, eps, T, GeneratorSpec::zero(), terminal);
        Stream rng = Stream::keyed(seed, tag64("terminal-mc"), 0);
        return terminal_expectation(p, x, samples, rng);
      },
      py::arg("model"), py::arg("eps"), py::arg("T"), py::arg("terminal"),
      py::arg("x") = 0.0, py::arg("samples") = 100000, py::arg("seed") = 11,
      py::call_guard<py::gil_scoped_release>(),
      "Monte Carlo estimate of E[g(x + X_T)] at the truncated level.");
}
