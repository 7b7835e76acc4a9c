#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "levybsde/config.hpp"
#include "levybsde/csv_out.hpp"
#include "levybsde/errors.hpp"
#include "levybsde/generators.hpp"
#include "levybsde/svg_plot.hpp"

using namespace levybsde;

namespace {
bool mentions(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string error_of(const std::string& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("configs round-trip losslessly through their canonical form") {
  const std::string doc = R"({
    "model": {"kind": "cgmy", "C": 1, "G": 5, "M": 5, "Y": 0.5},
    "levels": [2, 4, 8, 16.5],
    "paths": 1234,
    "T": 0.75,
    "beta": 1.25,
    "eps_ref": 3e-05,
    "seed": 18446744073709551615,
    "bootstrap": 60,
    "solver": {"time_steps": 32, "space_nodes": 257, "q": 4.5,
               "basis_degree": 3},
    "generator": {"kind": "time-discretized", "steps": 2,
                  "inner": {"kind": "hoelder", "amplitude": 2.0,
                            "alpha": 0.1, "terms": 32}},
    "terminal": {"kind": "clip-abs", "cap": 2, "shift": 0.3},
    "n_ref": 64,
    "u_quad_nodes": 48,
    "radii": [0.5, 0.25, 0.125],
    "out": "reports"
  })";
  const ExperimentConfig cfg = parse_config(doc);
  CHECK(cfg.has_model);
  CHECK(cfg.model.kind == LevyModel::Kind::CGMY);
  CHECK(cfg.model.Y == 0.5);
  CHECK(cfg.levels == std::vector<double>{2, 4, 8, 16.5});
  CHECK(cfg.paths == 1234);
  CHECK(cfg.T == 0.75);
  CHECK(cfg.beta == 1.25);
  CHECK(cfg.eps_ref == 3e-05);
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(cfg.bootstrap == 60);
  CHECK(cfg.solver.time_steps == 32);
  CHECK(cfg.solver.space_nodes == 257);
  CHECK(cfg.solver.q == 4.5);
  CHECK(cfg.solver.quad_nodes == 512);  // untouched default
  CHECK(cfg.basis_degree == 3);
  CHECK(cfg.generator.kind == GeneratorSpec::Kind::TIME_DISCRETIZED);
  REQUIRE(cfg.generator.inner != nullptr);
  CHECK(cfg.generator.inner->custom_kind == "hoelder");
  CHECK(cfg.generator.inner->c2 == 0.1);
  CHECK(cfg.terminal.kind == TerminalSpec::Kind::CLIP_ABS);
  CHECK(cfg.terminal.shift == 0.3);
  CHECK(cfg.n_ref == 64);
  CHECK(cfg.u_quad_nodes == 48);
  CHECK(cfg.radii == std::vector<double>{0.5, 0.25, 0.125});
  CHECK(cfg.out == "reports");

  const std::string canon = config_to_json(cfg);
  const ExperimentConfig back = parse_config(canon);
  CHECK(config_to_json(back) == canon);
  CHECK(config_hash(back) == config_hash(cfg));

  // The canonical form makes defaults explicit and keeps them stable.
  const ExperimentConfig dflt = parse_config("{}");
  CHECK(!dflt.has_model);
  CHECK(dflt.levels == std::vector<double>{2, 4, 8, 16, 32, 64});
  CHECK(dflt.paths == 10000);
  CHECK(dflt.T == 1.0);
  CHECK(dflt.eps_ref == 1e-4);
  CHECK(dflt.seed == 1);
  CHECK(dflt.terminal.kind == TerminalSpec::Kind::CLIP_ABS);
  CHECK(dflt.terminal.cap == 2.0);
  CHECK(dflt.generator.kind == GeneratorSpec::Kind::ZERO);
  const std::string canon_dflt = config_to_json(dflt);
  CHECK(config_to_json(parse_config(canon_dflt)) == canon_dflt);
  CHECK(!mentions(canon_dflt, "model"));
}

TEST_CASE("unknown keys are rejected at every nesting level") {
  CHECK(mentions(error_of(R"({"pths": 10})"), "pths"));
  CHECK(mentions(error_of(R"({"model": {"kind": "cgmy", "C": 1, "G": 5,
                             "M": 5, "Y": 0.5, "Cc": 2}})"), "Cc"));
  CHECK(mentions(error_of(R"({"solver": {"steps": 9}})"), "steps"));
  CHECK(mentions(error_of(R"({"generator": {"kind": "ramp", "slop": 1}})"),
                 "slop"));
  CHECK(mentions(error_of(R"({"terminal": {"kind": "clip-abs", "cap": 2,
                             "capp": 3}})"), "capp"));
  CHECK(mentions(error_of(R"({"generator": {"kind": "time-discretized",
                             "steps": 2, "inner": {"kind": "zero",
                             "x": 1}}})"), "x"));
}

TEST_CASE("model kinds parse to the matching measures") {
  const auto merton = parse_config(
      R"({"model": {"kind": "merton", "lambda": 1, "mu": 0, "sigma": 1}})");
  CHECK(merton.model.kind == LevyModel::Kind::MERTON);
  CHECK(merton.model.finite_activity());

  const auto stable = parse_config(
      R"({"model": {"kind": "stable-like", "cp": 1, "cm": 0.5, "alpha": 0.8,
          "lam_pos": 3, "lam_neg": 2}})");
  CHECK(stable.model.kind == LevyModel::Kind::STABLE_LIKE);
  CHECK(bg_index(stable.model) == 0.8);

  const auto harm = parse_config(R"({"model": {"kind": "atomic-harmonic"}})");
  CHECK(harm.model.kind == LevyModel::Kind::ATOMIC);
  CHECK(harm.model.rule == AtomicRule::HARMONIC);

  const auto logh =
      parse_config(R"({"model": {"kind": "atomic-logharmonic"}})");
  CHECK(logh.model.rule == AtomicRule::LOGHARMONIC);

  const std::string unknown = error_of(R"({"model": {"kind": "vg"}})");
  CHECK(mentions(unknown, "vg"));
  CHECK(mentions(unknown, "cgmy"));

  // Parameter-range failures surface as configuration errors, not aborts.
  CHECK(mentions(error_of(R"({"model": {"kind": "cgmy", "C": 1, "G": 5,
                             "M": 5, "Y": 2.5}})"), "Y<2"));
  CHECK(mentions(error_of(R"({"model": {"kind": "merton", "lambda": 0,
                             "mu": 0, "sigma": 1}})"), "lambda"));
  CHECK(mentions(error_of(R"({"model": {"kind": "stable-like", "cp": 1,
                             "cm": 1, "alpha": 2, "lam_pos": 1,
                             "lam_neg": 1}})"), "alpha"));
}

TEST_CASE("structural type errors name the offending key") {
  CHECK(mentions(error_of(R"({"paths": -3})"), "paths"));
  CHECK(mentions(error_of(R"({"paths": 1.5})"), "paths"));
  CHECK(mentions(error_of(R"({"seed": -1})"), "seed"));
  CHECK(mentions(error_of(R"({"T": "1"})"), "T"));
  CHECK(mentions(error_of(R"({"levels": [4, 0]})"), "levels"));
  CHECK(mentions(error_of(R"({"levels": 4})"), "levels"));
  CHECK(mentions(error_of(R"({"bootstrap": -1})"), "bootstrap"));
  CHECK(mentions(error_of(R"({"terminal": {"kind": "clip-abs"}})"), "cap"));
  CHECK(mentions(error_of(R"({"terminal": {"kind": "clip-abs", "cap": -1}})"),
                 "cap"));
  CHECK(mentions(error_of("[1, 2]"), "object"));
  CHECK(mentions(error_of("{"), "JSON"));
  CHECK_THROWS_AS((void)load_config("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("generator specifications rebuild the declared drivers") {
  const auto lin = parse_config(
      R"({"generator": {"kind": "linear", "a": 0.5, "b": 1}})");
  CHECK(lin.generator.kind == GeneratorSpec::Kind::LINEAR);
  CHECK(lin.generator.a == 0.5);
  CHECK(lin.generator.b == 1.0);

  const auto integral = parse_config(
      R"({"generator": {"kind": "integral", "cy": 0.2, "cz": 0.3,
          "ctilde": 1.0, "beta_bar": 3.0}})");
  CHECK(integral.generator.kind == GeneratorSpec::Kind::INTEGRAL);
  CHECK(integral.generator.phi_cy == 0.2);
  CHECK(integral.generator.phi_cz == 0.3);
  CHECK(integral.generator.beta_bar == 3.0);

  const auto ramp = parse_config(
      R"({"generator": {"kind": "ramp", "slope": 0.25}})");
  CHECK(ramp.generator.kind == GeneratorSpec::Kind::CUSTOM);
  CHECK(ramp.generator.custom_kind == "ramp");
  GeneratorContext ctx;
  const auto noU = [](double) { return 0.0; };
  CHECK(evaluate_generator(ramp.generator, ctx, 0.8, 7.0, noU) ==
        doctest::Approx(0.2).epsilon(1e-12));

  // A hand-built callback without a declarative form cannot be serialized.
  ExperimentConfig cfg;
  cfg.generator = GeneratorSpec::custom_fn(
      [](double, double y, const std::function<double(double)>&) { return y; },
      1.0, 1.0, true, "opaque");
  CHECK_THROWS_AS((void)config_to_json(cfg), ConfigError);

  const std::string unknown =
      error_of(R"({"generator": {"kind": "quadratic"}})");
  CHECK(mentions(unknown, "quadratic"));
  CHECK(mentions(unknown, "time-discretized"));
}

TEST_CASE("terminal specifications evaluate as declared") {
  TerminalSpec ident;
  ident.kind = TerminalSpec::Kind::IDENTITY;
  CHECK(ident.fn()(1.7) == 1.7);
  CHECK(ident.lipschitz() == 1.0);

  const auto clip = parse_config(
      R"({"terminal": {"kind": "clip-abs", "cap": 1.5, "shift": 0.3}})");
  CHECK(clip.terminal.fn()(0.3) == 0.0);
  CHECK(clip.terminal.fn()(-3.0) == 1.5);
  CHECK(clip.terminal.fn()(1.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(clip.terminal.lipschitz() == 1.0);

  const auto lin = parse_config(
      R"({"terminal": {"kind": "linear", "a": -2, "b": 1}})");
  CHECK(lin.terminal.fn()(2.0) == -3.0);
  CHECK(lin.terminal.lipschitz() == 2.0);
}

TEST_CASE("config hashes separate distinct experiments") {
  const auto a = parse_config(R"({"seed": 1})");
  const auto b = parse_config(R"({"seed": 2})");
  const auto a2 = parse_config(R"({"seed": 1})");
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(a2));
  const std::string hex = hash_hex(config_hash(a));
  CHECK(hex.size() == 16);
  CHECK(hex.find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("report serializations carry the pinned columns") {
  RateReport rep;
  rep.theory_slope = -0.625;
  rep.beta = 0.75;
  rep.paths = 100;
  rep.fit.slope = -0.7;
  rep.note = "demo";
  rep.levels.push_back({2, 0.5, 0.01, 0.9, 0, ""});
  rep.levels.push_back({4, 0.33, 0.008, 0.58, 0, ""});
  const std::string csv = rate_report_csv(rep, "rate-process", 0xabcdefULL, 9);
  CHECK(mentions(csv, "n,error,se,bound,theory_slope\n"));
  CHECK(mentions(csv, "# config_hash=0000000000abcdef"));
  CHECK(mentions(csv, "# seed=9"));
  CHECK(mentions(csv, "# fit_slope=-0.69999999999999996"));
  CHECK(mentions(csv, "2,0.5,0.01,0.90000000000000002,-0.625"));
  CHECK(mentions(csv, "# note=demo"));
  // Every comment line is '#'-prefixed and precedes the column header.
  CHECK(csv.find('#') == 0);
  CHECK(csv.rfind("#") < csv.find("n,error"));

  RateReport gap = rep;
  gap.levels[0].gap_term = 0.3;
  gap.levels[0].dominant = "gap";
  gap.levels[1].gap_term = 0.2;
  gap.levels[1].dominant = "process";
  const std::string gcsv = rate_report_csv(gap, "rate-gap", 1, 2);
  CHECK(mentions(gcsv, "n,error,se,bound,theory_slope,gap_term,dominant\n"));
  CHECK(mentions(gcsv, "2,0.5,0.01,0.90000000000000002,-0.625,0.29999999999999999,gap"));

  LowerBoundReport lb;
  lb.n = 8; lb.lower = 0.25; lb.coupled_upper = 0.5; lb.c_T = 1;
  lb.m2_half = 0.0625; lb.upper_se = 0.003; lb.ordered = true;
  const std::string lcsv = lower_bound_csv({lb}, 3, 4);
  CHECK(mentions(lcsv, "n,lower,upper,c_T,m2_half,upper_se,ordered\n"));
  CHECK(mentions(lcsv, "8,0.25,0.5,1,0.0625,0.0030000000000000001,1"));

  AnalyzeRow row;
  row.eps = 0.5;
  row.tail_mass = 2.0;
  row.m1 = Moment::finite(0.25);
  row.m2 = Moment::finite(0.125);
  row.m_beta = Moment::inf();
  const std::string acsv = analyze_csv({row}, 0.75, 2.5, 5, 6);
  CHECK(mentions(acsv, "eps,tail_mass,m1,m2,m_beta,c_beta\n"));
  CHECK(mentions(acsv, "0.5,2,0.25,0.125,inf,2.5"));

  // The SVG front end stays self-contained: no external references.
  const std::string svg = svg_rate_plot(rep, "demo");
  CHECK(mentions(svg, "<svg"));
  CHECK(mentions(svg, "log2 n"));
  CHECK(mentions(svg, "-0.70"));
  const bool only_ns_uri = !mentions(svg, "http://") ||
      svg.find("http://") == svg.find("http://www.w3.org/2000/svg");
  CHECK(only_ns_uri);
  CHECK(!mentions(svg, "href"));
}
