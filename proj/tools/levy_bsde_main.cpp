// Command-line front end: parses one JSON experiment config, dispatches to
// the requested operation, and writes deterministic CSV (and optional SVG)
// reports.  Exit codes: 0 success, 1 a report-internal assertion failed
// (e.g. a bound violated by the measured errors), 2 configuration error.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levybsde/bsde_grid.hpp"
#include "levybsde/config.hpp"
#include "levybsde/csv_out.hpp"
#include "levybsde/errors.hpp"
#include "levybsde/levy_measures.hpp"
#include "levybsde/rates.hpp"
#include "levybsde/svg_plot.hpp"

namespace {

using namespace levybsde;

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool plot = false;
  bool verify = false;
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment config");
  cmd->add_option("--seed", args.seed, "master seed (overrides the config)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out_dir,
                  "output directory (overrides the config)");
  cmd->add_flag("--plot", args.plot, "also write an SVG log-log plot");
  cmd->add_flag("--verify", args.verify,
                "re-read each written CSV and check its embedded config hash");
}

ExperimentConfig effective_config(const CliArgs& args) {
  ExperimentConfig cfg =
      args.config_path.empty() ? ExperimentConfig{} : load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out_dir.empty()) cfg.out = args.out_dir;
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory \"" +
                            dir.string() + "\": " + ec.message());
  return (dir / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
  out << content;
  if (!out) throw ConfigError("failed writing \"" + path + "\"");
}

// --verify support: the hash is recomputed from the effective config and
// compared against the one embedded in the file on disk.
bool verify_written_hash(const std::string& path, std::uint64_t expect) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  const std::string key = "# config_hash=";
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0)
      return line.substr(key.size()) == hash_hex(expect);
    if (!line.empty() && line[0] != '#') break;
  }
  return false;
}

struct Emitter {
  const ExperimentConfig& cfg;
  const CliArgs& args;
  std::uint64_t hash;
  bool verify_failed = false;

  void csv(const std::string& name, const std::string& content) {
    const std::string path = out_path(cfg, name);
    write_file(path, content);
    std::cout << "wrote " << path << "\n";
    if (args.verify && !verify_written_hash(path, hash)) {
      std::cerr << "verify: config hash mismatch in " << path << "\n";
      verify_failed = true;
    }
  }
  void svg(const std::string& name, const std::string& content) {
    if (!args.plot) return;
    const std::string path = out_path(cfg, name);
    write_file(path, content);
    std::cout << "wrote " << path << "\n";
  }
};

const LevyModel& require_model(const ExperimentConfig& cfg) {
  if (!cfg.has_model)
    throw ConfigError("config: this command needs a \"model\" entry");
  return cfg.model;
}

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

void print_rate_summary(const std::string& what, const RateReport& rep) {
  std::cout << what << ": fit slope " << fmt(rep.fit.slope) << " (CI ["
            << fmt(rep.fit.ci_lo) << ", " << fmt(rep.fit.ci_hi)
            << "]), theory slope " << fmt(rep.theory_slope) << ", beta "
            << fmt(rep.beta) << "\n";
  if (!rep.note.empty()) std::cout << what << ": " << rep.note << "\n";
}

int cmd_models() {
  std::printf("%-20s %-24s %s\n", "model", "activity index", "parameters");
  std::printf("%-20s %-24s %s\n", "cgmy", "beta_star = max(0, Y)",
              "C>0, G>0, M>0, Y<2; density C e^{-G|x|} or e^{-M x} times "
              "|x|^{-1-Y}");
  std::printf("%-20s %-24s %s\n", "merton", "beta_star = 0",
              "lambda>0, sigma>0; jump law lambda * N(mu, sigma^2)");
  std::printf("%-20s %-24s %s\n", "stable-like", "beta_star = alpha",
              "cp,cm>=0 not both 0, alpha in [0,2), tempering lam_pos/lam_neg"
              ">0 on active sides");
  std::printf("%-20s %-24s %s\n", "atomic-harmonic", "beta_star = 1",
              "atoms 1/i with unit weights, i>=1");
  std::printf("%-20s %-24s %s\n", "atomic-logharmonic", "beta_star = 1",
              "atoms sqrt(ln i)/i with unit weights, i>=2");
  return 0;
}

int cmd_analyze(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  const LevyModel& model = require_model(cfg);
  const double beta = resolve_moment_order(model, cfg.beta);
  const double cb = c_beta(model, beta);
  std::vector<double> radii = cfg.radii;
  if (radii.empty())
    for (double n : cfg.levels) radii.push_back(1.0 / n);
  std::vector<AnalyzeRow> rows;
  for (double eps : radii) {
    if (!(eps > 0)) throw ConfigError("analyze: radii must be positive");
    AnalyzeRow r;
    r.eps = eps;
    r.tail_mass = tail_mass(model, eps);
    r.m1 = partial_moment(model, 1, eps);
    r.m2 = partial_moment(model, 2, eps);
    r.m_beta = partial_moment(model, beta, eps);
    rows.push_back(r);
  }
  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("analyze.csv", analyze_csv(rows, beta, cb, em.hash, cfg.seed));
  std::cout << "analyze: " << rows.size() << " radii, beta " << fmt(beta)
            << ", c_beta " << fmt(cb) << "\n";
  return em.verify_failed ? 1 : 0;
}

int cmd_rate_process(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  ProcessRateSpec spec;
  spec.model = require_model(cfg);
  spec.levels = cfg.levels;
  spec.eps_ref = cfg.eps_ref;
  spec.paths = cfg.paths;
  spec.T = cfg.T;
  spec.beta = cfg.beta;
  spec.seed = cfg.seed;
  spec.bootstrap = cfg.bootstrap;
  const RateReport rep = run_process_rate(spec);

  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("rate-process.csv",
         rate_report_csv(rep, "rate-process", em.hash, cfg.seed));
  em.svg("rate-process.svg",
         svg_rate_plot(rep, "strong error vs cutoff level, slope " +
                                fmt(rep.theory_slope) + " expected"));
  print_rate_summary("rate-process", rep);

  int violations = 0;
  for (const auto& lv : rep.levels)
    if (lv.error > lv.bound + 3 * lv.se + rep.reference_bias_bound) {
      std::cerr << "rate-process: level " << fmt(lv.n)
                << " violates the bound: error " << fmt(lv.error) << " > "
                << fmt(lv.bound) << " + 3*" << fmt(lv.se) << " + "
                << fmt(rep.reference_bias_bound) << "\n";
      ++violations;
    }
  if (violations) return 1;
  return em.verify_failed ? 1 : 0;
}

int cmd_rate_bsde(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  BsdeRateSpec spec;
  spec.problem.model = require_model(cfg);
  spec.problem.T = cfg.T;
  spec.problem.generator = cfg.generator;
  spec.problem.terminal = cfg.terminal.fn();
  spec.problem.terminal_lipschitz = cfg.terminal.lipschitz();
  spec.grid = cfg.solver;
  spec.levels = cfg.levels;
  spec.n_ref = cfg.n_ref;
  spec.paths = cfg.paths;
  spec.u_quad_nodes = cfg.u_quad_nodes;
  spec.beta = cfg.beta;
  spec.seed = cfg.seed;
  spec.bootstrap = cfg.bootstrap;
  const BsdeRateReport rep = run_bsde_rate(spec);

  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("rate-bsde-y.csv",
         rate_report_csv(rep.y, "rate-bsde-y", em.hash, cfg.seed));
  em.csv("rate-bsde-u.csv",
         rate_report_csv(rep.u, "rate-bsde-u", em.hash, cfg.seed));
  em.svg("rate-bsde-y.svg",
         svg_rate_plot(rep.y, "value-function error vs cutoff level"));
  em.svg("rate-bsde-u.svg",
         svg_rate_plot(rep.u, "jump-increment error vs cutoff level"));
  print_rate_summary("rate-bsde Y", rep.y);
  print_rate_summary("rate-bsde U", rep.u);
  std::cout << "rate-bsde: grid-refinement delta " << fmt(rep.refine_delta)
            << "\n";
  return em.verify_failed ? 1 : 0;
}

int cmd_rate_gap(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  GapRateSpec spec;
  spec.model = require_model(cfg);
  spec.driver = cfg.generator;
  spec.terminal = cfg.terminal.fn();
  spec.terminal_lipschitz = cfg.terminal.lipschitz();
  spec.grid = cfg.solver;
  spec.levels = cfg.levels;
  spec.n_ref = cfg.n_ref;
  spec.paths = cfg.paths;
  spec.T = cfg.T;
  spec.beta = cfg.beta;
  spec.seed = cfg.seed;
  spec.bootstrap = cfg.bootstrap;
  const RateReport rep = run_generator_gap_rate(spec);

  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("rate-gap.csv", rate_report_csv(rep, "rate-gap", em.hash, cfg.seed));
  em.svg("rate-gap.svg",
         svg_rate_plot(rep, "driver-approximation error vs cutoff level"));
  print_rate_summary("rate-gap", rep);
  std::cout << "rate-gap: two-term curve fitted slope "
            << fmt(rep.bound_fit.slope) << "\n";
  return em.verify_failed ? 1 : 0;
}

int cmd_wasserstein(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  const LevyModel& model = require_model(cfg);
  std::vector<LowerBoundReport> rows;
  for (double n : cfg.levels) {
    WassersteinSpec spec;
    spec.model = model;
    spec.n = n;
    spec.eps_ref = cfg.eps_ref;
    spec.paths = cfg.paths;
    spec.T = cfg.T;
    spec.seed = cfg.seed;
    rows.push_back(wasserstein_bounds(spec));
  }
  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("wasserstein.csv", lower_bound_csv(rows, em.hash, cfg.seed));
  em.svg("wasserstein.svg",
         svg_bracket_plot(rows, "distance brackets vs cutoff level"));

  int violations = 0;
  for (const auto& r : rows) {
    std::cout << "wasserstein: n " << fmt(r.n) << " lower " << fmt(r.lower)
              << " upper " << fmt(r.coupled_upper) << " c_T " << fmt(r.c_T)
              << (r.ordered ? "" : "  [ORDERING VIOLATED]") << "\n";
    if (!r.ordered) ++violations;
  }
  if (violations) return 1;
  return em.verify_failed ? 1 : 0;
}

int cmd_boundary(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  const BoundaryReport rep = check_bg_boundary_examples(cfg.n_max);
  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("boundary.csv", boundary_csv(rep, em.hash, cfg.seed));
  std::cout << "boundary: " << rep.rows.size() << " brackets, "
            << rep.failures << " outside their envelope\n";
  for (const auto& r : rep.rows)
    if (!r.pass)
      std::cout << "boundary: "
                << (r.rule == AtomicRule::HARMONIC ? "harmonic" : "logharmonic")
                << " n " << fmt(r.n) << " value " << fmt(r.value)
                << " outside [" << fmt(r.lo) << ", " << fmt(r.hi) << "]\n";
  if (!rep.all_pass) return 1;
  return em.verify_failed ? 1 : 0;
}

int cmd_appendix(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  const MeanSE est =
      appendix_random_walk_gap(cfg.T, cfg.k_n, cfg.paths, cfg.seed);
  AppendixRow row;
  row.T = cfg.T;
  row.k_n = cfg.k_n;
  row.paths = cfg.paths;
  row.estimate = est.mean;
  row.se = est.se;
  row.floor = 0.5 * (1.0 - std::exp(-cfg.T));
  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("appendix.csv", appendix_csv({row}, em.hash, cfg.seed));
  std::cout << "appendix: estimate " << fmt(row.estimate) << " (se "
            << fmt(row.se) << "), floor " << fmt(row.floor) << ", k_n "
            << fmt(row.k_n) << "\n";
  if (!(row.estimate >= row.floor - 3 * row.se)) {
    std::cerr << "appendix: estimate fell below the half-jump floor\n";
    return 1;
  }
  return em.verify_failed ? 1 : 0;
}

int cmd_solve(const CliArgs& args) {
  const ExperimentConfig cfg = effective_config(args);
  BSDEProblem problem;
  problem.model = require_model(cfg);
  problem.eps = cfg.eps_ref;
  problem.T = cfg.T;
  problem.generator = cfg.generator;
  problem.terminal = cfg.terminal.fn();
  problem.terminal_lipschitz = cfg.terminal.lipschitz();
  const GridSolution sol = solve_markovian_grid(problem, cfg.solver);
  Emitter em{cfg, args, config_hash(cfg)};
  em.csv("solution.csv", solution_csv(sol, em.hash, cfg.seed));
  std::cout << "solve: u(0, " << fmt(cfg.solver.x0) << ") = "
            << fmt(sol.value_at(0, cfg.solver.x0)) << ", lambda "
            << fmt(sol.lambda) << ", box half-width " << fmt(sol.q) << "\n";
  if (!sol.warning.empty()) std::cout << "solve: warning: " << sol.warning << "\n";
  return em.verify_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compound-Poisson approximation of pure-jump processes and "
               "their backward equations: convergence-rate experiments"};
  app.require_subcommand(1);
  CliArgs args;

  CLI::App* models = app.add_subcommand(
      "models", "list built-in jump measures and their activity indices");
  CLI::App* analyze = app.add_subcommand(
      "analyze", "tabulate tail mass, partial moments, and the rate constant "
                 "across a radius sweep");
  CLI::App* rate_process = app.add_subcommand(
      "rate-process", "strong pathwise error of the jump-truncated process "
                      "across cutoff levels");
  CLI::App* rate_bsde = app.add_subcommand(
      "rate-bsde", "backward-equation value and jump-increment errors across "
                   "cutoff levels");
  CLI::App* rate_gap = app.add_subcommand(
      "rate-gap", "driver-approximation error with its two-term bound");
  CLI::App* wasserstein = app.add_subcommand(
      "wasserstein", "analytic lower vs coupled upper distance bound per level");
  CLI::App* boundary = app.add_subcommand(
      "boundary", "closed-form small-ball brackets for the atomic rules");
  CLI::App* appendix = app.add_subcommand(
      "appendix", "random-walk coupling gap of the Poisson path");
  CLI::App* solve = app.add_subcommand(
      "solve", "solve one backward equation at the reference radius and dump "
               "the value function");
  for (CLI::App* cmd : {analyze, rate_process, rate_bsde, rate_gap,
                        wasserstein, boundary, appendix, solve})
    add_common_flags(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (models->parsed()) return cmd_models();
    if (analyze->parsed()) return cmd_analyze(args);
    if (rate_process->parsed()) return cmd_rate_process(args);
    if (rate_bsde->parsed()) return cmd_rate_bsde(args);
    if (rate_gap->parsed()) return cmd_rate_gap(args);
    if (wasserstein->parsed()) return cmd_wasserstein(args);
    if (boundary->parsed()) return cmd_boundary(args);
    if (appendix->parsed()) return cmd_appendix(args);
    if (solve->parsed()) return cmd_solve(args);
  } catch (const levybsde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
