#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levybsde/bsde_grid.hpp"
#include "levybsde/generators.hpp"
#include "levybsde/levy_models.hpp"

namespace levybsde {

// Declarative terminal condition, so configs can round-trip. `fn()` builds
// the callable; `lipschitz()` the declared bound handed to the solvers.
struct TerminalSpec {
  enum class Kind { IDENTITY, CLIP_ABS, LINEAR };
  Kind kind = Kind::CLIP_ABS;
  double cap = 2.0;    // CLIP_ABS: g(x) = min(|x - shift|, cap)
  double shift = 0.0;
  double a = 1.0;      // LINEAR: g(x) = a*x + b
  double b = 0.0;

  std::function<double(double)> fn() const;
  double lipschitz() const;
};

// One experiment description: a single JSON document with a `kind`
// discriminator per model/generator.  Every subcommand reads the fields it
// needs and leaves the rest at their defaults; unknown keys anywhere in the
// document are hard errors.  Numeric preconditions specific to a subcommand
// are enforced by the operation it dispatches to.
struct ExperimentConfig {
  bool has_model = false;  // "model" has no safe default; commands that
                           // need one reject configs without it
  LevyModel model = LevyModel::cgmy(1, 5, 5, 0.5);

  std::vector<double> levels{2, 4, 8, 16, 32, 64};
  std::size_t paths = 10000;
  double T = 1.0;
  double beta = 0.0;       // <= 0 selects the automatic moment order
  double eps_ref = 1e-4;
  std::uint64_t seed = 1;
  int bootstrap = 200;

  // Backward-equation settings ("solver" object).
  GridSpec solver;
  int basis_degree = 4;    // regression solver's polynomial basis degree

  GeneratorSpec generator = GeneratorSpec::zero();
  TerminalSpec terminal;

  double n_ref = 256;      // reference cutoff for backward-equation rates
  int u_quad_nodes = 128;  // jump-measure quadrature size for the U norm

  int n_max = 1000;        // boundary: largest bracket index checked
  double k_n = 1000;       // appendix: Bernoulli grid resolution

  std::vector<double> radii;  // analyze sweep; empty = {1/n : n in levels}

  std::string out;         // output directory; empty = current directory
};

// Parses a JSON document.  Throws ConfigError on malformed JSON, unknown
// keys, wrong types, or values outside their structural ranges.
ExperimentConfig parse_config(const std::string& json_text);

// Reads the file and parses it; file errors also map to ConfigError.
ExperimentConfig load_config(const std::string& path);

// Canonical serialized form: every field emitted (defaults made explicit,
// "model" only when present), fixed key order, two-space indent.  Parsing
// the result reproduces the config exactly.
std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization, with the output directory
// blanked: the hash identifies the experiment, not where its reports land.
// Embedded in every CSV header.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Fixed-width lowercase hex (16 digits) used to print hashes.
std::string hash_hex(std::uint64_t h);

}  // namespace levybsde
