#include "levybsde/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "levybsde/errors.hpp"
#include "levybsde/rng.hpp"

namespace levybsde {

std::function<double(double)> TerminalSpec::fn() const {
  switch (kind) {
    case Kind::IDENTITY:
      return [](double x) { return x; };
    case Kind::CLIP_ABS: {
      const double c = cap, s = shift;
      return [c, s](double x) { return std::min(std::abs(x - s), c); };
    }
    case Kind::LINEAR: {
      const double aa = a, bb = b;
      return [aa, bb](double x) { return aa * x + bb; };
    }
  }
  return [](double) { return 0.0; };
}

double TerminalSpec::lipschitz() const {
  switch (kind) {
    case Kind::IDENTITY: return 1.0;
    case Kind::CLIP_ABS: return 1.0;
    case Kind::LINEAR: return std::abs(a);
  }
  return 0.0;
}

namespace {

using njson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
  throw ConfigError("config: " + msg);
}

void require_object(const njson& j, const std::string& where) {
  if (!j.is_object()) fail("\"" + where + "\" must be an object");
}

void check_keys(const njson& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) fail("unknown key \"" + it.key() + "\" in " + where);
  }
}

double as_finite_number(const njson& v, const std::string& where,
                        const std::string& key) {
  if (!v.is_number()) fail("\"" + key + "\" in " + where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("\"" + key + "\" in " + where + " must be finite");
  return x;
}

double get_num(const njson& obj, const std::string& where, const char* key,
               double dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  return as_finite_number(*it, where, key);
}

double require_num(const njson& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + " is missing required key \"" + key + "\"");
  return as_finite_number(*it, where, key);
}

std::int64_t as_integer(const njson& v, const std::string& where,
                        const std::string& key) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      fail("\"" + key + "\" in " + where + " is too large");
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) return v.get<std::int64_t>();
  fail("\"" + key + "\" in " + where + " must be an integer");
}

int get_int(const njson& obj, const std::string& where, const char* key,
            int dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  const std::int64_t v = as_integer(*it, where, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    fail("\"" + std::string(key) + "\" in " + where + " is out of range");
  return static_cast<int>(v);
}

int require_int(const njson& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + " is missing required key \"" + key + "\"");
  const std::int64_t v = as_integer(*it, where, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    fail("\"" + std::string(key) + "\" in " + where + " is out of range");
  return static_cast<int>(v);
}

std::uint64_t get_u64(const njson& obj, const std::string& where,
                      const char* key, std::uint64_t dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    const auto v = it->get<std::int64_t>();
    if (v < 0) fail("\"" + std::string(key) + "\" in " + where +
                    " must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  fail("\"" + std::string(key) + "\" in " + where +
       " must be a non-negative integer");
}

std::string require_str(const njson& obj, const std::string& where,
                        const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + " is missing required key \"" + key + "\"");
  if (!it->is_string()) fail("\"" + std::string(key) + "\" in " + where +
                             " must be a string");
  return it->get<std::string>();
}

std::vector<double> get_positive_array(const njson& obj, const std::string& where,
                                       const char* key,
                                       std::vector<double> dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_array()) fail("\"" + std::string(key) + "\" in " + where +
                            " must be an array of numbers");
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    const double x = as_finite_number(v, where, key);
    if (!(x > 0)) fail("entries of \"" + std::string(key) + "\" in " + where +
                       " must be positive");
    out.push_back(x);
  }
  return out;
}

LevyModel parse_model(const njson& j) {
  require_object(j, "model");
  const std::string kind = require_str(j, "model", "kind");
  try {
    if (kind == "cgmy") {
      check_keys(j, "model", {"kind", "C", "G", "M", "Y"});
      return LevyModel::cgmy(require_num(j, "model", "C"),
                             require_num(j, "model", "G"),
                             require_num(j, "model", "M"),
                             require_num(j, "model", "Y"));
    }
    if (kind == "merton") {
      check_keys(j, "model", {"kind", "lambda", "mu", "sigma"});
      return LevyModel::merton(require_num(j, "model", "lambda"),
                               require_num(j, "model", "mu"),
                               require_num(j, "model", "sigma"));
    }
    if (kind == "stable-like") {
      check_keys(j, "model", {"kind", "cp", "cm", "alpha", "lam_pos", "lam_neg"});
      return LevyModel::stable_like(require_num(j, "model", "cp"),
                                    require_num(j, "model", "cm"),
                                    require_num(j, "model", "alpha"),
                                    require_num(j, "model", "lam_pos"),
                                    require_num(j, "model", "lam_neg"));
    }
    if (kind == "atomic-harmonic") {
      check_keys(j, "model", {"kind"});
      return LevyModel::atomic(AtomicRule::HARMONIC);
    }
    if (kind == "atomic-logharmonic") {
      check_keys(j, "model", {"kind"});
      return LevyModel::atomic(AtomicRule::LOGHARMONIC);
    }
  } catch (const std::domain_error& e) {
    fail(std::string("model: ") + e.what());
  }
  fail("model: unknown kind \"" + kind +
       "\" (expected cgmy, merton, stable-like, atomic-harmonic, or "
       "atomic-logharmonic)");
}

GeneratorSpec parse_generator(const njson& j, int depth) {
  require_object(j, "generator");
  if (depth > 4) fail("generator: nesting too deep");
  const std::string kind = require_str(j, "generator", "kind");
  try {
    if (kind == "zero") {
      check_keys(j, "generator", {"kind"});
      return GeneratorSpec::zero();
    }
    if (kind == "linear") {
      check_keys(j, "generator", {"kind", "a", "b"});
      return GeneratorSpec::linear(require_num(j, "generator", "a"),
                                   require_num(j, "generator", "b"));
    }
    if (kind == "integral") {
      check_keys(j, "generator", {"kind", "cy", "cz", "ctilde", "beta_bar"});
      return GeneratorSpec::integral_linear_yz(
          require_num(j, "generator", "cy"), require_num(j, "generator", "cz"),
          require_num(j, "generator", "ctilde"),
          require_num(j, "generator", "beta_bar"));
    }
    if (kind == "time-discretized") {
      check_keys(j, "generator", {"kind", "steps", "inner"});
      const int steps = require_int(j, "generator", "steps");
      auto it = j.find("inner");
      if (it == j.end()) fail("generator is missing required key \"inner\"");
      return GeneratorSpec::time_discretized(parse_generator(*it, depth + 1),
                                             steps);
    }
    if (kind == "hoelder") {
      check_keys(j, "generator", {"kind", "amplitude", "alpha", "terms"});
      return GeneratorSpec::hoelder(require_num(j, "generator", "amplitude"),
                                    require_num(j, "generator", "alpha"),
                                    require_int(j, "generator", "terms"));
    }
    if (kind == "ramp") {
      check_keys(j, "generator", {"kind", "slope"});
      return GeneratorSpec::ramp(require_num(j, "generator", "slope"));
    }
  } catch (const std::domain_error& e) {
    fail(std::string("generator: ") + e.what());
  }
  fail("generator: unknown kind \"" + kind +
       "\" (expected zero, linear, integral, time-discretized, hoelder, or "
       "ramp)");
}

TerminalSpec parse_terminal(const njson& j) {
  require_object(j, "terminal");
  const std::string kind = require_str(j, "terminal", "kind");
  TerminalSpec t;
  if (kind == "identity") {
    check_keys(j, "terminal", {"kind"});
    t.kind = TerminalSpec::Kind::IDENTITY;
    return t;
  }
  if (kind == "clip-abs") {
    check_keys(j, "terminal", {"kind", "cap", "shift"});
    t.kind = TerminalSpec::Kind::CLIP_ABS;
    t.cap = require_num(j, "terminal", "cap");
    t.shift = get_num(j, "terminal", "shift", 0.0);
    if (!(t.cap > 0)) fail("terminal: \"cap\" must be positive");
    return t;
  }
  if (kind == "linear") {
    check_keys(j, "terminal", {"kind", "a", "b"});
    t.kind = TerminalSpec::Kind::LINEAR;
    t.a = require_num(j, "terminal", "a");
    t.b = require_num(j, "terminal", "b");
    return t;
  }
  fail("terminal: unknown kind \"" + kind +
       "\" (expected identity, clip-abs, or linear)");
}

njson model_json(const LevyModel& m) {
  njson j;
  switch (m.kind) {
    case LevyModel::Kind::CGMY:
      j["kind"] = "cgmy";
      j["C"] = m.C; j["G"] = m.G; j["M"] = m.M; j["Y"] = m.Y;
      break;
    case LevyModel::Kind::MERTON:
      j["kind"] = "merton";
      j["lambda"] = m.lambda; j["mu"] = m.mu; j["sigma"] = m.sigma;
      break;
    case LevyModel::Kind::STABLE_LIKE:
      j["kind"] = "stable-like";
      j["cp"] = m.cp; j["cm"] = m.cm; j["alpha"] = m.alpha;
      j["lam_pos"] = m.lam_pos; j["lam_neg"] = m.lam_neg;
      break;
    case LevyModel::Kind::ATOMIC:
      j["kind"] = m.rule == AtomicRule::HARMONIC ? "atomic-harmonic"
                                                 : "atomic-logharmonic";
      break;
  }
  return j;
}

njson generator_json(const GeneratorSpec& g) {
  njson j;
  switch (g.kind) {
    case GeneratorSpec::Kind::ZERO:
      j["kind"] = "zero";
      break;
    case GeneratorSpec::Kind::LINEAR:
      j["kind"] = "linear";
      j["a"] = g.a; j["b"] = g.b;
      break;
    case GeneratorSpec::Kind::INTEGRAL:
      j["kind"] = "integral";
      j["cy"] = g.phi_cy; j["cz"] = g.phi_cz; j["ctilde"] = g.phi_ctilde;
      j["beta_bar"] = g.beta_bar;
      break;
    case GeneratorSpec::Kind::TIME_DISCRETIZED:
      j["kind"] = "time-discretized";
      j["steps"] = g.steps;
      j["inner"] = generator_json(*g.inner);
      break;
    case GeneratorSpec::Kind::CUSTOM:
      if (g.custom_kind == "hoelder") {
        j["kind"] = "hoelder";
        j["amplitude"] = g.c1; j["alpha"] = g.c2; j["terms"] = g.c3;
      } else if (g.custom_kind == "ramp") {
        j["kind"] = "ramp";
        j["slope"] = g.c1;
      } else {
        throw ConfigError("config: generator \"" + g.name +
                          "\" has no serialized form");
      }
      break;
  }
  return j;
}

njson terminal_json(const TerminalSpec& t) {
  njson j;
  switch (t.kind) {
    case TerminalSpec::Kind::IDENTITY:
      j["kind"] = "identity";
      break;
    case TerminalSpec::Kind::CLIP_ABS:
      j["kind"] = "clip-abs";
      j["cap"] = t.cap; j["shift"] = t.shift;
      break;
    case TerminalSpec::Kind::LINEAR:
      j["kind"] = "linear";
      j["a"] = t.a; j["b"] = t.b;
      break;
  }
  return j;
}

ExperimentConfig parse_document(const njson& doc) {
  if (!doc.is_object()) fail("top-level document must be a JSON object");
  check_keys(doc, "the top-level document",
             {"model", "levels", "paths", "T", "beta", "eps_ref", "seed",
              "bootstrap", "solver", "generator", "terminal", "n_ref",
              "u_quad_nodes", "n_max", "k_n", "radii", "out"});

  ExperimentConfig cfg;
  if (auto it = doc.find("model"); it != doc.end()) {
    cfg.model = parse_model(*it);
    cfg.has_model = true;
  }
  cfg.levels = get_positive_array(doc, "the top-level document", "levels",
                                  cfg.levels);
  cfg.paths = static_cast<std::size_t>(
      get_u64(doc, "the top-level document", "paths", cfg.paths));
  cfg.T = get_num(doc, "the top-level document", "T", cfg.T);
  cfg.beta = get_num(doc, "the top-level document", "beta", cfg.beta);
  cfg.eps_ref = get_num(doc, "the top-level document", "eps_ref", cfg.eps_ref);
  cfg.seed = get_u64(doc, "the top-level document", "seed", cfg.seed);
  cfg.bootstrap = get_int(doc, "the top-level document", "bootstrap",
                          cfg.bootstrap);
  if (cfg.bootstrap < 0) fail("\"bootstrap\" must be non-negative");

  if (auto it = doc.find("solver"); it != doc.end()) {
    require_object(*it, "solver");
    check_keys(*it, "solver",
               {"time_steps", "space_nodes", "quad_nodes", "x0", "q",
                "calibration_paths", "basis_degree"});
    cfg.solver.time_steps = get_int(*it, "solver", "time_steps",
                                    cfg.solver.time_steps);
    cfg.solver.space_nodes = get_int(*it, "solver", "space_nodes",
                                     cfg.solver.space_nodes);
    cfg.solver.quad_nodes = get_int(*it, "solver", "quad_nodes",
                                    cfg.solver.quad_nodes);
    cfg.solver.x0 = get_num(*it, "solver", "x0", cfg.solver.x0);
    cfg.solver.q = get_num(*it, "solver", "q", cfg.solver.q);
    cfg.solver.calibration_paths = static_cast<std::size_t>(
        get_u64(*it, "solver", "calibration_paths",
                cfg.solver.calibration_paths));
    cfg.basis_degree = get_int(*it, "solver", "basis_degree", cfg.basis_degree);
  }

  if (auto it = doc.find("generator"); it != doc.end())
    cfg.generator = parse_generator(*it, 0);
  if (auto it = doc.find("terminal"); it != doc.end())
    cfg.terminal = parse_terminal(*it);

  cfg.n_ref = get_num(doc, "the top-level document", "n_ref", cfg.n_ref);
  cfg.u_quad_nodes = get_int(doc, "the top-level document", "u_quad_nodes",
                             cfg.u_quad_nodes);
  cfg.n_max = get_int(doc, "the top-level document", "n_max", cfg.n_max);
  cfg.k_n = get_num(doc, "the top-level document", "k_n", cfg.k_n);
  cfg.radii = get_positive_array(doc, "the top-level document", "radii", {});

  if (auto it = doc.find("out"); it != doc.end()) {
    if (!it->is_string()) fail("\"out\" must be a string");
    cfg.out = it->get<std::string>();
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  njson doc;
  try {
    doc = njson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_document(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  njson j;
  if (cfg.has_model) j["model"] = model_json(cfg.model);
  j["levels"] = cfg.levels;
  j["paths"] = static_cast<std::uint64_t>(cfg.paths);
  j["T"] = cfg.T;
  j["beta"] = cfg.beta;
  j["eps_ref"] = cfg.eps_ref;
  j["seed"] = cfg.seed;
  j["bootstrap"] = cfg.bootstrap;
  j["solver"] = njson{{"time_steps", cfg.solver.time_steps},
                      {"space_nodes", cfg.solver.space_nodes},
                      {"quad_nodes", cfg.solver.quad_nodes},
                      {"x0", cfg.solver.x0},
                      {"q", cfg.solver.q},
                      {"calibration_paths",
                       static_cast<std::uint64_t>(cfg.solver.calibration_paths)},
                      {"basis_degree", cfg.basis_degree}};
  j["generator"] = generator_json(cfg.generator);
  j["terminal"] = terminal_json(cfg.terminal);
  j["n_ref"] = cfg.n_ref;
  j["u_quad_nodes"] = cfg.u_quad_nodes;
  j["n_max"] = cfg.n_max;
  j["k_n"] = cfg.k_n;
  j["radii"] = cfg.radii;
  j["out"] = cfg.out;
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // The hash identifies the experiment; where its reports land does not
  // change what was computed, so "out" is excluded.
  ExperimentConfig keyed = cfg;
  keyed.out.clear();
  return tag64(config_to_json(keyed));
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace levybsde
