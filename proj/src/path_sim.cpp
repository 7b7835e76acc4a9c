#include "levybsde/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "levybsde/levy_measures.hpp"

namespace levybsde {

JumpPath simulate_reference(const LevyModel& model, double eps_ref, double T,
                            Stream& rng) {
  if (!(T > 0)) throw std::domain_error("simulate_reference: T must be > 0");
  JumpPath p;
  p.model = model;
  p.T = T;
  p.eps = eps_ref;
  const auto law = restricted_law(model, eps_ref);
  const double lam = law->lambda();
  p.drift = -compensator_mean(model, eps_ref);
  if (lam <= 0) return p;  // no support above eps_ref: path is identically 0
  const long n = rng.poisson(lam * T);
  p.t = rng.sorted_uniform_times(n, T);
  p.j.resize(p.t.size());
  for (auto& x : p.j) x = law->sample(rng);
  return p;
}

JumpPath thin_to_level(const JumpPath& ref, double eps) {
  if (eps < ref.eps)
    throw std::domain_error("thin_to_level: cannot refine below the reference");
  JumpPath p;
  p.model = ref.model;
  p.T = ref.T;
  p.eps = eps;
  p.drift = -compensator_mean(ref.model, eps);
  for (std::size_t i = 0; i < ref.t.size(); ++i) {
    if (std::fabs(ref.j[i]) >= eps) {
      p.t.push_back(ref.t[i]);
      p.j.push_back(ref.j[i]);
    }
  }
  return p;
}

double evaluate(const JumpPath& path, double t) {
  if (t < 0 || t > path.T)
    throw std::domain_error("evaluate: t outside [0, T]");
  const auto end = std::upper_bound(path.t.begin(), path.t.end(), t);
  double s = 0;
  for (auto it = path.t.begin(); it != end; ++it)
    s += path.j[static_cast<std::size_t>(it - path.t.begin())];
  return s + path.drift * t;
}

double sup_distance(const JumpPath& ref, const JumpPath& coarse) {
  if (ref.T != coarse.T)
    throw std::logic_error("sup_distance: horizons differ");
  const double slope = ref.drift - coarse.drift;
  double s = 0, best = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < ref.t.size(); ++i) {
    if (k < coarse.t.size() && coarse.t[k] == ref.t[i] &&
        coarse.j[k] == ref.j[i]) {
      ++k;  // shared jump: difference unaffected
      continue;
    }
    if (k < coarse.t.size() && coarse.t[k] < ref.t[i])
      throw std::logic_error("sup_distance: coarse jump absent from reference");
    const double tau = ref.t[i];
    best = std::max(best, std::fabs(s + slope * tau));
    s += ref.j[i];
    best = std::max(best, std::fabs(s + slope * tau));
  }
  if (k != coarse.t.size())
    throw std::logic_error("sup_distance: coarse jump absent from reference");
  return std::max(best, std::fabs(s + slope * ref.T));
}

std::vector<double> sup_distances_at(const JumpPath& ref,
                                     const std::vector<double>& eps_levels,
                                     const std::vector<double>& level_drifts) {
  if (eps_levels.size() != level_drifts.size())
    throw std::logic_error("sup_distances_at: level/drift size mismatch");
  std::vector<double> out(eps_levels.size(), 0.0);
  for (std::size_t l = 0; l < eps_levels.size(); ++l) {
    const double eps = eps_levels[l];
    if (eps < ref.eps)
      throw std::domain_error("sup_distances_at: level below the reference");
    const double slope = ref.drift - level_drifts[l];
    double s = 0, best = 0;
    for (std::size_t i = 0; i < ref.t.size(); ++i) {
      if (std::fabs(ref.j[i]) >= eps) continue;  // retained at this level
      const double tau = ref.t[i];
      best = std::max(best, std::fabs(s + slope * tau));
      s += ref.j[i];
      best = std::max(best, std::fabs(s + slope * tau));
    }
    out[l] = std::max(best, std::fabs(s + slope * ref.T));
  }
  return out;
}

std::vector<double> sup_distances_at(const JumpPath& ref,
                                     const std::vector<double>& eps_levels) {
  std::vector<double> drifts;
  drifts.reserve(eps_levels.size());
  for (double e : eps_levels) drifts.push_back(-compensator_mean(ref.model, e));
  return sup_distances_at(ref, eps_levels, drifts);
}

CoupledPaths simulate_coupled(const LevyModel& model,
                              const std::vector<double>& eps_levels,
                              double eps_ref, double T, Stream& rng) {
  for (std::size_t i = 0; i < eps_levels.size(); ++i) {
    if (eps_levels[i] < eps_ref)
      throw std::domain_error("simulate_coupled: level below the reference");
    if (i && !(eps_levels[i - 1] > eps_levels[i]))
      throw std::domain_error("simulate_coupled: radii must decrease");
  }
  CoupledPaths cp;
  cp.reference = simulate_reference(model, eps_ref, T, rng);
  cp.levels.reserve(eps_levels.size());
  for (double e : eps_levels) cp.levels.push_back(thin_to_level(cp.reference, e));
  return cp;
}

IndependenceTest first_jump_independence_test(const LevyModel& model,
                                              double eps, double T,
                                              std::size_t paths, Stream& rng) {
  const auto law = restricted_law(model, eps);
  const double lam = law->lambda();
  if (lam <= 0)
    throw std::domain_error("first_jump_independence_test: empty measure");
  std::vector<double> tau, size;
  tau.reserve(paths);
  size.reserve(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    const double t = rng.exponential(lam);
    const double x = law->sample(rng);
    if (t > T) continue;  // no jump on [0, T]
    tau.push_back(t);
    size.push_back(std::fabs(x));
  }
  return chi2_independence(tau, size);
}

void write_path_dump(const JumpPath& path, const std::string& file) {
  std::FILE* f = std::fopen(file.c_str(), "wb");
  if (!f) throw std::runtime_error("write_path_dump: cannot open " + file);
  const char magic[4] = {'L', 'B', 'S', 'P'};
  const std::uint32_t version = 1;
  const std::uint64_t count = path.t.size();
  bool ok = std::fwrite(magic, 1, 4, f) == 4 &&
            std::fwrite(&version, sizeof version, 1, f) == 1 &&
            std::fwrite(&count, sizeof count, 1, f) == 1;
  for (std::size_t i = 0; ok && i < path.t.size(); ++i) {
    ok = std::fwrite(&path.t[i], sizeof(double), 1, f) == 1 &&
         std::fwrite(&path.j[i], sizeof(double), 1, f) == 1;
  }
  if (std::fclose(f) != 0 || !ok)
    throw std::runtime_error("write_path_dump: write failed for " + file);
}

std::vector<std::pair<double, double>> read_path_dump(const std::string& file) {
  std::FILE* f = std::fopen(file.c_str(), "rb");
  if (!f) throw std::runtime_error("read_path_dump: cannot open " + file);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t count = 0;
  bool ok = std::fread(magic, 1, 4, f) == 4 &&
            std::memcmp(magic, "LBSP", 4) == 0 &&
            std::fread(&version, sizeof version, 1, f) == 1 && version == 1 &&
            std::fread(&count, sizeof count, 1, f) == 1;
  std::vector<std::pair<double, double>> records;
  if (ok) records.reserve(count);
  for (std::uint64_t i = 0; ok && i < count; ++i) {
    double t, j;
    ok = std::fread(&t, sizeof t, 1, f) == 1 && std::fread(&j, sizeof j, 1, f) == 1;
    if (ok) records.emplace_back(t, j);
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("read_path_dump: bad or truncated file " + file);
  return records;
}

}  // namespace levybsde
