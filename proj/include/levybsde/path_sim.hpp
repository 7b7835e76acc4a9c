#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "levybsde/levy_models.hpp"
#include "levybsde/rng.hpp"
#include "levybsde/stats.hpp"

namespace levybsde {

// One level of the coupled compound-Poisson hierarchy: jumps of magnitude
// >= eps plus the martingale compensator drift, so the path value at t is
// Σ_{t_i <= t} j_i + drift·t with drift = −∫_{|x|>=eps} x ν(dx).
struct JumpPath {
  LevyModel model;
  double T = 0;
  double eps = 0;
  double drift = 0;
  std::vector<double> t;  // strictly increasing times in (0, T]
  std::vector<double> j;  // sizes, |j_i| >= eps
};

// Exact simulation at the finest level: Poisson(Λ(eps_ref)·T) many jumps,
// times sorted uniform on (0,T], sizes i.i.d. from the restricted law.
JumpPath simulate_reference(const LevyModel& model, double eps_ref, double T,
                            Stream& rng);

// Drop the jumps below the new radius and recompute the compensator.
// eps < ref.eps cannot be produced from ref and raises a domain error.
JumpPath thin_to_level(const JumpPath& ref, double eps);

// Path value Σ_{t_i <= t} j_i + drift·t; t must lie in [0, T].
double evaluate(const JumpPath& path, double t);

// Exact sup over [0,T] of |X_ref(t) − X_coarse(t)| for a coarse level
// obtained from ref by thinning. The difference is piecewise linear between
// removed-jump epochs, so the sup is attained at those epochs (left/right
// limits) or at T and is found by one ordered sweep. A coarse jump that is
// not present in ref violates the coupling contract (logic error).
double sup_distance(const JumpPath& ref, const JumpPath& coarse);

// sup_distance against several thinning radii in one pass over the reference
// jumps, without materializing the coarse paths. level_drifts[i] must equal
// −compensator_mean(model, eps_levels[i]).
std::vector<double> sup_distances_at(const JumpPath& ref,
                                     const std::vector<double>& eps_levels,
                                     const std::vector<double>& level_drifts);
std::vector<double> sup_distances_at(const JumpPath& ref,
                                     const std::vector<double>& eps_levels);

// The reference path together with thinned copies at radii
// eps_levels[0] > eps_levels[1] > ... >= eps_ref.
struct CoupledPaths {
  JumpPath reference;
  std::vector<JumpPath> levels;
};
CoupledPaths simulate_coupled(const LevyModel& model,
                              const std::vector<double>& eps_levels,
                              double eps_ref, double T, Stream& rng);

// Simulates (first jump time, |first jump size|) pairs on [0, T], skipping
// paths with no jump, and tests their independence.
IndependenceTest first_jump_independence_test(const LevyModel& model,
                                              double eps, double T,
                                              std::size_t paths, Stream& rng);

// Binary path dump: 16-byte header (magic "LBSP", version u32, record count
// u64), then (t: f64, j: f64) records, all little-endian.
void write_path_dump(const JumpPath& path, const std::string& file);
std::vector<std::pair<double, double>> read_path_dump(const std::string& file);

}  // namespace levybsde
