#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levybsde/generators.hpp"
#include "levybsde/levy_measures.hpp"
#include "levybsde/rng.hpp"
#include "levybsde/stats.hpp"

namespace levybsde {

// Terminal-value problem for the backward equation driven by the truncated
// jump process at level radius `eps`:
//
//   Y_t = g(x0 + X_T) + integral_t^T f(s, Y_s, U_s) ds - (martingale part).
//
// The Markovian value function u(t, x) satisfies u(T, x) = g(x) and one
// implicit backward Euler step per time cell, with the conditional
// expectation computed by jump-count conditioning against the restricted
// jump law.
struct BSDEProblem {
  LevyModel model;
  double eps = 0.0;  // truncation radius of the driving process
  double T = 1.0;
  GeneratorSpec generator;
  std::function<double(double)> terminal;  // g
  double terminal_lipschitz = 0.0;         // declared Lipschitz bound for g
};

struct GridSpec {
  int time_steps = 64;    // K backward Euler cells
  int space_nodes = 513;  // uniform nodes on [x0 - q, x0 + q]
  int quad_nodes = 512;   // equal-mass cells for the restricted jump law
  double x0 = 0.0;        // spatial anchor (grid center)
  double q = 0.0;         // half-width; 0 = calibrate from simulated paths
  // Paths used to calibrate q when q == 0 (covers the running maximum of
  // |X| with margin; uses a fixed internal stream, so results do not depend
  // on any user seed).
  std::size_t calibration_paths = 20000;
};

struct GridSolution {
  std::vector<double> tgrid;              // K+1 times, tgrid[K] = T
  std::vector<double> xgrid;              // J uniform nodes
  std::vector<std::vector<double>> u;     // u[i][j] = u(tgrid[i], xgrid[j])
  double lambda = 0.0;                    // total mass of the restricted law
  std::vector<QuadNode> nodes;            // quadrature cells actually used
  double drift = 0.0;                     // compensation drift of X
  int max_picard = 0;                     // worst fixed-point sweep count
  double count_tail = 0.0;                // truncated jump-count probability
  std::string warning;                    // set when the grid may be too small
  double q = 0.0;                         // half-width actually used
  double x0 = 0.0;

  // Piecewise-linear evaluation in space at time index ti, extended beyond
  // the grid with the boundary slope (first-order accurate for Lipschitz u).
  double value_at(int ti, double x) const;
  // Jump increment of the value function: u(t_i, x + z) - u(t_i, x).
  double jump_increment(int ti, double x, double z) const;
};

// Solves the backward equation on a uniform space grid.  Throws ConfigError
// when the time step is too coarse for the implicit solve to contract
// (dt * L_f * (1 + sqrt(lambda)) must stay below 1/2) and when the grid
// parameters are unusable.
GridSolution solve_markovian_grid(const BSDEProblem& problem,
                                  const GridSpec& grid);

// Monte Carlo estimate of E[g(x + X_T)], the closed-form value of the
// backward equation when the generator vanishes.  Returns mean and standard
// error over `samples` independent terminal draws from the given stream.
MeanSE terminal_expectation(const BSDEProblem& problem, double x,
                            std::size_t samples, Stream& rng);

}  // namespace levybsde
