#pragma once

#include <cstdint>
#include <cstddef>

#include "levybsde/bsde_grid.hpp"

namespace levybsde {

// Regression-based backward solver (least-squares Monte Carlo).  Supports
// drivers that never query the jump increment U(·); couplings through U need
// the grid solver and are rejected with a domain error.
struct LsmcSpec {
  int time_steps = 64;
  std::size_t paths = 20000;
  int degree = 4;  // polynomial basis degree, at most 6
  double x0 = 0.0;  // spatial anchor: the value reported is u(0, x0)
  std::uint64_t seed = 0;
  int bootstrap = 0;  // resampling replicates for the standard error (0 = off)
};

struct LsmcSolution {
  double y0 = 0.0;
  double se = 0.0;           // bootstrap standard error (0 when disabled)
  int degree_fallbacks = 0;  // regressions that had to drop basis functions
  int max_point_iters = 0;   // worst per-path implicit iteration count
};

LsmcSolution solve_lsmc(const BSDEProblem& problem, const LsmcSpec& spec);

}  // namespace levybsde
