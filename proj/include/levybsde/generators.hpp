#pragma once
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levybsde/levy_measures.hpp"
#include "levybsde/levy_models.hpp"

namespace levybsde {

// Driver f(t, y, U(·)) of the backward equation. U is the jump increment of
// the value function: U(z) = u(t, x+z) − u(t, x), queried at jump sizes z.
struct GeneratorSpec {
  enum class Kind { ZERO, LINEAR, INTEGRAL, TIME_DISCRETIZED, CUSTOM };
  Kind kind = Kind::ZERO;

  // LINEAR: f = a·y + b.
  double a = 0, b = 0;

  // INTEGRAL: f = Λ·Σ_k w_k Φ(t, y, U(z_k))·δ(z_k) with δ(z) = 1 ∧ |z|^beta_bar,
  // i.e. the integral of Φ·δ against the level's jump measure. Φ is the
  // linear family Φ(t,y,v) = phi_cy·y + phi_cz·v with declared growth bound
  // |Φ| ≤ phi_ctilde·(1+|y|+|v|).
  double beta_bar = 0;
  double phi_cy = 0, phi_cz = 0, phi_ctilde = 0;

  // TIME_DISCRETIZED: evaluates `inner` with t frozen to floor(t·m/T)·T/m.
  std::shared_ptr<const GeneratorSpec> inner;
  int steps = 0;

  // CUSTOM: arbitrary callback with declared constants. custom_kind/c1..c3
  // remember how a built-in callback was constructed (serialization).
  std::function<double(double, double, const std::function<double(double)>&)>
      custom;
  std::string custom_kind;
  double c1 = 0, c2 = 0;
  int c3 = 0;

  double lip = 0;           // declared Lipschitz constant in (y, U)
  double holder_alpha = 1;  // time regularity, drives the discretization gap
  bool y_only = true;       // true when f never queries U(·)
  std::string name = "zero";

  static GeneratorSpec zero();
  static GeneratorSpec linear(double a, double b);
  static GeneratorSpec integral_linear_yz(double cy, double cz, double ctilde,
                                          double beta_bar);
  static GeneratorSpec time_discretized(GeneratorSpec inner, int m);
  static GeneratorSpec custom_fn(
      std::function<double(double, double,
                           const std::function<double(double)>&)> f,
      double lip, double holder_alpha, bool y_only, std::string name);
  // f(t) = amplitude · Σ_{k<terms} 2^{−alpha·k} dist(2^k·t + φ_k, nearest
  // integer) with golden-ratio phases φ_k = frac(k·0.618…): alpha-Hölder in t,
  // independent of y and U, and non-degenerate at dyadic grid times.
  static GeneratorSpec hoelder(double amplitude, double alpha, int terms);
  // f(t) = slope · t (Lipschitz in t, independent of y and U).
  static GeneratorSpec ramp(double slope);
};

// Level data a generator is evaluated against.
struct GeneratorContext {
  double T = 1;
  double lambda = 0;                             // Λ(eps) of the level
  const std::vector<QuadNode>* nodes = nullptr;  // restricted-law quadrature
};

double evaluate_generator(const GeneratorSpec& spec, const GeneratorContext& ctx,
                          double t, double y,
                          const std::function<double(double)>& U);

// Effective Lipschitz constant used by the contraction precondition:
// LINEAR → |a|; INTEGRAL → |cy|·∫δ dν^n + |cz|·√(∫δ² dν^n) (computed on the
// context's quadrature); CUSTOM → declared; TIME_DISCRETIZED → inner's.
double generator_lipschitz(const GeneratorSpec& spec, const GeneratorContext& ctx);

bool generator_y_only(const GeneratorSpec& spec);

// Discretization gap c_n of the generator approximation at level n:
// INTEGRAL → max{ m_beta_bar(1/n), √(m_{2·beta_bar}(1/n)) };
// TIME_DISCRETIZED → (T/m)^alpha with the inner time regularity.
// Other kinds have no gap notion and raise a domain error.
double generator_gap_cn(const LevyModel& model, const GeneratorSpec& spec,
                        double n, double T);

}  // namespace levybsde
