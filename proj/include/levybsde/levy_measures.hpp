#pragma once
#include <memory>
#include <vector>

#include "levybsde/levy_models.hpp"
#include "levybsde/rng.hpp"

namespace levybsde {

// A partial moment that may diverge. The infinity is a tagged state, never a
// floating +inf flowing into arithmetic.
struct Moment {
  double value = 0.0;
  bool infinite = false;
  static Moment inf() { return {0.0, true}; }
  static Moment finite(double v) { return {v, false}; }
};

// Λ(eps) = ν({|x| >= eps}).
double tail_mass(const LevyModel& model, double eps);

// m_p(eps) = ∫_{|x| <= eps} |x|^p ν(dx); divergent integrals return the
// tagged infinity.
Moment partial_moment(const LevyModel& model, double p, double eps);

// ∫_{R}|x|^p ν(dx) over the whole line (tagged infinity when divergent).
Moment absolute_moment(const LevyModel& model, double p);

// 2 (∫ |x|^beta ν)^{1/2}; requires bg_index < beta < 2.
double c_beta(const LevyModel& model, double beta);

// ∫_{|x| >= eps} x ν(dx), signed. eps = 0 permitted for finite activity only.
double compensator_mean(const LevyModel& model, double eps);

// One draw from ν restricted to {|x| >= eps}, normalized.
double sample_restricted(const LevyModel& model, double eps, Stream& rng);

// Jump-size quadrature node against the restricted normalized law.
struct QuadNode {
  double z;  // representative jump size (cell conditional mean)
  double w;  // cell probability; sums to 1 across nodes
};

// Equal-probability-cell quadrature rule with k nodes (atoms used exactly for
// atomic models when they fit).
std::vector<QuadNode> restricted_quad_nodes(const LevyModel& model, double eps,
                                            int k);

// Tabulated restricted law shared by sampling and quadrature; built once per
// (model, eps) and cached. Concurrent readers are safe; insertion is
// serialized internally.
class RestrictedLaw {
 public:
  RestrictedLaw(const LevyModel& model, double eps);

  double lambda() const { return lambda_; }
  double sample(Stream& rng) const;
  std::vector<QuadNode> equal_mass_nodes(int k) const;
  // CDF of the normalized restricted law (for goodness-of-fit testing).
  double cdf(double x) const;

 private:
  struct Side {
    double mass = 0.0;
    std::vector<double> x;      // cell boundaries, log-spaced, size cells+1
    std::vector<double> cmass;  // cumulative measure of cells, size cells+1
    std::vector<double> cmom;   // cumulative ∫ x ν over cells, size cells+1
  };
  void build_side(Side& s, double c, double lam, double eps) const;
  double sample_side(const Side& s, double target) const;

  LevyModel model_;
  double eps_;
  double lambda_;
  // Density models: negative side stores |x|.
  Side pos_, neg_;
  // Atomic models: contiguous index range [first_, first_ + count_).
  std::uint64_t atom_first_ = 0, atom_count_ = 0;
};

std::shared_ptr<const RestrictedLaw> restricted_law(const LevyModel& model,
                                                    double eps);

}  // namespace levybsde
