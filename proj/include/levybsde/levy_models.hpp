#pragma once
#include <cstdint>
#include <string>

namespace levybsde {

enum class AtomicRule { HARMONIC, LOGHARMONIC };

// One-dimensional pure-jump Lévy measures with square-integrable tails.
//
//   CGMY / StableLikeTail: density c± |x|^{-1-alpha} e^{-lam± |x|} per half-line
//   MertonJump:            lambda * N(mu, sigma^2) density (finite activity)
//   Atomic:                atoms x_i with unit weights, |x_i| decreasing to 0
//     HARMONIC:     x_i = 1/i            (i >= 1)
//     LOGHARMONIC:  x_i = sqrt(ln i)/i   (i >= 2)
struct LevyModel {
  enum class Kind { CGMY, MERTON, STABLE_LIKE, ATOMIC };
  Kind kind;

  // Tempered power-law fields (CGMY, STABLE_LIKE). For CGMY(C,G,M,Y):
  // cp = cm = C, alpha = Y, lam_pos = M, lam_neg = G.
  double cp = 0, cm = 0, alpha = 0, lam_pos = 0, lam_neg = 0;
  // CGMY's native parameters, kept for display/serialization.
  double C = 0, G = 0, M = 0, Y = 0;

  // Merton fields.
  double lambda = 0, mu = 0, sigma = 0;

  AtomicRule rule = AtomicRule::HARMONIC;

  static LevyModel cgmy(double C, double G, double M, double Y);
  static LevyModel merton(double lambda, double mu, double sigma);
  static LevyModel stable_like(double cp, double cm, double alpha,
                               double lam_pos, double lam_neg);
  static LevyModel atomic(AtomicRule rule);

  bool finite_activity() const { return kind == Kind::MERTON; }
  std::string kind_name() const;
  std::uint64_t hash() const;
  bool operator==(const LevyModel&) const = default;
};

// Blumenthal–Getoor index: infimum of p with ∫_{|x|<=1}|x|^p ν < ∞.
double bg_index(const LevyModel& model);

// Atom magnitude of the built-in rules at index i.
double atomic_value(AtomicRule rule, std::uint64_t i);
// First valid atom index of a rule (1 for HARMONIC, 2 for LOGHARMONIC).
std::uint64_t atomic_first_index(AtomicRule rule);

}  // namespace levybsde
