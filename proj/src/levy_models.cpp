#include "levybsde/levy_models.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "levybsde/rng.hpp"

namespace levybsde {

namespace {
std::uint64_t bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}
}  // namespace

LevyModel LevyModel::cgmy(double C, double G, double M, double Y) {
  if (!(C > 0) || !(G > 0) || !(M > 0) || !(Y < 2))
    throw std::domain_error("cgmy: need C>0, G>0, M>0, Y<2");
  LevyModel m;
  m.kind = Kind::CGMY;
  m.cp = m.cm = C;
  m.alpha = Y;
  m.lam_pos = M;
  m.lam_neg = G;
  m.C = C; m.G = G; m.M = M; m.Y = Y;
  return m;
}

LevyModel LevyModel::merton(double lambda, double mu, double sigma) {
  if (!(lambda > 0) || !(sigma > 0))
    throw std::domain_error("merton: need lambda>0, sigma>0");
  LevyModel m;
  m.kind = Kind::MERTON;
  m.lambda = lambda; m.mu = mu; m.sigma = sigma;
  return m;
}

LevyModel LevyModel::stable_like(double cp, double cm, double alpha,
                                 double lam_pos, double lam_neg) {
  if (!(cp >= 0) || !(cm >= 0) || cp + cm <= 0)
    throw std::domain_error("stable_like: need c+>=0, c->=0, not both zero");
  if (!(alpha >= 0) || !(alpha < 2))
    throw std::domain_error("stable_like: need alpha in [0,2)");
  // Square integrability at infinity requires tempering on every active side.
  if ((cp > 0 && !(lam_pos > 0)) || (cm > 0 && !(lam_neg > 0)))
    throw std::domain_error("stable_like: active sides need positive tempering");
  LevyModel m;
  m.kind = Kind::STABLE_LIKE;
  m.cp = cp; m.cm = cm; m.alpha = alpha;
  m.lam_pos = lam_pos; m.lam_neg = lam_neg;
  return m;
}

LevyModel LevyModel::atomic(AtomicRule rule) {
  LevyModel m;
  m.kind = Kind::ATOMIC;
  m.rule = rule;
  return m;
}

std::string LevyModel::kind_name() const {
  switch (kind) {
    case Kind::CGMY: return "cgmy";
    case Kind::MERTON: return "merton";
    case Kind::STABLE_LIKE: return "stable_like";
    case Kind::ATOMIC:
      return rule == AtomicRule::HARMONIC ? "atomic_harmonic" : "atomic_logharmonic";
  }
  return "?";
}

std::uint64_t LevyModel::hash() const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(kind) + 0x51ed2701);
  for (double v : {cp, cm, alpha, lam_pos, lam_neg, lambda, mu, sigma})
    h = mix64(h ^ bits(v));
  h = mix64(h ^ static_cast<std::uint64_t>(rule));
  return h;
}

double bg_index(const LevyModel& model) {
  switch (model.kind) {
    case LevyModel::Kind::CGMY: return std::max(0.0, model.Y);
    case LevyModel::Kind::MERTON: return 0.0;
    case LevyModel::Kind::STABLE_LIKE: return model.alpha;
    case LevyModel::Kind::ATOMIC: return 1.0;
  }
  return 0.0;
}

double atomic_value(AtomicRule rule, std::uint64_t i) {
  const double x = static_cast<double>(i);
  if (rule == AtomicRule::HARMONIC) return 1.0 / x;
  return std::sqrt(std::log(x)) / x;
}

std::uint64_t atomic_first_index(AtomicRule rule) {
  return rule == AtomicRule::HARMONIC ? 1 : 2;
}

}  // namespace levybsde
