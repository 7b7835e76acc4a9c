#include "levybsde/levy_measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "levybsde/quadrature.hpp"
#include "levybsde/special.hpp"

namespace levybsde {

namespace {

std::uint64_t dbits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

// c ∫_a^b x^{p-1-alpha} e^{-lam x} dx, refined to ~1e-11 relative accuracy.
double tpl_integral(double c, double alpha, double lam, double p, double a,
                    double b) {
  if (c == 0 || a >= b) return 0.0;
  const double expo = p - 1.0 - alpha;
  auto f = [=](double x) { return c * std::pow(x, expo) * std::exp(-lam * x); };
  const double rough = integrate_log_panels(f, a, b, 1e-10);
  const double tol = std::max(1e-15, 1e-11 * std::fabs(rough));
  return integrate_log_panels(f, a, b, tol);
}

// c ∫_0^eps x^{p-1-alpha} e^{-lam x} dx for p > alpha: quadrature on
// [eps_min, eps] plus the analytic expansion of the stub below eps_min
// (e^{-lam x} = 1 - lam x + O((lam x)^2) there).
double tpl_partial(double c, double alpha, double lam, double p, double eps) {
  if (c == 0) return 0.0;
  const double s = p - alpha;
  const double eps_min = std::min(1e-11, 0.5 * eps);
  const double stub =
      c * (std::pow(eps_min, s) / s - lam * std::pow(eps_min, s + 1.0) / (s + 1.0));
  return stub + tpl_integral(c, alpha, lam, p, eps_min, eps);
}

double tpl_tail_upper(double lam, double eps) { return eps + 46.0 / lam; }

// Merton density of jump sizes: lambda * N(mu, sigma^2).
double merton_density(const LevyModel& m, double x) {
  return m.lambda * normal_pdf((x - m.mu) / m.sigma) / m.sigma;
}

// E[X ; a < X < b] for X ~ N(mu, sigma^2).
double normal_mean_between(double mu, double sigma, double a, double b) {
  const double ah = (a - mu) / sigma, bh = (b - mu) / sigma;
  return mu * (normal_cdf(bh) - normal_cdf(ah)) +
         sigma * normal_partial_mean(ah, bh);
}

// Largest atom index i with x_i >= eps (0 when even the first atom is below),
// resolved with the same double arithmetic used everywhere else.
std::uint64_t atomic_last_geq(AtomicRule rule, double eps) {
  const std::uint64_t first = atomic_first_index(rule);
  if (atomic_value(rule, first) < eps) return 0;
  std::uint64_t lo = first, hi = first + 1;
  while (atomic_value(rule, hi) >= eps) {
    lo = hi;
    if (hi > (1ULL << 60)) throw std::domain_error("atomic: eps too small");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (atomic_value(rule, mid) >= eps ? lo : hi) = mid;
  }
  return lo;
}

// Σ_{i >= from} x_i^p for the built-in rules (p > 1): direct summation of the
// first block, then a midpoint-rule integral for the remainder with its
// Euler–Maclaurin correction; the truncation error is far below 1e-12
// relative at these block sizes.
double atomic_tail_sum(AtomicRule rule, double p, std::uint64_t from) {
  from = std::max(from, atomic_first_index(rule));
  const std::uint64_t M = std::max<std::uint64_t>(from, 200000);
  double s = 0.0;
  for (std::uint64_t i = M; i-- > from;) s += std::pow(atomic_value(rule, i), p);
  const double m = static_cast<double>(M) - 0.5;
  double integral, fprime;
  if (rule == AtomicRule::HARMONIC) {
    // f(x) = x^-p
    integral = std::pow(m, 1.0 - p) / (p - 1.0);
    fprime = -p * std::pow(m, -p - 1.0);
  } else {
    // f(x) = (ln x)^{p/2} x^-p
    const double q = 0.5 * p, u0 = (p - 1.0) * std::log(m);
    integral = upper_incomplete_gamma(q + 1.0, u0) / std::pow(p - 1.0, q + 1.0);
    const double lx = std::log(m);
    fprime = std::pow(m, -p - 1.0) * std::pow(lx, q - 1.0) * (q - p * lx);
  }
  return s + integral + fprime / 24.0;
}

}  // namespace

double tail_mass(const LevyModel& model, double eps) {
  if (eps < 0) throw std::domain_error("tail_mass: eps must be >= 0");
  if (eps == 0 && !model.finite_activity())
    throw std::domain_error("tail_mass: eps = 0 needs finite activity");
  switch (model.kind) {
    case LevyModel::Kind::CGMY:
    case LevyModel::Kind::STABLE_LIKE:
      return tpl_integral(model.cp, model.alpha, model.lam_pos, 0.0, eps,
                          tpl_tail_upper(model.lam_pos, eps)) +
             tpl_integral(model.cm, model.alpha, model.lam_neg, 0.0, eps,
                          tpl_tail_upper(model.lam_neg, eps));
    case LevyModel::Kind::MERTON: {
      const double ah = (-eps - model.mu) / model.sigma;
      const double bh = (eps - model.mu) / model.sigma;
      return model.lambda * (normal_cdf(ah) + 1.0 - normal_cdf(bh));
    }
    case LevyModel::Kind::ATOMIC: {
      const std::uint64_t last = atomic_last_geq(model.rule, eps);
      if (last == 0) return 0.0;
      return static_cast<double>(last - atomic_first_index(model.rule) + 1);
    }
  }
  return 0.0;
}

Moment partial_moment(const LevyModel& model, double p, double eps) {
  if (eps < 0) throw std::domain_error("partial_moment: eps must be >= 0");
  if (!(p >= 0)) throw std::domain_error("partial_moment: p must be >= 0");
  if (eps == 0) {
    if (!model.finite_activity())
      throw std::domain_error("partial_moment: eps = 0 needs finite activity");
    return Moment::finite(0.0);  // the law is atomless, the ball {0} is null
  }
  switch (model.kind) {
    case LevyModel::Kind::CGMY:
    case LevyModel::Kind::STABLE_LIKE: {
      if ((model.alpha > 0 && p <= model.alpha) || (model.alpha == 0 && p == 0))
        return Moment::inf();
      return Moment::finite(
          tpl_partial(model.cp, model.alpha, model.lam_pos, p, eps) +
          tpl_partial(model.cm, model.alpha, model.lam_neg, p, eps));
    }
    case LevyModel::Kind::MERTON: {
      const double ah = (-eps - model.mu) / model.sigma;
      const double bh = (eps - model.mu) / model.sigma;
      if (p == 0)
        return Moment::finite(model.lambda * (normal_cdf(bh) - normal_cdf(ah)));
      if (p == 1) {
        const double neg = normal_mean_between(model.mu, model.sigma, -eps, 0.0);
        const double pos = normal_mean_between(model.mu, model.sigma, 0.0, eps);
        return Moment::finite(model.lambda * (pos - neg));
      }
      if (p == 2) {
        const double s = model.sigma, mu = model.mu;
        const double val = mu * mu * (normal_cdf(bh) - normal_cdf(ah)) +
                           2.0 * mu * s * normal_partial_mean(ah, bh) +
                           s * s * normal_partial_m2(ah, bh);
        return Moment::finite(model.lambda * val);
      }
      // Generic exponent: the integrand has only the |x|^p kink at 0.
      const double eps_min = std::min(1e-11, 0.5 * eps);
      auto f = [&](double x) {
        return std::pow(x, p) * (merton_density(model, x) + merton_density(model, -x));
      };
      const double stub = f(0.5 * eps_min) / std::pow(0.5 * eps_min, p) *
                          std::pow(eps_min, p + 1.0) / (p + 1.0);
      const double rough = stub + integrate_log_panels(f, eps_min, eps, 1e-12);
      return Moment::finite(rough);
    }
    case LevyModel::Kind::ATOMIC: {
      if (p <= 1.0) return Moment::inf();
      // atoms with value <= eps start right after the last one strictly above
      const std::uint64_t last_above =
          atomic_last_geq(model.rule, std::nextafter(eps, HUGE_VAL));
      return Moment::finite(atomic_tail_sum(model.rule, p, last_above + 1));
    }
  }
  return Moment::finite(0.0);
}

Moment absolute_moment(const LevyModel& model, double p) {
  if (!(p >= 0)) throw std::domain_error("absolute_moment: p must be >= 0");
  switch (model.kind) {
    case LevyModel::Kind::CGMY:
    case LevyModel::Kind::STABLE_LIKE: {
      if ((model.alpha > 0 && p <= model.alpha) || (model.alpha == 0 && p == 0))
        return Moment::inf();
      double v = 0.0;
      if (model.cp > 0)
        v += tpl_partial(model.cp, model.alpha, model.lam_pos, p,
                         tpl_tail_upper(model.lam_pos, 1.0));
      if (model.cm > 0)
        v += tpl_partial(model.cm, model.alpha, model.lam_neg, p,
                         tpl_tail_upper(model.lam_neg, 1.0));
      return Moment::finite(v);
    }
    case LevyModel::Kind::MERTON: {
      if (p == 0) return Moment::finite(model.lambda);
      if (p == 2)
        return Moment::finite(model.lambda *
                              (model.mu * model.mu + model.sigma * model.sigma));
      const double xm = std::fabs(model.mu) + 12.0 * model.sigma;
      auto f = [&](double x) {
        return std::pow(x, p) * (merton_density(model, x) + merton_density(model, -x));
      };
      const double eps_min = 1e-11;
      const double stub = f(0.5 * eps_min) / std::pow(0.5 * eps_min, p) *
                          std::pow(eps_min, p + 1.0) / (p + 1.0);
      return Moment::finite(stub + integrate_log_panels(f, eps_min, xm, 1e-12));
    }
    case LevyModel::Kind::ATOMIC: {
      if (p <= 1.0) return Moment::inf();
      return Moment::finite(
          atomic_tail_sum(model.rule, p, atomic_first_index(model.rule)));
    }
  }
  return Moment::finite(0.0);
}

double c_beta(const LevyModel& model, double beta) {
  const double bstar = bg_index(model);
  if (!(beta > bstar) || !(beta < 2))
    throw std::domain_error("c_beta: need bg_index < beta < 2");
  const Moment m = absolute_moment(model, beta);
  if (m.infinite) throw std::domain_error("c_beta: moment diverges");
  return 2.0 * std::sqrt(m.value);
}

double compensator_mean(const LevyModel& model, double eps) {
  if (eps < 0) throw std::domain_error("compensator_mean: eps must be >= 0");
  if (eps == 0 && !model.finite_activity())
    throw std::domain_error("compensator_mean: eps = 0 needs finite activity");
  switch (model.kind) {
    case LevyModel::Kind::CGMY:
    case LevyModel::Kind::STABLE_LIKE:
      return tpl_integral(model.cp, model.alpha, model.lam_pos, 1.0, eps,
                          tpl_tail_upper(model.lam_pos, eps)) -
             tpl_integral(model.cm, model.alpha, model.lam_neg, 1.0, eps,
                          tpl_tail_upper(model.lam_neg, eps));
    case LevyModel::Kind::MERTON:
      return model.lambda *
             (model.mu - normal_mean_between(model.mu, model.sigma, -eps, eps));
    case LevyModel::Kind::ATOMIC: {
      const std::uint64_t last = atomic_last_geq(model.rule, eps);
      const std::uint64_t first = atomic_first_index(model.rule);
      if (last == 0) return 0.0;
      double s = 0.0;
      for (std::uint64_t i = last + 1; i-- > first;) s += atomic_value(model.rule, i);
      return s;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Restricted law: tables, sampling, quadrature nodes.

RestrictedLaw::RestrictedLaw(const LevyModel& model, double eps)
    : model_(model), eps_(eps) {
  if (eps < 0) throw std::domain_error("restricted law: eps must be >= 0");
  if (eps == 0 && !model.finite_activity())
    throw std::domain_error("restricted law: eps = 0 needs finite activity");
  switch (model.kind) {
    case LevyModel::Kind::ATOMIC: {
      const std::uint64_t last = atomic_last_geq(model.rule, eps);
      atom_first_ = atomic_first_index(model.rule);
      atom_count_ = last == 0 ? 0 : last - atom_first_ + 1;
      lambda_ = static_cast<double>(atom_count_);
      break;
    }
    case LevyModel::Kind::MERTON:
      lambda_ = eps == 0 ? model.lambda : tail_mass(model, eps);
      break;
    default:
      if (model.cp > 0) build_side(pos_, model.cp, model.lam_pos, eps);
      if (model.cm > 0) build_side(neg_, model.cm, model.lam_neg, eps);
      lambda_ = pos_.mass + neg_.mass;
  }
}

void RestrictedLaw::build_side(Side& s, double c, double lam, double eps) const {
  constexpr int kCells = 4096;
  const double xmax = tpl_tail_upper(lam, eps);
  const double ratio = std::pow(xmax / eps, 1.0 / kCells);
  s.x.resize(kCells + 1);
  s.cmass.assign(kCells + 1, 0.0);
  s.cmom.assign(kCells + 1, 0.0);
  for (int i = 0; i <= kCells; ++i) s.x[i] = eps * std::pow(ratio, i);
  s.x.back() = xmax;
  const double expo = -1.0 - model_.alpha;
  auto nu = [&](double x) { return c * std::pow(x, expo) * std::exp(-lam * x); };
  auto xnu = [&](double x) { return x * nu(x); };
  for (int i = 0; i < kCells; ++i) {
    s.cmass[i + 1] = s.cmass[i] + gk_adaptive(nu, s.x[i], s.x[i + 1], 1e-14, 8);
    s.cmom[i + 1] = s.cmom[i] + gk_adaptive(xnu, s.x[i], s.x[i + 1], 1e-14, 8);
  }
  s.mass = s.cmass.back();
}

double RestrictedLaw::sample_side(const Side& s, double target) const {
  const auto it = std::upper_bound(s.cmass.begin(), s.cmass.end(), target);
  std::size_t i = static_cast<std::size_t>(it - s.cmass.begin());
  i = std::clamp<std::size_t>(i, 1, s.cmass.size() - 1) - 1;
  const double m0 = s.cmass[i], m1 = s.cmass[i + 1];
  const double f = m1 > m0 ? (target - m0) / (m1 - m0) : 0.5;
  return s.x[i] + f * (s.x[i + 1] - s.x[i]);
}

double RestrictedLaw::sample(Stream& rng) const {
  if (lambda_ <= 0)
    throw std::domain_error("sample_restricted: restricted measure is empty");
  const double u = rng.uniform();
  switch (model_.kind) {
    case LevyModel::Kind::ATOMIC: {
      std::uint64_t k = static_cast<std::uint64_t>(u * static_cast<double>(atom_count_));
      if (k >= atom_count_) k = atom_count_ - 1;
      return atomic_value(model_.rule, atom_first_ + k);
    }
    case LevyModel::Kind::MERTON: {
      if (eps_ == 0) return model_.mu + model_.sigma * normal_ppf(u);
      const double ah = (-eps_ - model_.mu) / model_.sigma;
      const double bh = (eps_ - model_.mu) / model_.sigma;
      const double pl = normal_cdf(ah), pr = 1.0 - normal_cdf(bh);
      const double t = u * (pl + pr);
      if (t < pl) return model_.mu + model_.sigma * normal_ppf(t);
      return model_.mu +
             model_.sigma * normal_ppf(normal_cdf(bh) + (t - pl));
    }
    default: {
      const double target = u * lambda_;
      if (target < neg_.mass) return -sample_side(neg_, neg_.mass - target);
      return sample_side(pos_, target - neg_.mass);
    }
  }
}

double RestrictedLaw::cdf(double x) const {
  if (lambda_ <= 0) throw std::domain_error("cdf: empty restricted measure");
  auto side_below = [&](const Side& s, double ax) {
    // measure of the side's atoms in [eps, ax]
    if (ax <= s.x.front()) return 0.0;
    if (ax >= s.x.back()) return s.mass;
    const auto it = std::upper_bound(s.x.begin(), s.x.end(), ax);
    const std::size_t i = static_cast<std::size_t>(it - s.x.begin()) - 1;
    const double f = (ax - s.x[i]) / (s.x[i + 1] - s.x[i]);
    return s.cmass[i] + f * (s.cmass[i + 1] - s.cmass[i]);
  };
  switch (model_.kind) {
    case LevyModel::Kind::ATOMIC: {
      // atoms are positive, decreasing in i
      if (atom_count_ == 0) return 0.0;
      if (x < atomic_value(model_.rule, atom_first_ + atom_count_ - 1)) return 0.0;
      if (x >= atomic_value(model_.rule, atom_first_)) return 1.0;
      const std::uint64_t last = atomic_last_geq(model_.rule, std::nextafter(x, 2.0));
      // atoms with value <= x: indices last+1 .. first+count-1
      return static_cast<double>(atom_first_ + atom_count_ - 1 - last) /
             static_cast<double>(atom_count_);
    }
    case LevyModel::Kind::MERTON: {
      const double z = (x - model_.mu) / model_.sigma;
      if (eps_ == 0) return normal_cdf(z);
      const double ah = (-eps_ - model_.mu) / model_.sigma;
      const double bh = (eps_ - model_.mu) / model_.sigma;
      const double pl = normal_cdf(ah), pr = 1.0 - normal_cdf(bh);
      double m;
      if (x <= -eps_) m = normal_cdf(z);
      else if (x < eps_) m = pl;
      else m = pl + (normal_cdf(z) - normal_cdf(bh));
      return m / (pl + pr);
    }
    default: {
      double m;
      if (x <= 0) m = neg_.mass - side_below(neg_, -x);
      else m = neg_.mass + side_below(pos_, x);
      return m / lambda_;
    }
  }
}

std::vector<QuadNode> RestrictedLaw::equal_mass_nodes(int k) const {
  if (k < 1) throw std::domain_error("equal_mass_nodes: k must be >= 1");
  if (lambda_ <= 0) throw std::domain_error("equal_mass_nodes: empty measure");
  std::vector<QuadNode> nodes;
  switch (model_.kind) {
    case LevyModel::Kind::ATOMIC: {
      if (atom_count_ > 4096)
        throw std::logic_error("equal_mass_nodes: too many atoms at this level");
      nodes.reserve(atom_count_);
      const double w = 1.0 / static_cast<double>(atom_count_);
      for (std::uint64_t i = 0; i < atom_count_; ++i)
        nodes.push_back({atomic_value(model_.rule, atom_first_ + i), w});
      return nodes;
    }
    case LevyModel::Kind::MERTON: {
      const double mu = model_.mu, sg = model_.sigma;
      auto cell_mean = [&](double plo, double phi) {
        // conditional mean of N(mu, sg^2) between its plo and phi quantiles
        const double a = normal_ppf(std::max(plo, 1e-300));
        const double b = phi >= 1.0 ? 40.0 : normal_ppf(phi);
        return mu + sg * normal_partial_mean(a, b) / (phi - plo);
      };
      if (eps_ == 0) {
        nodes.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
          const double plo = static_cast<double>(j) / k;
          const double phi = static_cast<double>(j + 1) / k;
          nodes.push_back({cell_mean(plo, phi), 1.0 / k});
        }
        return nodes;
      }
      const double ah = (-eps_ - mu) / sg, bh = (eps_ - mu) / sg;
      const double pl = normal_cdf(ah), pr = 1.0 - normal_cdf(bh);
      int kl = static_cast<int>(std::lround(k * pl / (pl + pr)));
      if (pl > 0 && kl == 0) kl = 1;
      if (pr > 0 && kl == k) kl = k - 1;
      int kr = k - kl;
      if (pr == 0) { kl = k; kr = 0; }
      nodes.reserve(static_cast<std::size_t>(k));
      for (int j = 0; j < kl; ++j) {
        const double plo = pl * j / kl, phi = pl * (j + 1) / kl;
        nodes.push_back({cell_mean(plo, phi), pl / ((pl + pr) * kl)});
      }
      for (int j = 0; j < kr; ++j) {
        const double plo = normal_cdf(bh) + pr * j / kr;
        const double phi = j + 1 == kr ? 1.0 : normal_cdf(bh) + pr * (j + 1) / kr;
        nodes.push_back({cell_mean(plo, phi), pr / ((pl + pr) * kr)});
      }
      return nodes;
    }
    default: {
      auto side_nodes = [&](const Side& s, double sign, int ks) {
        if (ks <= 0 || s.mass <= 0) return;
        auto interp_mom = [&](double target_mass) {
          // cumulative ∫ x ν at a given cumulative-mass position
          const auto it = std::upper_bound(s.cmass.begin(), s.cmass.end(), target_mass);
          std::size_t i = static_cast<std::size_t>(it - s.cmass.begin());
          i = std::clamp<std::size_t>(i, 1, s.cmass.size() - 1) - 1;
          const double m0 = s.cmass[i], m1 = s.cmass[i + 1];
          const double f = m1 > m0 ? (target_mass - m0) / (m1 - m0) : 0.5;
          return s.cmom[i] + f * (s.cmom[i + 1] - s.cmom[i]);
        };
        double prev_mass = 0.0, prev_mom = 0.0;
        for (int j = 1; j <= ks; ++j) {
          const double mass_j = s.mass * j / ks;
          const double mom_j = j == ks ? s.cmom.back() : interp_mom(mass_j);
          const double cell_mass = mass_j - prev_mass;
          const double mean = (mom_j - prev_mom) / cell_mass;
          nodes.push_back({sign * mean, cell_mass / lambda_});
          prev_mass = mass_j;
          prev_mom = mom_j;
        }
      };
      int kn = static_cast<int>(std::lround(k * neg_.mass / lambda_));
      if (neg_.mass > 0 && kn == 0) kn = 1;
      if (pos_.mass > 0 && kn == k) kn = k - 1;
      if (pos_.mass == 0) kn = k;
      side_nodes(neg_, -1.0, kn);
      side_nodes(pos_, +1.0, k - kn);
      return nodes;
    }
  }
}

namespace {
std::shared_mutex g_law_mutex;
std::unordered_map<std::uint64_t, std::shared_ptr<const RestrictedLaw>> g_law_cache;
}  // namespace

std::shared_ptr<const RestrictedLaw> restricted_law(const LevyModel& model,
                                                    double eps) {
  const std::uint64_t key = mix64(model.hash() ^ dbits(eps));
  {
    std::shared_lock lk(g_law_mutex);
    const auto it = g_law_cache.find(key);
    if (it != g_law_cache.end()) return it->second;
  }
  auto law = std::make_shared<const RestrictedLaw>(model, eps);
  std::unique_lock lk(g_law_mutex);
  return g_law_cache.try_emplace(key, std::move(law)).first->second;
}

double sample_restricted(const LevyModel& model, double eps, Stream& rng) {
  return restricted_law(model, eps)->sample(rng);
}

std::vector<QuadNode> restricted_quad_nodes(const LevyModel& model, double eps,
                                            int k) {
  return restricted_law(model, eps)->equal_mass_nodes(k);
}

}  // namespace levybsde
