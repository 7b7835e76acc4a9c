#include "levybsde/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace levybsde {

namespace {
double delta_weight(double z, double beta_bar) {
  const double a = std::pow(std::fabs(z), beta_bar);
  return a < 1.0 ? a : 1.0;
}

double dist_to_nearest_integer(double s) {
  const double f = s - std::floor(s);
  return f < 0.5 ? f : 1.0 - f;
}
}  // namespace

GeneratorSpec GeneratorSpec::zero() { return {}; }

GeneratorSpec GeneratorSpec::linear(double a, double b) {
  GeneratorSpec g;
  g.kind = Kind::LINEAR;
  g.a = a;
  g.b = b;
  g.lip = std::fabs(a);
  g.name = "linear";
  return g;
}

GeneratorSpec GeneratorSpec::integral_linear_yz(double cy, double cz,
                                                double ctilde, double beta_bar) {
  if (!(beta_bar > 0))
    throw std::domain_error("integral generator: beta_bar must be > 0");
  GeneratorSpec g;
  g.kind = Kind::INTEGRAL;
  g.phi_cy = cy;
  g.phi_cz = cz;
  g.phi_ctilde = ctilde;
  g.beta_bar = beta_bar;
  g.y_only = false;
  g.name = "integral_linear_yz";
  return g;
}

GeneratorSpec GeneratorSpec::time_discretized(GeneratorSpec inner, int m) {
  if (m < 1) throw std::domain_error("time_discretized: steps must be >= 1");
  GeneratorSpec g;
  g.kind = Kind::TIME_DISCRETIZED;
  g.steps = m;
  g.lip = inner.lip;
  g.holder_alpha = inner.holder_alpha;
  g.y_only = inner.y_only;
  g.name = "time_discretized(" + inner.name + ")";
  g.inner = std::make_shared<const GeneratorSpec>(std::move(inner));
  return g;
}

GeneratorSpec GeneratorSpec::custom_fn(
    std::function<double(double, double, const std::function<double(double)>&)>
        f,
    double lip, double holder_alpha, bool y_only, std::string name) {
  if (lip < 0) throw std::domain_error("custom generator: negative Lipschitz constant");
  GeneratorSpec g;
  g.kind = Kind::CUSTOM;
  g.custom = std::move(f);
  g.lip = lip;
  g.holder_alpha = holder_alpha;
  g.y_only = y_only;
  g.name = std::move(name);
  return g;
}

GeneratorSpec GeneratorSpec::hoelder(double amplitude, double alpha, int terms) {
  if (!(alpha > 0) || alpha > 1)
    throw std::domain_error("hoelder generator: alpha must be in (0, 1]");
  if (terms < 1) throw std::domain_error("hoelder generator: terms must be >= 1");
  auto f = [amplitude, alpha, terms](double t, double, const std::function<double(double)>&) {
    // Per-term golden-ratio phases keep every term active at dyadic times;
    // without them dist(2^k t, Z) vanishes identically on coarse binary grids
    // once 2^k exceeds the grid resolution, flattening the sum exactly where
    // the solvers sample it. The phase shift does not change the Hoelder class.
    const double golden = 0.6180339887498949;
    double s = 0;
    double scale = 1, freq = 1, phase = 0;
    const double decay = std::pow(2.0, -alpha);
    for (int k = 0; k < terms; ++k) {
      s += scale * dist_to_nearest_integer(freq * t + phase);
      scale *= decay;
      freq *= 2;
      phase += golden;
      phase -= std::floor(phase);
    }
    return amplitude * s;
  };
  GeneratorSpec g = custom_fn(std::move(f), 0.0, alpha, true, "hoelder");
  g.custom_kind = "hoelder";
  g.c1 = amplitude;
  g.c2 = alpha;
  g.c3 = terms;
  return g;
}

GeneratorSpec GeneratorSpec::ramp(double slope) {
  auto f = [slope](double t, double, const std::function<double(double)>&) {
    return slope * t;
  };
  GeneratorSpec g = custom_fn(std::move(f), 0.0, 1.0, true, "ramp");
  g.custom_kind = "ramp";
  g.c1 = slope;
  return g;
}

double evaluate_generator(const GeneratorSpec& spec, const GeneratorContext& ctx,
                          double t, double y,
                          const std::function<double(double)>& U) {
  switch (spec.kind) {
    case GeneratorSpec::Kind::ZERO:
      return 0.0;
    case GeneratorSpec::Kind::LINEAR:
      return spec.a * y + spec.b;
    case GeneratorSpec::Kind::INTEGRAL: {
      if (!ctx.nodes)
        throw std::logic_error("integral generator needs quadrature nodes");
      double s = 0;
      for (const auto& nd : *ctx.nodes) {
        const double v = spec.phi_cy * y + spec.phi_cz * U(nd.z);
        s += nd.w * v * delta_weight(nd.z, spec.beta_bar);
      }
      return ctx.lambda * s;
    }
    case GeneratorSpec::Kind::TIME_DISCRETIZED: {
      const double step = ctx.T / spec.steps;
      const double frozen = std::floor(t / step) * step;
      return evaluate_generator(*spec.inner, ctx, std::min(frozen, ctx.T), y, U);
    }
    case GeneratorSpec::Kind::CUSTOM:
      return spec.custom(t, y, U);
  }
  return 0.0;
}

double generator_lipschitz(const GeneratorSpec& spec, const GeneratorContext& ctx) {
  switch (spec.kind) {
    case GeneratorSpec::Kind::ZERO:
      return 0.0;
    case GeneratorSpec::Kind::LINEAR:
      return std::fabs(spec.a);
    case GeneratorSpec::Kind::INTEGRAL: {
      if (!ctx.nodes)
        throw std::logic_error("integral generator needs quadrature nodes");
      double d1 = 0, d2 = 0;
      for (const auto& nd : *ctx.nodes) {
        const double d = delta_weight(nd.z, spec.beta_bar);
        d1 += nd.w * d;
        d2 += nd.w * d * d;
      }
      return std::fabs(spec.phi_cy) * ctx.lambda * d1 +
             std::fabs(spec.phi_cz) * std::sqrt(ctx.lambda * d2);
    }
    case GeneratorSpec::Kind::TIME_DISCRETIZED:
      return generator_lipschitz(*spec.inner, ctx);
    case GeneratorSpec::Kind::CUSTOM:
      return spec.lip;
  }
  return 0.0;
}

bool generator_y_only(const GeneratorSpec& spec) {
  if (spec.kind == GeneratorSpec::Kind::TIME_DISCRETIZED)
    return generator_y_only(*spec.inner);
  return spec.y_only;
}

double generator_gap_cn(const LevyModel& model, const GeneratorSpec& spec,
                        double n, double T) {
  switch (spec.kind) {
    case GeneratorSpec::Kind::INTEGRAL: {
      if (!(spec.beta_bar > bg_index(model)))
        throw std::domain_error(
            "integral generator: beta_bar must exceed the activity index");
      const Moment m1 = partial_moment(model, spec.beta_bar, 1.0 / n);
      const Moment m2 = partial_moment(model, 2.0 * spec.beta_bar, 1.0 / n);
      if (m1.infinite || m2.infinite)
        throw std::domain_error("integral generator: gap moment diverges");
      return std::max(m1.value, std::sqrt(m2.value));
    }
    case GeneratorSpec::Kind::TIME_DISCRETIZED: {
      const GeneratorSpec& in = *spec.inner;
      if (in.kind == GeneratorSpec::Kind::ZERO ||
          in.kind == GeneratorSpec::Kind::LINEAR)
        return 0.0;  // time-constant driver: freezing changes nothing
      return std::pow(T / spec.steps, in.holder_alpha);
    }
    default:
      throw std::domain_error("generator gap defined only for integral and "
                              "time-discretized drivers");
  }
}

}  // namespace levybsde
