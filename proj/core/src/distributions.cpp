#include "cococat/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "cococat/errors.hpp"
#include "cococat/quadrature.hpp"

namespace cococat {
namespace {

constexpr double kLaplaceTol = 1e-10;

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Integration range in log space for each family. The integrand of
// expectation() is g(x(w)) * weight(w) on [lo, hi].
struct LogSubstitution {
  double lo;
  double hi;
  std::function<double(double)> x_of;
  std::function<double(double)> weight;
};

LogSubstitution substitution(const SeverityDistribution& d) {
  return std::visit(
      overloaded{
          [](const Lognormal& p) {
            // x = exp(mu + sigma v), v standard normal.
            const double inv_sqrt_2pi = 0.3989422804014327;
            return LogSubstitution{
                -12.0, 12.0, [p](double v) { return std::exp(p.mu + p.sigma * v); },
                [inv_sqrt_2pi](double v) { return inv_sqrt_2pi * std::exp(-0.5 * v * v); }};
          },
          [](const Weibull& p) {
            // s = (x / scale)^k is unit exponential; s = e^w.
            return LogSubstitution{
                -46.0, std::log(60.0),
                [p](double w) { return p.scale * std::exp(w / p.shape); },
                [](double w) { return std::exp(w - std::exp(w)); }};
          },
          [](const Gamma& p) {
            // x = scale * e^w, e^w ~ Gamma(k, 1).
            const double lg = std::lgamma(p.shape);
            const double lo = (std::log(1e-22) + std::lgamma(p.shape + 1.0)) / p.shape;
            const double hi = std::log(p.shape + 60.0 + 12.0 * std::sqrt(p.shape));
            return LogSubstitution{
                lo, hi, [p](double w) { return p.scale * std::exp(w); },
                [p, lg](double w) { return std::exp(p.shape * w - std::exp(w) - lg); }};
          },
          [](const Exponential& p) {
            const double lo = std::log(1e-22);
            return LogSubstitution{lo, std::log(60.0),
                                   [p](double w) { return std::exp(w) / p.rate; },
                                   [](double w) { return std::exp(w - std::exp(w)); }};
          },
          [](const Tilted&) -> LogSubstitution {
            throw ParameterError("log substitution is defined for base laws only");
          }},
      d.family());
}

const SeverityDistribution& base_of(const Tilted& t) { return *t.base; }

double base_cdf(const SeverityDistribution& d, double x) {
  if (x <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [x](const Exponential& p) { return -std::expm1(-p.rate * x); },
          [x](const Lognormal& p) {
            return boost::math::cdf(boost::math::lognormal_distribution<>(p.mu, p.sigma), x);
          },
          [x](const Gamma& p) { return boost::math::gamma_p(p.shape, x / p.scale); },
          [x](const Weibull& p) { return -std::expm1(-std::pow(x / p.scale, p.shape)); },
          [](const Tilted&) -> double { throw ParameterError("unexpected tilted base"); }},
      d.family());
}

double base_quantile(const SeverityDistribution& d, double q) {
  return std::visit(
      overloaded{
          [q](const Exponential& p) { return -std::log1p(-q) / p.rate; },
          [q](const Lognormal& p) {
            return boost::math::quantile(boost::math::lognormal_distribution<>(p.mu, p.sigma), q);
          },
          [q](const Gamma& p) { return p.scale * boost::math::gamma_p_inv(p.shape, q); },
          [q](const Weibull& p) { return p.scale * std::pow(-std::log1p(-q), 1.0 / p.shape); },
          [](const Tilted&) -> double { throw ParameterError("unexpected tilted base"); }},
      d.family());
}

// Upper quantile x with P(X > x) = tail, computed from the complement so that
// it stays accurate for tiny tails.
double base_upper_quantile(const SeverityDistribution& d, double tail) {
  return std::visit(
      overloaded{
          [tail](const Exponential& p) { return -std::log(tail) / p.rate; },
          [tail](const Lognormal& p) {
            return boost::math::quantile(
                boost::math::complement(boost::math::lognormal_distribution<>(p.mu, p.sigma), tail));
          },
          [tail](const Gamma& p) { return p.scale * boost::math::gamma_q_inv(p.shape, tail); },
          [tail](const Weibull& p) { return p.scale * std::pow(-std::log(tail), 1.0 / p.shape); },
          [](const Tilted&) -> double { throw ParameterError("unexpected tilted base"); }},
      d.family());
}

double quadrature_laplace(const SeverityDistribution& d, double z) {
  const auto sub = substitution(d);
  auto f = [&](double w) { return std::exp(-z * sub.x_of(w)) * sub.weight(w); };
  const auto r = integrate_panels(f, sub.lo, sub.hi, kLaplaceTol, 20, 8192);
  if (!r.converged) {
    throw NumericalError("Laplace transform quadrature did not converge", r.error);
  }
  return r.value;
}

double base_laplace(const SeverityDistribution& d, double z) {
  if (z == 0.0) return 1.0;
  return std::visit(overloaded{[z](const Exponential& p) { return p.rate / (p.rate + z); },
                               [z](const Gamma& p) { return std::pow(1.0 + p.scale * z, -p.shape); },
                               [&d, z](const auto&) { return quadrature_laplace(d, z); }},
                    d.family());
}

}  // namespace

SeverityDistribution SeverityDistribution::exponential(double rate) {
  require(positive_finite(rate), "exponential rate must be positive and finite");
  return SeverityDistribution(Exponential{rate});
}

SeverityDistribution SeverityDistribution::lognormal(double mu, double sigma) {
  require(std::isfinite(mu), "lognormal mu must be finite");
  require(positive_finite(sigma), "lognormal sigma must be positive and finite");
  return SeverityDistribution(Lognormal{mu, sigma});
}

SeverityDistribution SeverityDistribution::gamma(double shape, double scale) {
  require(positive_finite(shape), "gamma shape must be positive and finite");
  require(positive_finite(scale), "gamma scale must be positive and finite");
  return SeverityDistribution(Gamma{shape, scale});
}

SeverityDistribution SeverityDistribution::weibull(double shape, double scale) {
  require(positive_finite(shape), "weibull shape must be positive and finite");
  require(positive_finite(scale), "weibull scale must be positive and finite");
  return SeverityDistribution(Weibull{shape, scale});
}

std::string SeverityDistribution::describe() const {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{[&](const Exponential& p) { os << "exponential(rate=" << p.rate << ")"; },
                        [&](const Lognormal& p) {
                          os << "lognormal(mu=" << p.mu << ", sigma=" << p.sigma << ")";
                        },
                        [&](const Gamma& p) {
                          os << "gamma(shape=" << p.shape << ", scale=" << p.scale << ")";
                        },
                        [&](const Weibull& p) {
                          os << "weibull(shape=" << p.shape << ", scale=" << p.scale << ")";
                        },
                        [&](const Tilted& t) {
                          os << "tilted(" << t.base->describe() << ", theta=" << t.theta << ")";
                        }},
             family_);
  return os.str();
}

double laplace(const SeverityDistribution& dist, double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw ParameterError("Laplace argument must be >= 0");
  if (const auto* t = std::get_if<Tilted>(&dist.family())) {
    return base_laplace(base_of(*t), z + t->theta) / t->normalization;
  }
  return base_laplace(dist, z);
}

SeverityDistribution exp_tilt(const SeverityDistribution& dist, double theta) {
  if (!std::isfinite(theta)) throw ParameterError("tilt parameter must be finite");
  if (theta == 0.0) return dist;
  std::shared_ptr<const SeverityDistribution> base;
  double total = theta;
  if (const auto* t = std::get_if<Tilted>(&dist.family())) {
    base = t->base;
    total += t->theta;
  } else {
    base = std::make_shared<const SeverityDistribution>(dist);
  }
  if (total == 0.0) return *base;
  if (total < 0.0) throw ParameterError("negative exponential tilts are not supported");
  // Closed-form families stay in their family.
  if (const auto* e = std::get_if<Exponential>(&base->family())) {
    return SeverityDistribution::exponential(e->rate + total);
  }
  if (const auto* g = std::get_if<Gamma>(&base->family())) {
    return SeverityDistribution::gamma(g->shape, g->scale / (1.0 + total * g->scale));
  }
  const double norm = base_laplace(*base, total);
  return SeverityDistribution(Tilted{base, total, norm});
}

double pdf(const SeverityDistribution& dist, double x) {
  if (x <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [x](const Exponential& p) { return p.rate * std::exp(-p.rate * x); },
          [x](const Lognormal& p) {
            return boost::math::pdf(boost::math::lognormal_distribution<>(p.mu, p.sigma), x);
          },
          [x](const Gamma& p) {
            return boost::math::pdf(boost::math::gamma_distribution<>(p.shape, p.scale), x);
          },
          [x](const Weibull& p) {
            return boost::math::pdf(boost::math::weibull_distribution<>(p.shape, p.scale), x);
          },
          [x](const Tilted& t) { return std::exp(-t.theta * x) * pdf(*t.base, x) / t.normalization; }},
      dist.family());
}

double cdf(const SeverityDistribution& dist, double x) {
  if (std::isnan(x)) throw ParameterError("cdf argument is NaN");
  const auto* t = std::get_if<Tilted>(&dist.family());
  if (!t) return base_cdf(dist, x);
  if (x <= 0.0) return 0.0;
  // Integration by parts keeps the integrand bounded:
  // int_0^x e^{-ty} dF(y) = e^{-tx} F(x) + t int_0^x e^{-ty} F(y) dy.
  const double cap = base_upper_quantile(*t->base, 1e-18);
  const double xe = std::min(x, cap);
  const double theta = t->theta;
  auto g = [&](double y) { return std::exp(-theta * y) * base_cdf(*t->base, y); };
  // Split at the base median so the adaptive rule sees the feature scale.
  const double med = std::min(base_quantile(*t->base, 0.5), xe);
  double integral = 0.0;
  double err = 0.0;
  using boost::math::quadrature::gauss_kronrod;
  if (med > 0.0) integral += gauss_kronrod<double, 31>::integrate(g, 0.0, med, 15, 1e-13, &err);
  if (xe > med) integral += gauss_kronrod<double, 31>::integrate(g, med, xe, 15, 1e-13, &err);
  const double value = (std::exp(-theta * xe) * base_cdf(*t->base, xe) + theta * integral) /
                       t->normalization;
  return std::clamp(value, 0.0, 1.0);
}

double quantile(const SeverityDistribution& dist, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("quantile level must lie in (0, 1)");
  const auto* t = std::get_if<Tilted>(&dist.family());
  if (!t) return base_quantile(dist, q);
  // Tilting by e^{-theta x} is stochastically decreasing, so the base
  // quantile brackets the root from above.
  double hi = base_quantile(*t->base, q);
  double lo = 0.0;
  auto f = [&](double x) { return cdf(dist, x) - q; };
  while (f(hi) < 0.0) hi *= 2.0;  // guards against quadrature round-off only
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, -q, f(hi), tol, iters);
  return 0.5 * (a + b);
}

double mean(const SeverityDistribution& dist) {
  return std::visit(
      overloaded{[](const Exponential& p) { return 1.0 / p.rate; },
                 [](const Lognormal& p) { return std::exp(p.mu + 0.5 * p.sigma * p.sigma); },
                 [](const Gamma& p) { return p.shape * p.scale; },
                 [](const Weibull& p) { return p.scale * std::tgamma(1.0 + 1.0 / p.shape); },
                 [](const Tilted& t) {
                   const double th = t.theta;
                   return expectation(*t.base, [th](double x) { return x * std::exp(-th * x); }) /
                          t.normalization;
                 }},
      dist.family());
}

double expectation(const SeverityDistribution& dist, const std::function<double(double)>& g,
                   double rel_tol) {
  const auto sub = substitution(dist);
  auto f = [&](double w) { return g(sub.x_of(w)) * sub.weight(w); };
  const auto r = integrate_panels(f, sub.lo, sub.hi, rel_tol, 20, 8192);
  if (!r.converged) throw NumericalError("expectation quadrature did not converge", r.error);
  return r.value;
}

double sample(const SeverityDistribution& dist, Philox4x32& engine) {
  return std::visit(
      overloaded{
          [&](const Exponential& p) { return -std::log(uniform_open(engine)) / p.rate; },
          [&](const Lognormal& p) {
            std::normal_distribution<double> n(p.mu, p.sigma);
            return std::exp(n(engine));
          },
          [&](const Gamma& p) {
            std::gamma_distribution<double> g(p.shape, p.scale);
            return g(engine);
          },
          [&](const Weibull& p) {
            return p.scale * std::pow(-std::log(uniform_open(engine)), 1.0 / p.shape);
          },
          [&](const Tilted& t) {
            // Accept a base draw with probability e^{-theta x}.
            for (;;) {
              const double x = sample(*t.base, engine);
              if (uniform_open(engine) <= std::exp(-t.theta * x)) return x;
            }
          }},
      dist.family());
}

ProportionDistribution ProportionDistribution::degenerate(double p) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "degenerate proportion must lie in (0, 1)");
  return ProportionDistribution(Degenerate{p});
}

ProportionDistribution ProportionDistribution::beta(double a, double b) {
  require(positive_finite(a) && positive_finite(b), "beta parameters must be positive and finite");
  return ProportionDistribution(Beta{a, b});
}

double ProportionDistribution::mean() const {
  return std::visit(overloaded{[](const Degenerate& d) { return d.p; },
                               [](const Beta& b) { return b.a / (b.a + b.b); }},
                    family_);
}

double ProportionDistribution::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::visit(overloaded{[x](const Degenerate& d) { return x >= d.p ? 1.0 : 0.0; },
                               [x](const Beta& b) { return boost::math::ibeta(b.a, b.b, x); }},
                    family_);
}

double ProportionDistribution::pdf(double x) const {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::visit(overloaded{[](const Degenerate&) { return 0.0; },
                               [x](const Beta& b) { return boost::math::ibeta_derivative(b.a, b.b, x); }},
                    family_);
}

double ProportionDistribution::sample(Philox4x32& engine) const {
  return std::visit(overloaded{[](const Degenerate& d) { return d.p; },
                               [&](const Beta& b) {
                                 std::gamma_distribution<double> ga(b.a, 1.0);
                                 std::gamma_distribution<double> gb(b.b, 1.0);
                                 const double x = ga(engine);
                                 const double y = gb(engine);
                                 return x / (x + y);
                               }},
                    family_);
}

std::string ProportionDistribution::describe() const {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{[&](const Degenerate& d) { os << "degenerate(p=" << d.p << ")"; },
                        [&](const Beta& b) { os << "beta(a=" << b.a << ", b=" << b.b << ")"; }},
             family_);
  return os.str();
}

double ProportionDistribution::expect(const std::function<double(double)>& g, int nodes,
                                      double split) const {
  if (const auto* d = std::get_if<Degenerate>(&family_)) return g(d->p);
  const auto& b = std::get<Beta>(family_);
  auto piece = [&](double lo, double hi) {
    double s = 0.0;
    for (const auto& q : gauss_legendre_points(nodes, lo, hi)) {
      s += q.w * boost::math::ibeta_derivative(b.a, b.b, q.x) * g(q.x);
    }
    return s;
  };
  if (split > 0.0 && split < 1.0) return piece(0.0, split) + piece(split, 1.0);
  return piece(0.0, 1.0);
}

}  // namespace cococat
