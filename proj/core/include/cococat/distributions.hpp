#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "cococat/random.hpp"

namespace cococat {

struct Exponential {
  double rate;
};

struct Lognormal {
  double mu;
  double sigma;
};

struct Gamma {
  double shape;
  double scale;
};

struct Weibull {
  double shape;
  double scale;
};

class SeverityDistribution;

// Exponentially tilted law: density exp(-theta x) f(x) / L(theta). The base
// is never itself tilted; nested tilts are collapsed on construction.
struct Tilted {
  std::shared_ptr<const SeverityDistribution> base;
  double theta;
  double normalization;  // laplace(*base, theta), computed once
};

// Parametric claim-size law on (0, inf). Immutable value type; copies share
// the (read-only) base of a tilted law.
class SeverityDistribution {
 public:
  using Family = std::variant<Exponential, Lognormal, Gamma, Weibull, Tilted>;

  static SeverityDistribution exponential(double rate);
  static SeverityDistribution lognormal(double mu, double sigma);
  static SeverityDistribution gamma(double shape, double scale);
  static SeverityDistribution weibull(double shape, double scale);

  const Family& family() const { return family_; }
  bool is_tilted() const { return std::holds_alternative<Tilted>(family_); }

  // "lognormal(mu=-1.477, sigma=0.902)" and the like.
  std::string describe() const;

 private:
  explicit SeverityDistribution(Family family) : family_(std::move(family)) {}

  Family family_;

  friend SeverityDistribution exp_tilt(const SeverityDistribution& dist, double theta);
};

// Laplace transform E[exp(-z X)] for z >= 0. Closed form for exponential and
// gamma; log-substituted Gauss-Legendre with panel doubling (relative
// tolerance 1e-10) for lognormal and Weibull.
double laplace(const SeverityDistribution& dist, double z);

double cdf(const SeverityDistribution& dist, double x);
double pdf(const SeverityDistribution& dist, double x);
double quantile(const SeverityDistribution& dist, double q);
double mean(const SeverityDistribution& dist);

// Law with density proportional to exp(-theta x) f(x). theta == 0 returns
// the input unchanged.
SeverityDistribution exp_tilt(const SeverityDistribution& dist, double theta);

double sample(const SeverityDistribution& dist, Philox4x32& engine);

// E[g(X)] under a non-tilted law, by the same log-substituted quadrature the
// Laplace transform uses.
double expectation(const SeverityDistribution& dist, const std::function<double(double)>& g,
                   double rel_tol = 1e-10);

struct Degenerate {
  double p;
};

struct Beta {
  double a;
  double b;
};

// Law of the regional split coefficient P in (0, 1).
class ProportionDistribution {
 public:
  using Family = std::variant<Degenerate, Beta>;

  static ProportionDistribution degenerate(double p);
  static ProportionDistribution beta(double a, double b);

  const Family& family() const { return family_; }
  bool is_degenerate() const { return std::holds_alternative<Degenerate>(family_); }

  double mean() const;
  double cdf(double x) const;
  double pdf(double x) const;  // 0 for the degenerate law
  double sample(Philox4x32& engine) const;
  std::string describe() const;

  // E[g(P)]: exact for the degenerate law; Gauss-Legendre against the beta
  // density otherwise, with `nodes` points on (0, 1), or on each side of
  // `split` when it lies inside (0, 1).
  double expect(const std::function<double(double)>& g, int nodes = 64,
                double split = -1.0) const;

 private:
  explicit ProportionDistribution(Family family) : family_(family) {}

  Family family_;
};

}  // namespace cococat
