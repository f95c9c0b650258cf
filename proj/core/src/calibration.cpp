#include "cococat/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/inverse_gaussian.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "cococat/errors.hpp"
#include "cococat/random.hpp"

namespace cococat {
namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

void check_samples(std::span<const double> x) {
  if (x.size() < 2) throw FitError("severity fit needs at least two samples");
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw FitError("severity samples must be positive and finite");
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw FitError("degenerate sample: all values are equal");
}

FittedLaw fit_lognormal(std::span<const double> x) {
  double mu = 0.0;
  for (double v : x) mu += std::log(v);
  mu /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (std::log(v) - mu) * (std::log(v) - mu);
  const double sigma = std::sqrt(var / static_cast<double>(x.size()));
  if (!(sigma > 0.0)) throw FitError("degenerate lognormal fit: sigma = 0");
  return {SeverityFamily::lognormal, {{"mu", mu}, {"sigma", sigma}}};
}

FittedLaw fit_gamma(std::span<const double> x) {
  const double m = mean_of(x);
  double ml = 0.0;
  for (double v : x) ml += std::log(v);
  ml /= static_cast<double>(x.size());
  const double s = std::log(m) - ml;
  if (!(s > 0.0)) throw FitError("degenerate gamma fit");
  // Closed-form start (Minka), then Newton on log k - digamma(k) = s.
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = 0.5 * k;
    if (std::abs(next - k) < 1e-14 * k) {
      k = next;
      break;
    }
    k = next;
  }
  return {SeverityFamily::gamma, {{"shape", k}, {"scale", m / k}}};
}

FittedLaw fit_weibull(std::span<const double> x) {
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> z, lz;
  for (double v : x) {
    z.push_back(v / top);
    lz.push_back(std::log(v / top));
  }
  const double mean_log = mean_of(lz);
  // Profile score in the shape; increasing in k.
  auto score = [&](double k) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double p = std::pow(z[i], k);
      a += p * lz[i];
      b += p;
    }
    return a / b - 1.0 / k - mean_log;
  };
  double lo = 1e-3, hi = 1.0;
  while (score(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e4) throw FitError("weibull shape diverges");
  }
  while (score(lo) > 0.0) {
    lo *= 0.5;
    if (lo < 1e-8) throw FitError("weibull shape collapses");
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(score, lo, hi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  const double k = 0.5 * (r.first + r.second);
  double mk = 0.0;
  for (double v : z) mk += std::pow(v, k);
  mk /= static_cast<double>(z.size());
  return {SeverityFamily::weibull, {{"shape", k}, {"scale", top * std::pow(mk, 1.0 / k)}}};
}

// Lomax (Pareto II) with shape a and scale s; for fixed s the shape MLE is
// n / sum log(1 + x/s), leaving a one-dimensional profile in log s.
FittedLaw fit_pareto(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  auto shape_at = [&](double s) {
    double t = 0.0;
    for (double v : x) t += std::log1p(v / s);
    return n / t;
  };
  auto neg_profile = [&](double log_s) {
    const double s = std::exp(log_s);
    const double a = shape_at(s);
    double t = 0.0;
    for (double v : x) t += std::log1p(v / s);
    return -(n * std::log(a) - n * log_s - (a + 1.0) * t);
  };
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  std::uintmax_t iters = 500;
  const auto best = boost::math::tools::brent_find_minima(neg_profile, std::log(*lo) - 10.0,
                                                          std::log(*hi) + 10.0, 50, iters);
  const double s = std::exp(best.first);
  return {SeverityFamily::pareto, {{"shape", shape_at(s)}, {"scale", s}}};
}

FittedLaw fit_inverse_gaussian(std::span<const double> x) {
  const double m = mean_of(x);
  double t = 0.0;
  for (double v : x) t += 1.0 / v - 1.0 / m;
  if (!(t > 0.0)) throw FitError("degenerate inverse Gaussian fit");
  return {SeverityFamily::inverse_gaussian,
          {{"mean", m}, {"shape", static_cast<double>(x.size()) / t}}};
}

double gev_log_pdf(double x, double mu, double sigma, double xi) {
  const double z = (x - mu) / sigma;
  if (std::abs(xi) < 1e-12) return -std::log(sigma) - z - std::exp(-z);
  const double t = 1.0 + xi * z;
  if (!(t > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lt = std::log(t);
  return -std::log(sigma) - (1.0 / xi + 1.0) * lt - std::exp(-lt / xi);
}

struct GevData {
  std::span<const double> x;
};

double gev_objective(const gsl_vector* v, void* params) {
  const auto* d = static_cast<const GevData*>(params);
  const double mu = gsl_vector_get(v, 0);
  const double sigma = std::exp(gsl_vector_get(v, 1));
  const double xi = gsl_vector_get(v, 2);
  double ll = 0.0;
  for (double x : d->x) {
    const double l = gev_log_pdf(x, mu, sigma, xi);
    if (!std::isfinite(l)) return 1e300;
    ll += l;
  }
  return -ll;
}

FittedLaw fit_gev(std::span<const double> x) {
  const double m = mean_of(x);
  double var = 0.0;
  for (double v : x) var += (v - m) * (v - m);
  const double sd = std::sqrt(var / static_cast<double>(x.size()));
  const double sigma0 = std::sqrt(6.0) * sd / 3.141592653589793;
  const double mu0 = m - 0.5772156649015329 * sigma0;

  gsl_set_error_handler_off();
  GevData data{x};
  gsl_multimin_function f{&gev_objective, 3, &data};
  gsl_vector* start = gsl_vector_alloc(3);
  gsl_vector* step = gsl_vector_alloc(3);
  gsl_vector_set(start, 0, mu0);
  gsl_vector_set(start, 1, std::log(sigma0));
  gsl_vector_set(start, 2, 0.1);
  gsl_vector_set(step, 0, 0.5 * sigma0);
  gsl_vector_set(step, 1, 0.5);
  gsl_vector_set(step, 2, 0.2);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
  gsl_multimin_fminimizer_set(s, &f, start, step);
  int status = GSL_CONTINUE;
  for (int it = 0; it < 20000 && status == GSL_CONTINUE; ++it) {
    if (gsl_multimin_fminimizer_iterate(s)) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10);
  }
  const double mu = gsl_vector_get(s->x, 0);
  const double sigma = std::exp(gsl_vector_get(s->x, 1));
  const double xi = gsl_vector_get(s->x, 2);
  const double value = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(start);
  gsl_vector_free(step);
  if (!(value < 1e299)) throw FitError("GEV likelihood maximisation failed");
  return {SeverityFamily::gev, {{"mu", mu}, {"sigma", sigma}, {"xi", xi}}};
}

FittedLaw fit_law(std::span<const double> x, SeverityFamily family) {
  switch (family) {
    case SeverityFamily::lognormal: return fit_lognormal(x);
    case SeverityFamily::gamma: return fit_gamma(x);
    case SeverityFamily::weibull: return fit_weibull(x);
    case SeverityFamily::pareto: return fit_pareto(x);
    case SeverityFamily::inverse_gaussian: return fit_inverse_gaussian(x);
    case SeverityFamily::gev: return fit_gev(x);
  }
  throw FitError("unknown family");
}

double log_likelihood(std::span<const double> x, const FittedLaw& law) {
  double ll = 0.0;
  for (double v : x) {
    if (law.family == SeverityFamily::gev) {
      ll += gev_log_pdf(v, law.parameter("mu"), law.parameter("sigma"), law.parameter("xi"));
    } else {
      ll += std::log(law.pdf(v));
    }
  }
  return ll;
}

}  // namespace

std::string to_string(SeverityFamily f) {
  switch (f) {
    case SeverityFamily::lognormal: return "lognormal";
    case SeverityFamily::gamma: return "gamma";
    case SeverityFamily::weibull: return "weibull";
    case SeverityFamily::pareto: return "pareto";
    case SeverityFamily::inverse_gaussian: return "inverse_gaussian";
    case SeverityFamily::gev: return "gev";
  }
  return "unknown";
}

SeverityFamily parse_severity_family(const std::string& s) {
  for (auto f : {SeverityFamily::lognormal, SeverityFamily::gamma, SeverityFamily::weibull,
                 SeverityFamily::pareto, SeverityFamily::inverse_gaussian, SeverityFamily::gev}) {
    if (to_string(f) == s) return f;
  }
  throw ConfigurationError("unknown severity family '" + s + "'");
}

bool pricing_admissible(SeverityFamily f) {
  return f == SeverityFamily::lognormal || f == SeverityFamily::gamma ||
         f == SeverityFamily::weibull;
}

double FittedLaw::parameter(const std::string& name) const {
  for (const auto& [k, v] : parameters) {
    if (k == name) return v;
  }
  throw ConfigurationError("fitted law has no parameter '" + name + "'");
}

SeverityDistribution FittedLaw::to_severity() const {
  switch (family) {
    case SeverityFamily::lognormal:
      return SeverityDistribution::lognormal(parameter("mu"), parameter("sigma"));
    case SeverityFamily::gamma:
      return SeverityDistribution::gamma(parameter("shape"), parameter("scale"));
    case SeverityFamily::weibull:
      return SeverityDistribution::weibull(parameter("shape"), parameter("scale"));
    default:
      throw ConfigurationError(to_string(family) +
                               " severities are fit-and-report only and cannot be priced");
  }
}

double FittedLaw::cdf(double x) const {
  if (pricing_admissible(family)) return cococat::cdf(to_severity(), x);
  if (family == SeverityFamily::pareto) {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-parameter("shape") * std::log1p(x / parameter("scale")));
  }
  if (family == SeverityFamily::inverse_gaussian) {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(
        boost::math::inverse_gaussian_distribution<>(parameter("mean"), parameter("shape")), x);
  }
  const double mu = parameter("mu"), sigma = parameter("sigma"), xi = parameter("xi");
  const double z = (x - mu) / sigma;
  if (std::abs(xi) < 1e-12) return std::exp(-std::exp(-z));
  const double t = 1.0 + xi * z;
  if (t <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(t, -1.0 / xi));
}

double FittedLaw::pdf(double x) const {
  if (pricing_admissible(family)) return cococat::pdf(to_severity(), x);
  if (family == SeverityFamily::pareto) {
    if (x <= 0.0) return 0.0;
    const double a = parameter("shape"), s = parameter("scale");
    return a / s * std::pow(1.0 + x / s, -a - 1.0);
  }
  if (family == SeverityFamily::inverse_gaussian) {
    if (x <= 0.0) return 0.0;
    return boost::math::pdf(
        boost::math::inverse_gaussian_distribution<>(parameter("mean"), parameter("shape")), x);
  }
  return std::exp(gev_log_pdf(x, parameter("mu"), parameter("sigma"), parameter("xi")));
}

double FittedLaw::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("quantile level must lie in (0, 1)");
  if (pricing_admissible(family)) return cococat::quantile(to_severity(), q);
  if (family == SeverityFamily::pareto) {
    return parameter("scale") * std::expm1(-std::log1p(-q) / parameter("shape"));
  }
  if (family == SeverityFamily::inverse_gaussian) {
    return boost::math::quantile(
        boost::math::inverse_gaussian_distribution<>(parameter("mean"), parameter("shape")), q);
  }
  const double mu = parameter("mu"), sigma = parameter("sigma"), xi = parameter("xi");
  if (std::abs(xi) < 1e-12) return mu - sigma * std::log(-std::log(q));
  return mu + sigma * (std::pow(-std::log(q), -xi) - 1.0) / xi;
}

FitReport fit_severity(std::span<const double> samples, SeverityFamily family,
                       const FitOptions& options) {
  check_samples(samples);
  FitReport r;
  r.law = fit_law(samples, family);
  r.samples = samples.size();
  r.log_likelihood = log_likelihood(samples, r.law);
  r.gof = gof_statistics(samples, [&](double x) { return r.law.cdf(x); });
  if (options.bootstrap_replicates > 0) {
    // Parametric bootstrap: refit on samples drawn from the fitted law so the
    // estimation effect is part of the null distribution.
    std::size_t ks = 0, cvm = 0, ad = 0, used = 0;
    std::vector<double> draw(samples.size());
    for (int b = 0; b < options.bootstrap_replicates; ++b) {
      Philox4x32 eng(options.seed, static_cast<std::uint64_t>(b));
      for (double& v : draw) v = r.law.quantile(uniform_open(eng));
      try {
        check_samples(draw);
        const auto law = fit_law(draw, family);
        const auto g = gof_statistics(draw, [&](double x) { return law.cdf(x); });
        ks += g.ks >= r.gof.ks;
        cvm += g.cvm >= r.gof.cvm;
        ad += g.ad >= r.gof.ad;
        ++used;
      } catch (const Error&) {
        continue;
      }
    }
    const double d = static_cast<double>(used + 1);
    r.p_values = GofStatistics{(ks + 1.0) / d, (cvm + 1.0) / d, (ad + 1.0) / d};
  }
  return r;
}

std::vector<FitReport> fit_all_families(std::span<const double> samples, const FitOptions& options) {
  check_samples(samples);
  std::vector<FitReport> out;
  for (auto f : {SeverityFamily::lognormal, SeverityFamily::pareto, SeverityFamily::gamma,
                 SeverityFamily::weibull, SeverityFamily::inverse_gaussian, SeverityFamily::gev}) {
    try {
      out.push_back(fit_severity(samples, f, options));
    } catch (const Error&) {
      // A family that cannot be fitted simply drops out of the comparison.
    }
  }
  return out;
}

const FitReport& select_best(const std::vector<FitReport>& reports, SelectionCriterion criterion) {
  const FitReport* best = nullptr;
  auto stat = [criterion](const FitReport& r) {
    switch (criterion) {
      case SelectionCriterion::ks: return r.gof.ks;
      case SelectionCriterion::cvm: return r.gof.cvm;
      case SelectionCriterion::ad: return r.gof.ad;
    }
    return r.gof.ks;
  };
  for (const auto& r : reports) {
    if (!pricing_admissible(r.law.family)) continue;
    if (!best || stat(r) < stat(*best)) best = &r;
  }
  if (!best) throw FitError("no pricing-admissible severity fit available");
  return *best;
}

IntensityFit estimate_hpp_intensity(std::span<const double> t) {
  if (t.empty()) throw FitError("intensity fit needs at least one event");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    num += t[k] * static_cast<double>(k + 1);
    den += t[k] * t[k];
  }
  if (!(den > 0.0)) throw FitError("all events at time zero");
  IntensityFit f;
  f.rate = num / den;
  f.points = t.size();
  std::size_t pct = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double e = f.rate * t[k] - n;
    f.mse += e * e;
    f.mae += std::abs(e);
    if (n > 0.0) {
      f.mape += std::abs(e) / n;
      ++pct;
    }
  }
  f.mse /= static_cast<double>(t.size());
  f.mae /= static_cast<double>(t.size());
  f.mape = pct ? 100.0 * f.mape / static_cast<double>(pct) : 0.0;
  return f;
}

IntensityFit estimate_hpp_intensity(const LossDataset& data) {
  if (!(data.years() > 0.0)) throw FitError("observation window must have positive length");
  return estimate_hpp_intensity(data.event_times());
}

std::pair<double, double> hpp_bootstrap_interval(double rate, double horizon, int replicates,
                                                 std::uint64_t seed, double level) {
  if (!(rate > 0.0) || !(horizon > 0.0) || replicates < 10) {
    throw ConfigurationError("bootstrap needs a positive rate, horizon and >= 10 replicates");
  }
  std::vector<double> est;
  std::vector<double> times;
  for (int b = 0; b < replicates; ++b) {
    Philox4x32 eng(seed, static_cast<std::uint64_t>(b));
    times.clear();
    double t = 0.0;
    for (;;) {
      t += -std::log(uniform_open(eng)) / rate;
      if (t > horizon) break;
      times.push_back(t);
    }
    est.push_back(times.empty() ? 0.0 : estimate_hpp_intensity(times).rate);
  }
  std::sort(est.begin(), est.end());
  const double tail = 0.5 * (1.0 - level);
  auto pick = [&](double q) {
    const auto i = static_cast<std::size_t>(std::clamp(q * (est.size() - 1), 0.0, est.size() - 1.0));
    return est[i];
  };
  return {pick(tail), pick(1.0 - tail)};
}

ProportionFit fit_beta(std::span<const double> p) {
  ProportionFit f;
  std::vector<double> v;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) throw FitError("proportions must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) {
      ++f.excluded;
      continue;
    }
    v.push_back(x);
  }
  f.used = v.size();
  if (v.size() < 2) throw FitError("beta fit needs at least two interior proportions");
  const double m = mean_of(v);
  double var = 0.0, s1 = 0.0, s2 = 0.0;
  for (double x : v) {
    var += (x - m) * (x - m);
    s1 += std::log(x);
    s2 += std::log1p(-x);
  }
  const double n = static_cast<double>(v.size());
  var /= n;
  s1 /= n;
  s2 /= n;
  if (!(var > 0.0)) throw FitError("degenerate proportions: zero variance, beta MLE diverges");
  const double common = m * (1.0 - m) / var - 1.0;
  double a = common > 0.0 ? m * common : 1.0;
  double b = common > 0.0 ? (1.0 - m) * common : 1.0;
  using boost::math::digamma;
  using boost::math::trigamma;
  for (int it = 0; it < 200; ++it) {
    const double dab = digamma(a + b);
    const double g1 = digamma(a) - dab - s1;
    const double g2 = digamma(b) - dab - s2;
    const double tab = trigamma(a + b);
    const double j11 = trigamma(a) - tab, j12 = -tab, j22 = trigamma(b) - tab;
    const double det = j11 * j22 - j12 * j12;
    const double da = (j22 * g1 - j12 * g2) / det;
    const double db = (j11 * g2 - j12 * g1) / det;
    double step = 1.0;
    while (a - step * da <= 0.0 || b - step * db <= 0.0) step *= 0.5;
    a -= step * da;
    b -= step * db;
    if (std::abs(da) < 1e-13 * a && std::abs(db) < 1e-13 * b) break;
  }
  f.a = a;
  f.b = b;
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  f.log_likelihood = n * ((a - 1.0) * s1 + (b - 1.0) * s2 - lbeta);
  const auto law = ProportionDistribution::beta(a, b);
  f.gof = gof_statistics(v, [&](double x) { return law.cdf(x); });
  return f;
}

ProportionFit fit_proportion(const LossDataset& data) {
  std::vector<double> p;
  std::size_t empty = 0;
  for (const auto& r : data.records) {
    const double total = r.loss1 + r.loss2;
    if (total == 0.0) {
      ++empty;
      continue;
    }
    p.push_back(r.loss1 / total);
  }
  auto f = fit_beta(p);
  f.excluded += empty;
  return f;
}

ImpactCoefficients impact_coefficients(double delta, const DependenceModel& model) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be positive");
  auto finite_mean = [](const SeverityDistribution& x) {
    const double m = mean(x);
    if (!std::isfinite(m) || !(m > 0.0)) throw ParameterError("severity mean is not finite");
    return m;
  };
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    return {delta / finite_mean(s->region1.severity), delta / finite_mean(s->region2.severity)};
  }
  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    return {delta / finite_mean(s->severity1), delta / finite_mean(s->severity2)};
  }
  const auto& s = std::get<PlaStructure>(model.structure);
  const double ex = finite_mean(s.total_severity);
  const double ep = s.proportion.mean();
  return {delta / (ep * ex), delta / ((1.0 - ep) * ex)};
}

}  // namespace cococat
