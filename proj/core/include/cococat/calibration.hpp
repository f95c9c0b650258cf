#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cococat/distributions.hpp"
#include "cococat/goodness_of_fit.hpp"
#include "cococat/loss_data.hpp"
#include "cococat/loss_models.hpp"

namespace cococat {

// Candidate claim-size families. Pareto (Lomax form), inverse Gaussian and
// GEV are fitted and reported but cannot be used for pricing.
enum class SeverityFamily { lognormal, gamma, weibull, pareto, inverse_gaussian, gev };

std::string to_string(SeverityFamily f);
SeverityFamily parse_severity_family(const std::string& s);
bool pricing_admissible(SeverityFamily f);

struct FittedLaw {
  SeverityFamily family;
  std::vector<std::pair<std::string, double>> parameters;

  double parameter(const std::string& name) const;
  double cdf(double x) const;
  double pdf(double x) const;
  double quantile(double q) const;
  // Throws ConfigurationError for fit-only families.
  SeverityDistribution to_severity() const;
};

struct FitReport {
  FittedLaw law;
  std::size_t samples = 0;
  double log_likelihood = 0.0;
  GofStatistics gof;
  // Parametric-bootstrap p-values, when requested.
  std::optional<GofStatistics> p_values;
};

struct FitOptions {
  int bootstrap_replicates = 0;  // 0 disables the bootstrap
  std::uint64_t seed = 1;
};

FitReport fit_severity(std::span<const double> samples, SeverityFamily family,
                       const FitOptions& options = {});

// All six families, skipping (and omitting) any whose fit fails.
std::vector<FitReport> fit_all_families(std::span<const double> samples,
                                        const FitOptions& options = {});

enum class SelectionCriterion { ks, cvm, ad };
// Pricing-admissible report with the smallest statistic.
const FitReport& select_best(const std::vector<FitReport>& reports,
                             SelectionCriterion criterion = SelectionCriterion::ks);

struct IntensityFit {
  double rate = 0.0;
  double mse = 0.0;
  double mae = 0.0;
  double mape = 0.0;  // percent, over points with N(t) > 0
  std::size_t points = 0;
};

// Least squares of lambda t_k against the cumulative count N(t_k) = k.
IntensityFit estimate_hpp_intensity(std::span<const double> event_times);
IntensityFit estimate_hpp_intensity(const LossDataset& data);

// Parametric bootstrap percentile interval for the rate: simulate HPPs at the
// fitted rate over [0, horizon] and refit.
std::pair<double, double> hpp_bootstrap_interval(double rate, double horizon, int replicates,
                                                 std::uint64_t seed, double level = 0.95);

struct ProportionFit {
  double a = 0.0;
  double b = 0.0;
  double log_likelihood = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // events with a share of exactly 0 or 1
  GofStatistics gof;

  double mean() const { return a / (a + b); }
};

ProportionFit fit_beta(std::span<const double> proportions);
// Shares p_k = loss1 / (loss1 + loss2).
ProportionFit fit_proportion(const LossDataset& data);

// alpha = delta / E[region 1 claim], beta = delta / E[region 2 claim]; for
// PLA the regional means are E[P] E[X] and (1 - E[P]) E[X].
ImpactCoefficients impact_coefficients(double delta, const DependenceModel& model);

}  // namespace cococat
