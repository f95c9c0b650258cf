#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cococat/distributions.hpp"

namespace cococat {

// Deterministic, piecewise-constant event intensity lambda(t) on [0, inf).
// rates[i] applies on [breaks[i], breaks[i+1]); the last rate extends forever.
class Intensity {
 public:
  static Intensity constant(double rate);
  static Intensity piecewise(std::vector<double> breaks, std::vector<double> rates);

  double rate(double t) const;
  double cumulative(double t) const;           // Lambda(t) = int_0^t lambda
  double inverse_cumulative(double lam) const; // +inf when lam is never reached
  Intensity scaled(double factor) const;

  bool is_constant() const { return rates_.size() == 1; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& rates() const { return rates_; }
  bool operator==(const Intensity&) const = default;

 private:
  Intensity(std::vector<double> breaks, std::vector<double> rates);

  std::vector<double> breaks_;  // breaks_[0] == 0
  std::vector<double> rates_;
};

struct CompoundPoissonSpec {
  Intensity intensity;
  SeverityDistribution severity;
};

// Independent loss processes per region.
struct IlpStructure {
  CompoundPoissonSpec region1;
  CompoundPoissonSpec region2;
};

// One event clock hitting both regions with independent claim sizes.
struct IlaStructure {
  Intensity intensity;
  SeverityDistribution severity1;
  SeverityDistribution severity2;
};

// One event clock; each total claim X is split as (P X, (1-P) X) with a
// single P drawn per realisation.
struct PlaStructure {
  Intensity intensity;
  SeverityDistribution total_severity;
  ProportionDistribution proportion;
};

struct Thresholds {
  double d1;
  double d2;
};

struct DependenceModel {
  std::variant<IlpStructure, IlaStructure, PlaStructure> structure;
  Thresholds thresholds;

  std::string name() const;  // "ILP", "ILA", "PLA" or "rPLA"
  void validate() const;
};

// Sensitivities of the stock to losses in each region.
struct ImpactCoefficients {
  double alpha;
  double beta;
};

// Compensator weights: the loss-driven factor of the stock is
// exp(-alpha L1 - beta L2 + (alpha k1 Lambda1 + beta k2 Lambda2)).
struct Kappa {
  double region1;
  double region2;
};

Kappa kappa(const DependenceModel& model, const ImpactCoefficients& impact);

// alpha k1 Lambda1(t) + beta k2 Lambda2(t).
double compensator(const DependenceModel& model, const ImpactCoefficients& impact,
                   const Kappa& k, double t);

// The loss model under the measure that absorbs S^{1-nu}: intensities scaled
// by the Laplace transforms and severities exponentially tilted. For PLA the
// split coefficient must be fixed first, so `p` is required whenever the
// proportion law is not degenerate.
DependenceModel tilt_model(const DependenceModel& model, const ImpactCoefficients& impact,
                           double nu, std::optional<double> p = std::nullopt);

// Effective threshold of the total claim process once P = p is known.
double pla_threshold(const Thresholds& d, double p);

}  // namespace cococat
