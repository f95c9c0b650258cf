#include "cococat/loss_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cococat/errors.hpp"

namespace cococat {

Intensity::Intensity(std::vector<double> breaks, std::vector<double> rates)
    : breaks_(std::move(breaks)), rates_(std::move(rates)) {}

Intensity Intensity::constant(double rate) { return piecewise({0.0}, {rate}); }

Intensity Intensity::piecewise(std::vector<double> breaks, std::vector<double> rates) {
  if (breaks.empty() || breaks.size() != rates.size()) {
    throw ParameterError("intensity needs one rate per breakpoint");
  }
  if (breaks.front() != 0.0) throw ParameterError("first intensity breakpoint must be 0");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1]) || !std::isfinite(breaks[i])) {
      throw ParameterError("intensity breakpoints must be strictly increasing");
    }
  }
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("intensity must be >= 0");
  }
  return Intensity(std::move(breaks), std::move(rates));
}

double Intensity::rate(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const auto i = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin() - 1);
  return rates_[i];
}

double Intensity::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const double end = i + 1 < breaks_.size() ? breaks_[i + 1] : t;
    if (t <= breaks_[i]) break;
    total += rates_[i] * (std::min(t, end) - breaks_[i]);
  }
  return total;
}

double Intensity::inverse_cumulative(double lam) const {
  if (lam <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const bool last = i + 1 == breaks_.size();
    const double width = last ? std::numeric_limits<double>::infinity() : breaks_[i + 1] - breaks_[i];
    if (rates_[i] == 0.0) continue;
    const double piece = rates_[i] * width;
    if (acc + piece >= lam) return breaks_[i] + (lam - acc) / rates_[i];
    acc += piece;
  }
  return std::numeric_limits<double>::infinity();
}

Intensity Intensity::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw ParameterError("scale factor must be >= 0");
  auto r = rates_;
  for (double& v : r) v *= factor;
  return Intensity(breaks_, std::move(r));
}

std::string DependenceModel::name() const {
  if (std::holds_alternative<IlpStructure>(structure)) return "ILP";
  if (std::holds_alternative<IlaStructure>(structure)) return "ILA";
  return std::get<PlaStructure>(structure).proportion.is_degenerate() ? "PLA" : "rPLA";
}

void DependenceModel::validate() const {
  if (!(thresholds.d1 > 0.0) || !(thresholds.d2 > 0.0) || !std::isfinite(thresholds.d1) ||
      !std::isfinite(thresholds.d2)) {
    throw ParameterError("loss thresholds must be positive and finite");
  }
}

Kappa kappa(const DependenceModel& model, const ImpactCoefficients& impact) {
  const double a = impact.alpha;
  const double b = impact.beta;
  if (!(a >= 0.0) || !(b >= 0.0) || !(a + b > 0.0)) {
    throw ParameterError("impact coefficients must be >= 0 and not both zero");
  }
  // (1 - L(a)) / a tends to E[X] as a -> 0.
  auto ratio = [](const SeverityDistribution& x, double c) {
    return c == 0.0 ? mean(x) : (1.0 - laplace(x, c)) / c;
  };
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    return {ratio(s->region1.severity, a), ratio(s->region2.severity, b)};
  }
  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    const double k = (1.0 - laplace(s->severity1, a) * laplace(s->severity2, b)) / (a + b);
    return {k, k};
  }
  const auto& s = std::get<PlaStructure>(model.structure);
  const double joint = s.proportion.expect(
      [&](double p) { return laplace(s.total_severity, a * p + b * (1.0 - p)); });
  const double k = (1.0 - joint) / (a + b);
  return {k, k};
}

double compensator(const DependenceModel& model, const ImpactCoefficients& impact, const Kappa& k,
                   double t) {
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    return impact.alpha * k.region1 * s->region1.intensity.cumulative(t) +
           impact.beta * k.region2 * s->region2.intensity.cumulative(t);
  }
  const Intensity& lam = std::holds_alternative<IlaStructure>(model.structure)
                             ? std::get<IlaStructure>(model.structure).intensity
                             : std::get<PlaStructure>(model.structure).intensity;
  return (impact.alpha * k.region1 + impact.beta * k.region2) * lam.cumulative(t);
}

DependenceModel tilt_model(const DependenceModel& model, const ImpactCoefficients& impact,
                           double nu, std::optional<double> p) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ParameterError("conversion exponent must lie in [0, 1]");
  const double ta = impact.alpha * (1.0 - nu);
  const double tb = impact.beta * (1.0 - nu);
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    auto tilt = [](const CompoundPoissonSpec& c, double th) {
      return CompoundPoissonSpec{c.intensity.scaled(laplace(c.severity, th)),
                                 exp_tilt(c.severity, th)};
    };
    return {IlpStructure{tilt(s->region1, ta), tilt(s->region2, tb)}, model.thresholds};
  }
  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    const double scale = laplace(s->severity1, ta) * laplace(s->severity2, tb);
    return {IlaStructure{s->intensity.scaled(scale), exp_tilt(s->severity1, ta),
                         exp_tilt(s->severity2, tb)},
            model.thresholds};
  }
  const auto& s = std::get<PlaStructure>(model.structure);
  double split;
  if (s.proportion.is_degenerate()) {
    split = std::get<Degenerate>(s.proportion.family()).p;
  } else if (p) {
    split = *p;
  } else {
    throw ConfigurationError("tilting a random-proportion model needs a fixed proportion");
  }
  const double theta = (1.0 - nu) * (impact.alpha * split + impact.beta * (1.0 - split));
  return {PlaStructure{s.intensity.scaled(laplace(s.total_severity, theta)),
                       exp_tilt(s.total_severity, theta), ProportionDistribution::degenerate(split)},
          model.thresholds};
}

double pla_threshold(const Thresholds& d, double p) {
  if (p <= 0.0) return d.d2;
  if (p >= 1.0) return d.d1;
  return std::min(d.d1 / p, d.d2 / (1.0 - p));
}

}  // namespace cococat
