#include "cococat/trigger.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/poisson.hpp>

#include "cococat/errors.hpp"
#include "cococat/quadrature.hpp"

namespace cococat {
namespace {

// Poisson weights e^{-m} m^n / n! for n = 0..count-1.
void poisson_weights(double m, std::vector<double>& out, int count) {
  out.assign(count, 0.0);
  if (m == 0.0) {
    out[0] = 1.0;
    return;
  }
  if (m < 600.0) {
    double w = std::exp(-m);
    for (int n = 0; n < count; ++n) {
      out[n] = w;
      w *= m / (n + 1);
    }
    return;
  }
  const boost::math::poisson_distribution<> law(m);
  for (int n = 0; n < count; ++n) out[n] = boost::math::pdf(law, n);
}

// Number of G_n values needed so the density's G_{n+1} is available too.
int series_length(const Intensity& lam, double horizon, double tail) {
  return poisson_truncation(lam.cumulative(horizon), tail) + 2;
}

std::vector<double> crossing_probabilities(const NfoldTable& table, double d, int count) {
  std::vector<double> g(count);
  for (int n = 0; n < count; ++n) g[n] = table.cdf(n, d);
  return g;
}

}  // namespace

CrossingSeries::CrossingSeries(Intensity intensity, std::vector<double> g)
    : intensity_(std::move(intensity)), g_(std::move(g)) {
  if (g_.empty() || g_[0] != 1.0) throw ParameterError("crossing series must start with G_0 = 1");
}

double CrossingSeries::survival(double t) const {
  if (t <= 0.0) return 1.0;
  thread_local std::vector<double> w;
  poisson_weights(intensity_.cumulative(t), w, terms());
  double s = 0.0;
  for (int n = 0; n < terms(); ++n) s += w[n] * g_[n];
  return s;
}

double CrossingSeries::density(double t) const {
  if (t < 0.0) return 0.0;
  const double rate = intensity_.rate(t);
  if (rate == 0.0) return 0.0;
  thread_local std::vector<double> w;
  poisson_weights(intensity_.cumulative(t), w, terms());
  double s = 0.0;
  for (int n = 0; n + 1 < terms(); ++n) s += w[n] * (g_[n] - g_[n + 1]);
  return rate * s;
}

TriggerLaw::TriggerLaw(std::vector<Component> components, double grid_error)
    : components_(std::move(components)), grid_error_(grid_error) {}

double TriggerLaw::survival(double t) const {
  double s = 0.0;
  for (const auto& c : components_) {
    double prod = 1.0;
    for (const auto& f : c.factors) prod *= f.survival(t);
    s += c.weight * prod;
  }
  return s;
}

double TriggerLaw::density(double t) const {
  double s = 0.0;
  for (const auto& c : components_) {
    const std::size_t k = c.factors.size();
    if (k == 1) {
      s += c.weight * c.factors[0].density(t);
      continue;
    }
    std::vector<double> surv(k), dens(k);
    for (std::size_t i = 0; i < k; ++i) {
      surv[i] = c.factors[i].survival(t);
      dens[i] = c.factors[i].density(t);
    }
    // d/dt of a product of survival functions.
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double term = dens[i];
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) term *= surv[j];
      }
      total += term;
    }
    s += c.weight * total;
  }
  return s;
}

int TriggerLaw::max_terms() const {
  int m = 0;
  for (const auto& c : components_) {
    for (const auto& f : c.factors) m = std::max(m, f.terms());
  }
  return m;
}

TriggerLaw trigger_law(const DependenceModel& model, double horizon,
                       const TriggerOptions& options) {
  model.validate();
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ParameterError("horizon must be >= 0");
  const auto& conv = options.convolution;
  const double tail = conv.poisson_tail;
  const auto& d = model.thresholds;

  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    const int n1 = series_length(s->region1.intensity, horizon, tail);
    const int n2 = series_length(s->region2.intensity, horizon, tail);
    const NfoldTable t1(s->region1.severity, d.d1, n1 - 1, conv);
    const NfoldTable t2(s->region2.severity, d.d2, n2 - 1, conv);
    std::vector<CrossingSeries> factors;
    factors.emplace_back(s->region1.intensity, crossing_probabilities(t1, d.d1, n1));
    factors.emplace_back(s->region2.intensity, crossing_probabilities(t2, d.d2, n2));
    return TriggerLaw({{1.0, std::move(factors)}}, std::max(t1.grid_error(), t2.grid_error()));
  }

  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    const int n = series_length(s->intensity, horizon, tail);
    const NfoldTable t1(s->severity1, d.d1, n - 1, conv);
    const NfoldTable t2(s->severity2, d.d2, n - 1, conv);
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = t1.cdf(k, d.d1) * t2.cdf(k, d.d2);
    std::vector<CrossingSeries> factors;
    factors.emplace_back(s->intensity, std::move(g));
    return TriggerLaw({{1.0, std::move(factors)}}, std::max(t1.grid_error(), t2.grid_error()));
  }

  const auto& s = std::get<PlaStructure>(model.structure);
  const int n = series_length(s.intensity, horizon, tail);
  if (s.proportion.is_degenerate()) {
    const double dp = pla_threshold(d, std::get<Degenerate>(s.proportion.family()).p);
    const NfoldTable table(s.total_severity, dp, n - 1, conv);
    std::vector<CrossingSeries> factors;
    factors.emplace_back(s.intensity, crossing_probabilities(table, dp, n));
    return TriggerLaw({{1.0, std::move(factors)}}, table.grid_error());
  }

  // Random split: D_p = min(D1/p, D2/(1-p)) peaks at p* = D1/(D1+D2), which
  // is where the integrand has its kink; integrate each side separately.
  const double kink = d.d1 / (d.d1 + d.d2);
  const NfoldTable table(s.total_severity, d.d1 + d.d2, n - 1, conv);
  std::vector<TriggerLaw::Component> components;
  for (auto [lo, hi] : {std::pair{0.0, kink}, std::pair{kink, 1.0}}) {
    for (const auto& q : gauss_legendre_points(options.proportion_nodes, lo, hi)) {
      const double dp = std::min(pla_threshold(d, q.x), d.d1 + d.d2);
      std::vector<CrossingSeries> factors;
      factors.emplace_back(s.intensity, crossing_probabilities(table, dp, n));
      components.push_back({q.w * s.proportion.pdf(q.x), std::move(factors)});
    }
  }
  return TriggerLaw(std::move(components), table.grid_error());
}

NfoldTable split_base_table(const DependenceModel& model, double horizon,
                            const TriggerOptions& options) {
  model.validate();
  const auto* s = std::get_if<PlaStructure>(&model.structure);
  if (!s) throw ParameterError("PLA model expected");
  auto conv = options.convolution;
  conv.keep_masses = true;
  const int n = series_length(s->intensity, horizon, conv.poisson_tail);
  return NfoldTable(s->total_severity, model.thresholds.d1 + model.thresholds.d2, n - 1, conv);
}

TriggerLaw tilted_split_law(const NfoldTable& base, const DependenceModel& model, double p,
                            double theta, double horizon, const TriggerOptions& options) {
  const auto& s = std::get<PlaStructure>(model.structure);
  const auto& d = model.thresholds;
  const Intensity lam = s.intensity.scaled(laplace(s.total_severity, theta));
  // Tilting only shrinks the intensity, so the base table is long enough.
  const int n = std::min(series_length(lam, horizon, options.convolution.poisson_tail),
                         base.n_max() + 1);
  const double dp = std::min(pla_threshold(d, p), d.d1 + d.d2);
  std::vector<CrossingSeries> factors;
  factors.emplace_back(lam, base.tilted_cdfs(theta, dp, n));
  return TriggerLaw({{1.0, std::move(factors)}}, base.grid_error());
}

namespace {

const DependenceModel& expect_kind(const DependenceModel& m, bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
  return m;
}

DependenceModel with_fixed_split(const DependenceModel& model, double p) {
  const auto& s = std::get<PlaStructure>(model.structure);
  return {PlaStructure{s.intensity, s.total_severity, ProportionDistribution::degenerate(p)},
          model.thresholds};
}

}  // namespace

double survival_ilp(double t, const DependenceModel& model, const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<IlpStructure>(model.structure), "ILP model expected");
  return trigger_law(model, std::max(t, 0.0), options).survival(t);
}

double trigger_density_ilp(double t, const DependenceModel& model, const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<IlpStructure>(model.structure), "ILP model expected");
  return trigger_law(model, std::max(t, 0.0), options).density(t);
}

double survival_ila(double t, const DependenceModel& model, const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<IlaStructure>(model.structure), "ILA model expected");
  return trigger_law(model, std::max(t, 0.0), options).survival(t);
}

double density_ila(double t, const DependenceModel& model, const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<IlaStructure>(model.structure), "ILA model expected");
  return trigger_law(model, std::max(t, 0.0), options).density(t);
}

double survival_pla(double t, const DependenceModel& model, const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<PlaStructure>(model.structure), "PLA model expected");
  return trigger_law(model, std::max(t, 0.0), options).survival(t);
}

double survival_pla_given_p(double t, const DependenceModel& model, double p,
                            const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<PlaStructure>(model.structure), "PLA model expected");
  return trigger_law(with_fixed_split(model, p), std::max(t, 0.0), options).survival(t);
}

double density_pla_given_p(double t, const DependenceModel& model, double p,
                           const TriggerOptions& options) {
  expect_kind(model, std::holds_alternative<PlaStructure>(model.structure), "PLA model expected");
  return trigger_law(with_fixed_split(model, p), std::max(t, 0.0), options).density(t);
}

}  // namespace cococat
