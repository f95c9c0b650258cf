#include "cococat/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "cococat/errors.hpp"
#include "cococat/quadrature.hpp"

namespace cococat {

std::string to_string(CouponVariant v) { return v == CouponVariant::minus ? "minus" : "plus"; }
std::string to_string(ExponentVariant v) { return v == ExponentVariant::proof ? "proof" : "theorem"; }
std::string to_string(DiscountVariant v) {
  return v == DiscountVariant::scaled ? "scaled" : "literal";
}

CouponVariant parse_coupon_variant(const std::string& s) {
  if (s == "minus") return CouponVariant::minus;
  if (s == "plus") return CouponVariant::plus;
  throw ConfigurationError("coupon variant must be 'minus' or 'plus', got '" + s + "'");
}

ExponentVariant parse_exponent_variant(const std::string& s) {
  if (s == "proof") return ExponentVariant::proof;
  if (s == "theorem") return ExponentVariant::theorem;
  throw ConfigurationError("exponent variant must be 'proof' or 'theorem', got '" + s + "'");
}

DiscountVariant parse_discount_variant(const std::string& s) {
  if (s == "scaled") return DiscountVariant::scaled;
  if (s == "literal") return DiscountVariant::literal;
  throw ConfigurationError("discount variant must be 'scaled' or 'literal', got '" + s + "'");
}

int BondCovenant::coupon_count() const {
  return static_cast<int>(std::lround(maturity / coupon_period));
}

void BondCovenant::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(maturity) || maturity <= 0.0) throw ParameterError("maturity must be > 0");
  if (!finite(coupon_period) || coupon_period <= 0.0) {
    throw ParameterError("coupon period must be > 0");
  }
  const double ratio = maturity / coupon_period;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigurationError("maturity must be a whole number of coupon periods");
  }
  if (!finite(nominal) || nominal < 0.0) throw ParameterError("nominal must be >= 0");
  if (!finite(spread)) throw ParameterError("coupon spread must be finite");
  if (!finite(conversion_fraction) || conversion_fraction < 0.0) {
    throw ParameterError("conversion fraction must be >= 0");
  }
  if (!(conversion_exponent >= 0.0 && conversion_exponent <= 1.0)) {
    throw ParameterError("conversion exponent must lie in [0, 1]");
  }
}

namespace {

double bond(const MarketParams& m, double t) { return zcb_price(m.r0, t, m.theta_r, m.sigma_r); }

double total_cumulative(const DependenceModel& model, double t) {
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    return s->region1.intensity.cumulative(t) + s->region2.intensity.cumulative(t);
  }
  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    return s->intensity.cumulative(t);
  }
  return std::get<PlaStructure>(model.structure).intensity.cumulative(t);
}

std::vector<double> intensity_breaks(const DependenceModel& model, double horizon) {
  std::set<double> out;
  auto add = [&](const Intensity& lam) {
    for (double b : lam.breaks()) {
      if (b > 0.0 && b < horizon) out.insert(b);
    }
  };
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    add(s->region1.intensity);
    add(s->region2.intensity);
  } else if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    add(s->intensity);
  } else {
    add(std::get<PlaStructure>(model.structure).intensity);
  }
  return {out.begin(), out.end()};
}

// Phi(t) = exp(-(Lambda(t) - Lambda_nu(t)) + (1 - nu) * compensator(t)).
double loss_factor(const DependenceModel& model, const DependenceModel& tilted,
                   const ImpactCoefficients& impact, const Kappa& k, double nu, double t) {
  const double lost = total_cumulative(model, t) - total_cumulative(tilted, t);
  return std::exp(-lost + (1.0 - nu) * compensator(model, impact, k, t));
}

// Gauss-Legendre over [0, horizon] split at the breakpoints, doubling the
// node count until the relative change drops below the tolerance.
template <class G>
double integrate_time(G&& g, const std::vector<double>& breaks, double horizon,
                      const PricingOptions& options, PriceDiagnostics* diag) {
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), breaks.begin(), breaks.end());
  edges.push_back(horizon);
  auto run = [&](int nodes) {
    const auto& rule = gauss_legendre(nodes);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) s += integrate(rule, g, edges[i], edges[i + 1]);
    return s;
  };
  int nodes = options.time_nodes;
  double previous = run(nodes);
  for (;;) {
    const int next = nodes * 2;
    const double current = run(next);
    const double change = std::abs(current - previous) / std::max(std::abs(current), 1e-14);
    if (change <= options.time_tolerance) {
      if (diag) {
        diag->time_nodes = std::max(diag->time_nodes, nodes);
        diag->time_relative_change = std::max(diag->time_relative_change, change);
      }
      return previous;
    }
    if (next >= options.max_time_nodes) {
      throw NumericalError("time integral did not converge under node doubling", change);
    }
    nodes = next;
    previous = current;
  }
}

}  // namespace

double coupon_leg(const BondCovenant& b, const MarketParams& market, const TriggerLaw& law,
                  CouponVariant variant) {
  const int n = b.coupon_count();
  const double dt = b.coupon_period;
  const double r0 = initial_libor(market, dt);
  double value = dt * (r0 + b.spread) * bond(market, dt) * law.survival(dt);
  const double sign = variant == CouponVariant::minus ? -1.0 : 1.0;
  double prev = bond(market, dt);
  for (int i = 2; i <= n; ++i) {
    const double pi = bond(market, i * dt);
    value += law.survival(i * dt) * (prev + sign * (1.0 - b.spread * dt) * pi);
    prev = pi;
  }
  return b.nominal * value;
}

double principal_leg(const BondCovenant& b, const MarketParams& market, const TriggerLaw& law) {
  return b.nominal * bond(market, b.maturity) * law.survival(b.maturity);
}

double conversion_loss_factor(const DependenceModel& model, const ImpactCoefficients& impact,
                              double nu, double t, std::optional<double> p) {
  const auto tilted = tilt_model(model, impact, nu, p);
  return loss_factor(model, tilted, impact, kappa(model, impact), nu, t);
}

double conversion_leg(const BondCovenant& b, const MarketParams& market,
                      const DependenceModel& model, const ImpactCoefficients& impact,
                      const PricingOptions& options, PriceDiagnostics* diag) {
  b.validate();
  market.validate();
  const double nu = b.conversion_exponent;
  const double T = b.maturity;
  if (b.conversion_fraction == 0.0) return 0.0;

  const double vol2 = market.sigma_s * market.sigma_s;
  const double drift = options.exponent == ExponentVariant::proof
                           ? -0.5 * nu * (1.0 - nu) * vol2
                           : -0.5 * nu * (1.0 - nu) * (1.0 - nu) * vol2;
  const auto rate = tilted_rate_params(market, nu);
  const double r_disc = options.discount == DiscountVariant::scaled ? nu * market.r0 : market.r0;
  auto discount = [&](double t) {
    return nu == 0.0 ? 1.0 : zcb_price(r_disc, t, rate.theta, rate.sigma);
  };

  const Kappa k = kappa(model, impact);
  const auto breaks = intensity_breaks(model, T);

  auto leg_with = [&](const DependenceModel& tilted, const TriggerLaw& law) {
    if (diag) {
      diag->max_series_terms = std::max(diag->max_series_terms, law.max_terms());
      diag->grid_error = std::max(diag->grid_error, law.grid_error());
    }
    auto g = [&](double t) {
      return std::exp(drift * t) * loss_factor(model, tilted, impact, k, nu, t) * discount(t) *
             law.density(t);
    };
    return integrate_time(g, breaks, T, options, diag);
  };
  auto leg_for = [&](const DependenceModel& tilted) {
    return leg_with(tilted, trigger_law(tilted, T, options.trigger));
  };

  double integral = 0.0;
  const auto* pla = std::get_if<PlaStructure>(&model.structure);
  if (pla && !pla->proportion.is_degenerate()) {
    const auto& d = model.thresholds;
    const double kink = d.d1 / (d.d1 + d.d2);
    const int nodes = options.trigger.proportion_nodes;
    const NfoldTable table = split_base_table(model, T, options.trigger);
    for (auto [lo, hi] : {std::pair{0.0, kink}, std::pair{kink, 1.0}}) {
      for (const auto& q : gauss_legendre_points(nodes, lo, hi)) {
        const double theta = (1.0 - nu) * (impact.alpha * q.x + impact.beta * (1.0 - q.x));
        const auto tilted = tilt_model(model, impact, nu, q.x);
        integral += q.w * pla->proportion.pdf(q.x) *
                    leg_with(tilted, tilted_split_law(table, model, q.x, theta, T, options.trigger));
      }
    }
    if (diag) diag->proportion_nodes = 2 * nodes;
  } else {
    integral = leg_for(tilt_model(model, impact, nu));
  }
  return b.conversion_fraction * b.nominal * std::pow(market.s0, 1.0 - nu) * integral;
}

namespace {

PriceBreakdown price_with_law(const BondCovenant& b, const MarketParams& market,
                              const DependenceModel& model, const ImpactCoefficients& impact,
                              const PricingOptions& options, const TriggerLaw& law) {
  PriceBreakdown out;
  out.diagnostics.coupon = options.coupon;
  out.diagnostics.exponent = options.exponent;
  out.diagnostics.discount = options.discount;
  out.diagnostics.max_series_terms = law.max_terms();
  out.diagnostics.grid_error = law.grid_error();
  out.coupons = coupon_leg(b, market, law, options.coupon);
  out.principal = principal_leg(b, market, law);
  out.conversion = conversion_leg(b, market, model, impact, options, &out.diagnostics);
  out.total = out.coupons + out.conversion + out.principal;
  for (double v : {out.coupons, out.conversion, out.principal}) {
    if (!std::isfinite(v)) throw NumericalError("non-finite price component", v);
  }
  return out;
}

}  // namespace

PriceBreakdown price(const BondCovenant& b, const MarketParams& market,
                     const DependenceModel& model, const ImpactCoefficients& impact,
                     const PricingOptions& options) {
  b.validate();
  market.validate();
  model.validate();
  const TriggerLaw law = trigger_law(model, b.maturity, options.trigger);
  return price_with_law(b, market, model, impact, options, law);
}

Thresholds quantile_thresholds(const DependenceModel& model, double q) {
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    return {quantile(s->region1.severity, q), quantile(s->region2.severity, q)};
  }
  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    return {quantile(s->severity1, q), quantile(s->severity2, q)};
  }
  const double d = quantile(std::get<PlaStructure>(model.structure).total_severity, q);
  return {d, d};
}

std::vector<SweepRow> sweep(const BondCovenant& bond_in, const MarketParams& market,
                            const DependenceModel& model, const ImpactCoefficients& impact,
                            const SweepGrid& grid, const PricingOptions& options) {
  if (grid.nu.empty()) throw ConfigurationError("sweep needs at least one conversion exponent");
  struct Point {
    Thresholds d;
    std::optional<double> q;
  };
  std::vector<Point> points;
  if (!grid.quantiles.empty()) {
    for (double q : grid.quantiles) points.push_back({quantile_thresholds(model, q), q});
  } else {
    if (grid.d1.empty() || grid.d2.empty()) {
      throw ConfigurationError("sweep needs threshold lists or quantile levels");
    }
    for (double a : grid.d1) {
      for (double c : grid.d2) points.push_back({{a, c}, std::nullopt});
    }
  }

  // The physical-measure law depends on the thresholds only.
  std::vector<TriggerLaw> laws;
  laws.reserve(points.size());
  for (const auto& p : points) {
    DependenceModel m = model;
    m.thresholds = p.d;
    m.validate();
    laws.push_back(trigger_law(m, bond_in.maturity, options.trigger));
  }

  std::vector<SweepRow> rows;
  for (double nu : grid.nu) {
    BondCovenant b = bond_in;
    b.conversion_exponent = nu;
    b.validate();
    for (std::size_t i = 0; i < points.size(); ++i) {
      DependenceModel m = model;
      m.thresholds = points[i].d;
      rows.push_back({points[i].d.d1, points[i].d.d2, nu, points[i].q,
                      price_with_law(b, market, m, impact, options, laws[i])});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "D1,D2,nu,q,EI1,EI2,EI3,total\n";
  char buf[512];
  for (const auto& r : rows) {
    char q[64] = "";
    if (r.quantile) std::snprintf(q, sizeof q, "%.10g", *r.quantile);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%s,%.12g,%.12g,%.12g,%.12g\n", r.d1, r.d2,
                  r.nu, q, r.price.coupons, r.price.conversion, r.price.principal, r.price.total);
    os << buf;
  }
}

}  // namespace cococat
