#include "cococat/multi_region.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cococat/errors.hpp"
#include "cococat/quadrature.hpp"

namespace cococat {
namespace {

std::vector<double> crossing_values(const SeverityDistribution& x, double d, int count,
                                    const ConvolutionOptions& conv, double& grid_error) {
  const NfoldTable table(x, d, count - 1, conv);
  grid_error = std::max(grid_error, table.grid_error());
  std::vector<double> g(count);
  for (int n = 0; n < count; ++n) g[n] = table.cdf(n, d);
  return g;
}

// Law of tau for the given per-region processes (already tilted if needed).
TriggerLaw region_law(const std::vector<CompoundPoissonSpec>& procs,
                      const std::vector<double>& thresholds, RegionCoupling coupling,
                      double horizon, const ConvolutionOptions& conv) {
  double err = 0.0;
  std::vector<CrossingSeries> factors;
  if (coupling == RegionCoupling::ilp) {
    for (std::size_t r = 0; r < procs.size(); ++r) {
      const int count =
          poisson_truncation(procs[r].intensity.cumulative(horizon), conv.poisson_tail) + 2;
      factors.emplace_back(procs[r].intensity,
                           crossing_values(procs[r].severity, thresholds[r], count, conv, err));
    }
  } else {
    const auto& lam = procs.front().intensity;
    const int count = poisson_truncation(lam.cumulative(horizon), conv.poisson_tail) + 2;
    std::vector<double> g(count, 1.0);
    for (std::size_t r = 0; r < procs.size(); ++r) {
      const auto gr = crossing_values(procs[r].severity, thresholds[r], count, conv, err);
      for (int n = 0; n < count; ++n) g[n] *= gr[n];
    }
    factors.emplace_back(lam, std::move(g));
  }
  return TriggerLaw({{1.0, std::move(factors)}}, err);
}

}  // namespace

PriceBreakdown price_multi_region(const BondCovenant& bond, const MarketParams& market,
                                  const std::vector<RegionSpec>& regions, RegionCoupling coupling,
                                  const PricingOptions& options) {
  bond.validate();
  market.validate();
  if (regions.empty()) throw ConfigurationError("at least one region is required");
  for (const auto& r : regions) {
    if (!(r.threshold > 0.0) || !std::isfinite(r.threshold)) {
      throw ParameterError("region thresholds must be positive and finite");
    }
    if (!(r.impact >= 0.0) || !std::isfinite(r.impact)) {
      throw ParameterError("region impacts must be >= 0");
    }
    if (coupling == RegionCoupling::ila && !(r.process.intensity == regions[0].process.intensity)) {
      throw ConfigurationError("a shared event clock needs identical intensities in every region");
    }
  }
  const double T = bond.maturity;
  const double nu = bond.conversion_exponent;
  const auto& conv = options.trigger.convolution;

  std::vector<CompoundPoissonSpec> base;
  std::vector<double> thresholds;
  for (const auto& r : regions) {
    base.push_back(r.process);
    thresholds.push_back(r.threshold);
  }
  const TriggerLaw law = region_law(base, thresholds, coupling, T, conv);

  PriceBreakdown out;
  out.diagnostics.coupon = options.coupon;
  out.diagnostics.exponent = options.exponent;
  out.diagnostics.discount = options.discount;
  out.diagnostics.max_series_terms = law.max_terms();
  out.diagnostics.grid_error = law.grid_error();
  out.coupons = coupon_leg(bond, market, law, options.coupon);
  out.principal = principal_leg(bond, market, law);

  if (bond.conversion_fraction > 0.0) {
    // Per-region transforms at the tilt (1 - nu) a_r and at a_r.
    const std::size_t R = regions.size();
    std::vector<double> l_tilt(R), l_full(R);
    std::vector<CompoundPoissonSpec> tilted;
    for (std::size_t r = 0; r < R; ++r) {
      const double th = (1.0 - nu) * regions[r].impact;
      l_tilt[r] = laplace(regions[r].process.severity, th);
      l_full[r] = laplace(regions[r].process.severity, regions[r].impact);
      tilted.push_back({regions[r].process.intensity.scaled(l_tilt[r]),
                        exp_tilt(regions[r].process.severity, th)});
    }
    if (coupling == RegionCoupling::ila) {
      double prod = 1.0;
      for (double v : l_tilt) prod *= v;
      for (auto& t : tilted) t.intensity = regions[0].process.intensity.scaled(prod);
    }
    const TriggerLaw tilted_law = region_law(tilted, thresholds, coupling, T, conv);
    out.diagnostics.max_series_terms = std::max(out.diagnostics.max_series_terms, tilted_law.max_terms());
    out.diagnostics.grid_error = std::max(out.diagnostics.grid_error, tilted_law.grid_error());

    auto phi = [&](double t) {
      double e = 0.0;
      if (coupling == RegionCoupling::ilp) {
        for (std::size_t r = 0; r < R; ++r) {
          const double lam = regions[r].process.intensity.cumulative(t);
          e += -lam * (1.0 - l_tilt[r]) + (1.0 - nu) * lam * (1.0 - l_full[r]);
        }
      } else {
        double pt = 1.0, pf = 1.0;
        for (std::size_t r = 0; r < R; ++r) {
          pt *= l_tilt[r];
          pf *= l_full[r];
        }
        const double lam = regions[0].process.intensity.cumulative(t);
        e = -lam * (1.0 - pt) + (1.0 - nu) * lam * (1.0 - pf);
      }
      return std::exp(e);
    };

    const double vol2 = market.sigma_s * market.sigma_s;
    const double drift = options.exponent == ExponentVariant::proof
                             ? -0.5 * nu * (1.0 - nu) * vol2
                             : -0.5 * nu * (1.0 - nu) * (1.0 - nu) * vol2;
    const auto rate = tilted_rate_params(market, nu);
    const double r_disc = options.discount == DiscountVariant::scaled ? nu * market.r0 : market.r0;
    auto g = [&](double t) {
      const double disc = nu == 0.0 ? 1.0 : zcb_price(r_disc, t, rate.theta, rate.sigma);
      return std::exp(drift * t) * phi(t) * disc * tilted_law.density(t);
    };

    std::set<double> cuts{0.0, T};
    for (const auto& r : regions) {
      for (double b : r.process.intensity.breaks()) {
        if (b > 0.0 && b < T) cuts.insert(b);
      }
    }
    const std::vector<double> edges(cuts.begin(), cuts.end());
    auto run = [&](int nodes) {
      const auto& rule = gauss_legendre(nodes);
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) s += integrate(rule, g, edges[i], edges[i + 1]);
      return s;
    };
    int nodes = options.time_nodes;
    double value = run(nodes);
    for (;;) {
      const double finer = run(2 * nodes);
      const double change = std::abs(finer - value) / std::max(std::abs(finer), 1e-14);
      if (change <= options.time_tolerance) {
        out.diagnostics.time_nodes = nodes;
        out.diagnostics.time_relative_change = change;
        break;
      }
      nodes *= 2;
      value = finer;
      if (nodes >= options.max_time_nodes) {
        throw NumericalError("time integral did not converge under node doubling", change);
      }
    }
    out.conversion =
        bond.conversion_fraction * bond.nominal * std::pow(market.s0, 1.0 - nu) * value;
  }
  out.total = out.coupons + out.conversion + out.principal;
  return out;
}

}  // namespace cococat
