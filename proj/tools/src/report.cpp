#include "cococat_cli/report.hpp"

#include <charconv>
#include <cmath>

namespace cococat::cli {

using ojson = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

ojson to_json(const PriceBreakdown& p) {
  const auto& d = p.diagnostics;
  return {{"e_i1", p.coupons},
          {"e_i2", p.conversion},
          {"e_i3", p.principal},
          {"total", p.total},
          {"diagnostics",
           {{"time_nodes", d.time_nodes},
            {"time_relative_change", d.time_relative_change},
            {"proportion_nodes", d.proportion_nodes},
            {"max_series_terms", d.max_series_terms},
            {"grid_error", d.grid_error},
            {"variant_coupon", to_string(d.coupon)},
            {"variant_exponent", to_string(d.exponent)},
            {"variant_discount", to_string(d.discount)}}}};
}

ojson to_json(const McEstimate& e) {
  ojson j{{"mean", e.mean}, {"std_error", e.std_error}, {"paths", e.paths}, {"time_step", e.time_step}};
  auto leg = [](const Moments& m) { return ojson{{"mean", m.mean}, {"std_error", m.std_error}}; };
  if (e.coupons) j["e_i1"] = leg(*e.coupons);
  if (e.conversion) j["e_i2"] = leg(*e.conversion);
  if (e.principal) j["e_i3"] = leg(*e.principal);
  return j;
}

ojson to_json(const GofStatistics& g) { return {{"ks", g.ks}, {"cvm", g.cvm}, {"ad", g.ad}}; }

ojson to_json(const FitReport& r) {
  ojson params = ojson::object();
  for (const auto& [k, v] : r.law.parameters) params[k] = v;
  ojson j{{"family", to_string(r.law.family)},
          {"parameters", params},
          {"samples", r.samples},
          {"log_likelihood", r.log_likelihood},
          {"gof", to_json(r.gof)},
          {"pricing_admissible", pricing_admissible(r.law.family)}};
  if (r.p_values) j["p_values"] = to_json(*r.p_values);
  return j;
}

ojson to_json(const ProportionFit& f) {
  return {{"family", "beta"}, {"a", f.a},       {"b", f.b},       {"mean", f.mean()},
          {"log_likelihood", f.log_likelihood}, {"used", f.used}, {"excluded", f.excluded},
          {"gof", to_json(f.gof)}};
}

ojson to_json(const IntensityFit& f) {
  return {{"rate", f.rate}, {"mse", f.mse}, {"mae", f.mae}, {"mape_percent", f.mape}, {"points", f.points}};
}

}  // namespace cococat::cli
