#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cococat/calibration.hpp"
#include "cococat/errors.hpp"
#include "cococat/loss_data.hpp"
#include "cococat/mc_oracle.hpp"
#include "cococat/pricing.hpp"
#include "cococat_cli/app.hpp"
#include "cococat_cli/config.hpp"
#include "cococat_cli/grid.hpp"
#include "cococat_cli/report.hpp"
#include "json.hpp"

namespace cococat::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

// Flags shared by the commands that price.
struct PricingFlags {
  std::string config;
  std::vector<std::string> overrides;
  std::string coupon, exponent, discount;
  std::string out;
};

void add_pricing_flags(CLI::App* cmd, PricingFlags& f) {
  cmd->add_option("config", f.config, "run configuration (JSON)")->required();
  cmd->add_option("--set", f.overrides, "override a config value, e.g. bond.conversion_fraction=0");
  cmd->add_option("--variant-coupon", f.coupon, "coupon-leg sign")->check(CLI::IsMember({"plus", "minus"}));
  cmd->add_option("--variant-exponent", f.exponent, "conversion time factor")
      ->check(CLI::IsMember({"theorem", "proof"}));
  cmd->add_option("--variant-discount", f.discount, "rate fed to the tilted bond price")
      ->check(CLI::IsMember({"scaled", "literal"}));
  cmd->add_option("--out", f.out, "output file");
}

RunConfig load(const PricingFlags& f) {
  auto c = parse_config(apply_overrides(read_file(f.config, "config"), f.overrides));
  if (!f.coupon.empty()) c.pricing.coupon = parse_coupon_variant(f.coupon);
  if (!f.exponent.empty()) c.pricing.exponent = parse_exponent_variant(f.exponent);
  if (!f.discount.empty()) c.pricing.discount = parse_discount_variant(f.discount);
  return c;
}

double riskless_bound(const RunConfig& c) {
  const TriggerLaw never({{1.0, {CrossingSeries(Intensity::constant(0.0), {1.0})}}});
  return coupon_leg(c.bond, c.market, never, c.pricing.coupon) + principal_leg(c.bond, c.market, never);
}

ojson impact_json(const ImpactCoefficients& i) { return {{"alpha", i.alpha}, {"beta", i.beta}}; }

// ---------------------------------------------------------------- price

struct PriceArgs {
  PricingFlags common;
  std::optional<double> nu, d1, d2, zeta;
};

int cmd_price(const PriceArgs& a, std::ostream& out) {
  auto c = load(a.common);
  if (a.nu) c.bond.conversion_exponent = *a.nu;
  if (a.zeta) c.bond.conversion_fraction = *a.zeta;
  if (a.d1) c.model.thresholds.d1 = *a.d1;
  if (a.d2) c.model.thresholds.d2 = *a.d2;
  c.bond.validate();
  const auto impact = c.impact.resolve(c.model);
  const auto p = price(c.bond, c.market, c.model, impact, c.pricing);
  ojson j{{"model", c.model.name()},
          {"thresholds", {{"d1", c.model.thresholds.d1}, {"d2", c.model.thresholds.d2}}},
          {"nu", c.bond.conversion_exponent},
          {"impact", impact_json(impact)}};
  const auto legs = to_json(p);
  for (const auto& [k, v] : legs.items()) j[k] = v;
  j["riskless_bound"] = riskless_bound(c);
  const auto text = j.dump(2) + "\n";
  if (!a.common.out.empty()) write_file(a.common.out, text);
  out << text;
  return exit_ok;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  PricingFlags common;
  std::optional<std::string> d1, d2, nu, quantiles;
};

// Checks that price moves the right way along one coordinate while the
// others are held fixed. sign = +1 for nondecreasing, -1 for nonincreasing.
bool monotone(const std::vector<SweepRow>& rows, int axis, int sign) {
  auto key = [axis](const SweepRow& r) {
    std::array<double, 4> k{r.d1, r.d2, r.nu, r.quantile.value_or(0.0)};
    k[axis] = 0.0;
    return k;
  };
  auto coord = [axis](const SweepRow& r) {
    return std::array<double, 4>{r.d1, r.d2, r.nu, r.quantile.value_or(0.0)}[axis];
  };
  std::map<std::array<double, 4>, std::vector<std::pair<double, double>>> lines;
  for (const auto& r : rows) lines[key(r)].push_back({coord(r), r.price.total});
  for (auto& [k, line] : lines) {
    std::sort(line.begin(), line.end());
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (line[i].first == line[i - 1].first) continue;
      const double step = sign * (line[i].second - line[i - 1].second);
      if (step < -1e-10 * std::abs(line[i].second)) return false;
    }
  }
  return true;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  auto c = load(a.common);
  SweepGrid grid;
  const bool quantile_mode = a.quantiles.has_value();
  if (quantile_mode && (a.d1 || a.d2)) {
    throw ConfigurationError("--quantiles replaces --d1/--d2; give one or the other");
  }
  if (quantile_mode) {
    grid.quantiles = parse_grid(*a.quantiles);
  } else {
    grid.d1 = a.d1 ? parse_grid(*a.d1) : std::vector<double>{c.model.thresholds.d1};
    grid.d2 = a.d2 ? parse_grid(*a.d2) : std::vector<double>{c.model.thresholds.d2};
  }
  grid.nu = a.nu ? parse_grid(*a.nu) : std::vector<double>{c.bond.conversion_exponent};
  const auto impact = c.impact.resolve(c.model);
  const auto rows = sweep(c.bond, c.market, c.model, impact, grid, c.pricing);

  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  const auto path = output_path(&c, a.common.out, "sweep.csv");
  write_file(path, csv.str());

  double lo = rows.front().price.total, hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.price.total);
    hi = std::max(hi, r.price.total);
  }
  ojson j{{"model", c.model.name()},
          {"rows", rows.size()},
          {"file", path.string()},
          {"min_total", lo},
          {"max_total", hi},
          {"nonincreasing_in_nu", monotone(rows, 2, -1)}};
  if (quantile_mode) {
    j["nondecreasing_in_q"] = monotone(rows, 3, +1);
  } else {
    j["nondecreasing_in_d1"] = monotone(rows, 0, +1);
    j["nondecreasing_in_d2"] = monotone(rows, 1, +1);
  }
  out << j.dump(2) << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string data;
  std::string mode = "ila";
  std::string cpi, reference, window_start, window_end;
  std::string criterion = "ks";
  int bootstrap = 0;
  std::uint64_t seed = 1;
  double delta = 0.02;
  double d1 = 2.0, d2 = 2.0, nu = 0.5;
  std::string base_config;
  std::string out;
};

std::vector<double> positive(const std::vector<double>& v, std::size_t& dropped) {
  std::vector<double> out;
  for (double x : v) {
    if (x > 0.0) out.push_back(x);
  }
  dropped = v.size() - out.size();
  return out;
}

SelectionCriterion parse_criterion(const std::string& s) {
  if (s == "ks") return SelectionCriterion::ks;
  if (s == "cvm") return SelectionCriterion::cvm;
  if (s == "ad") return SelectionCriterion::ad;
  throw ConfigurationError("criterion must be ks, cvm or ad");
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  std::optional<Window> window;
  if (!a.window_start.empty() || !a.window_end.empty()) {
    if (a.window_start.empty() || a.window_end.empty()) {
      throw ConfigurationError("--window-start and --window-end go together");
    }
    window = Window{parse_date(a.window_start), parse_date(a.window_end)};
  }
  const auto criterion = parse_criterion(a.criterion);
  RunConfig c;
  if (!a.base_config.empty()) c = parse_config(read_file(a.base_config, "config"));

  auto data = load_losses(a.data, window);
  if (!a.cpi.empty()) {
    const auto index = load_index(a.cpi);
    data = adjust_cpi(data, index, a.reference.empty() ? data.end : parse_date(a.reference));
  }

  FitOptions fo;
  fo.bootstrap_replicates = a.bootstrap;
  fo.seed = a.seed;
  ojson report{{"mode", a.mode},
               {"events", data.records.size()},
               {"window", {{"start", format_date(data.start)}, {"end", format_date(data.end)}}},
               {"years", data.years()},
               {"criterion", a.criterion}};

  auto fit_region = [&](const std::vector<double>& losses, const char* name) {
    std::size_t dropped = 0;
    const auto x = positive(losses, dropped);
    const auto reports = fit_all_families(x, fo);
    if (reports.empty()) throw FitError(std::string("no family could be fitted to ") + name);
    const auto& best = select_best(reports, criterion);
    ojson j{{"zero_losses_excluded", dropped}, {"selected", to_string(best.law.family)}};
    ojson all = ojson::array();
    for (const auto& r : reports) all.push_back(to_json(r));
    j["fits"] = all;
    report[name] = j;
    return best.law.to_severity();
  };
  auto intensity = [&](const std::vector<double>& times, const char* name) {
    const auto fit = estimate_hpp_intensity(times);
    auto j = to_json(fit);
    const auto [lo, hi] = hpp_bootstrap_interval(fit.rate, data.years(), 1000, a.seed);
    j["bootstrap_95"] = {lo, hi};
    report[name] = j;
    return Intensity::constant(fit.rate);
  };

  const Thresholds d{a.d1, a.d2};
  if (a.mode == "ila") {
    const auto lam = intensity(data.event_times(), "intensity");
    const auto s1 = fit_region(data.region1(), "region1");
    const auto s2 = fit_region(data.region2(), "region2");
    c.model = {IlaStructure{lam, s1, s2}, d};
  } else if (a.mode == "ilp") {
    auto times_where = [&](auto pick) {
      std::vector<double> t;
      const auto all = data.event_times();
      for (std::size_t i = 0; i < data.records.size(); ++i) {
        if (pick(data.records[i]) > 0.0) t.push_back(all[i]);
      }
      return t;
    };
    const auto l1 = intensity(times_where([](const LossRecord& r) { return r.loss1; }), "intensity_region1");
    const auto l2 = intensity(times_where([](const LossRecord& r) { return r.loss2; }), "intensity_region2");
    const auto s1 = fit_region(data.region1(), "region1");
    const auto s2 = fit_region(data.region2(), "region2");
    c.model = {IlpStructure{{l1, s1}, {l2, s2}}, d};
  } else if (a.mode == "pla") {
    const auto lam = intensity(data.event_times(), "intensity");
    const auto total = fit_region(data.totals(), "total");
    const auto split = fit_proportion(data);
    report["proportion"] = to_json(split);
    c.model = {PlaStructure{lam, total, ProportionDistribution::beta(split.a, split.b)}, d};
  } else {
    throw ConfigurationError("--mode must be ila, ilp or pla");
  }
  c.model.validate();
  c.impact = ImpactSpec{a.delta, std::nullopt};
  c.bond.conversion_exponent = a.nu;
  c.bond.validate();
  report["impact"] = impact_json(c.impact.resolve(c.model));

  const auto path = output_path(a.base_config.empty() ? nullptr : &c, a.out, "calibrated.cfg");
  write_file(path, dump_config(c));
  report["config"] = path.string();
  out << report.dump(2) << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  PricingFlags common;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  std::string dump_paths;
  std::optional<double> synthetic_years;
  std::string start = "1990-01-01";
};

void apply_sim_flags(RunConfig& c, const std::optional<std::size_t>& paths,
                     const std::optional<std::uint64_t>& seed, const std::optional<double>& step) {
  if (paths) c.simulation.paths = *paths;
  if (seed) c.simulation.seed = *seed;
  if (step) c.simulation.time_step = *step;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  auto c = load(a.common);
  apply_sim_flags(c, a.paths, a.seed, a.step);

  if (a.synthetic_years) {
    const Date start = parse_date(a.start);
    const double years = *a.synthetic_years;
    const auto events = simulate_loss_history(c.model, years, c.simulation.seed);
    LossDataset data;
    data.start = start;
    data.end = start + std::chrono::days(static_cast<long>(std::floor(years * 365.25)));
    for (const auto& e : events) {
      const Date day = start + std::chrono::days(static_cast<long>(std::floor(e.t * 365.25)));
      data.records.push_back({std::min(day, data.end), e.loss1, e.loss2});
    }
    std::ostringstream csv;
    write_losses(csv, data);
    const auto path = output_path(&c, a.common.out, "losses.csv");
    write_file(path, csv.str());
    ojson j{{"model", c.model.name()}, {"events", data.records.size()}, {"years", years},
            {"seed", c.simulation.seed}, {"file", path.string()}};
    out << j.dump(2) << "\n";
    return exit_ok;
  }

  std::ofstream dump;
  if (!a.dump_paths.empty()) {
    dump.open(a.dump_paths, std::ios::binary);
    if (!dump) throw IoError("cannot write " + a.dump_paths);
    c.simulation.path_dump = &dump;
  }
  const auto impact = c.impact.resolve(c.model);
  const auto est = simulate_price(c.bond, c.market, c.model, impact, c.simulation);
  ojson j{{"model", c.model.name()}, {"seed", c.simulation.seed}, {"impact", impact_json(impact)},
          {"estimate", to_json(est)}};
  const auto text = j.dump(2) + "\n";
  if (!a.common.out.empty()) write_file(a.common.out, text);
  out << text;
  return exit_ok;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  PricingFlags common;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  std::optional<std::size_t> trigger_paths;
  double perturb_kappa = 0.0;
};

double zscore(double estimate, double reference, double se) {
  const double diff = estimate - reference;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / se;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  auto c = load(a.common);
  apply_sim_flags(c, a.paths, a.seed, a.step);
  if (a.trigger_paths) c.validation.trigger_paths = *a.trigger_paths;
  const auto impact = c.impact.resolve(c.model);
  const auto& bond = c.bond;
  const auto& market = c.market;

  std::vector<std::pair<std::string, double>> checks;
  ojson report{{"model", c.model.name()},
               {"paths", c.simulation.paths},
               {"seed", c.simulation.seed},
               {"impact", impact_json(impact)}};

  // Price legs against the simulated payoff.
  const auto analytic = price(bond, market, c.model, impact, c.pricing);
  const auto mc = simulate_price(bond, market, c.model, impact, c.simulation);
  const double z1 = zscore(mc.coupons->mean, analytic.coupons, mc.coupons->std_error);
  const double z2 = zscore(mc.conversion->mean, analytic.conversion, mc.conversion->std_error);
  const double z3 = zscore(mc.principal->mean, analytic.principal, mc.principal->std_error);
  const double zt = zscore(mc.mean, analytic.total, mc.std_error);
  report["price"] = {{"analytic", to_json(analytic)},
                     {"mc", to_json(mc)},
                     {"z", {{"e_i1", z1}, {"e_i2", z2}, {"e_i3", z3}, {"total", zt}}}};
  checks.push_back({"price.e_i1", z1});
  checks.push_back({"price.e_i2", z2});
  checks.push_back({"price.e_i3", z3});
  checks.push_back({"price.total", zt});

  // Each formula switch is judged on the leg it changes.
  const TriggerLaw law = trigger_law(c.model, bond.maturity, c.pricing.trigger);
  ojson variants;
  auto judge = [&](const std::string& name, const std::vector<std::string>& options, const std::string& selected,
                   auto&& leg_value, const Moments& leg_mc) {
    ojson v{{"selected", selected}};
    ojson passing = ojson::array();
    for (const auto& o : options) {
      const double value = leg_value(o);
      const double z = zscore(leg_mc.mean, value, leg_mc.std_error);
      v[o] = {{"analytic", value}, {"z", z}, {"pass", std::abs(z) <= 3.0}};
      if (std::abs(z) <= 3.0) passing.push_back(o);
    }
    v["passing"] = passing;
    variants[name] = v;
  };
  judge("coupon", {"minus", "plus"}, to_string(c.pricing.coupon),
        [&](const std::string& o) { return coupon_leg(bond, market, law, parse_coupon_variant(o)); }, *mc.coupons);
  judge("exponent", {"proof", "theorem"}, to_string(c.pricing.exponent),
        [&](const std::string& o) {
          auto p = c.pricing;
          p.exponent = parse_exponent_variant(o);
          return conversion_leg(bond, market, c.model, impact, p);
        },
        *mc.conversion);
  judge("discount", {"scaled", "literal"}, to_string(c.pricing.discount),
        [&](const std::string& o) {
          auto p = c.pricing;
          p.discount = parse_discount_variant(o);
          return conversion_leg(bond, market, c.model, impact, p);
        },
        *mc.conversion);
  report["variants"] = variants;

  // Martingale property of the loss-driven stock factor.
  Kappa k = kappa(c.model, impact);
  k.region1 += a.perturb_kappa;
  k.region2 += a.perturb_kappa;
  ojson mart = ojson::array();
  for (double t : c.validation.martingale_times) {
    const auto e = martingale_check(c.model, impact, k, t, c.simulation);
    const double z = e.z_score(1.0);
    mart.push_back({{"t", t}, {"mean", e.mean}, {"std_error", e.std_error}, {"z", z}});
    checks.push_back({"martingale.t=" + format_number(t), z});
  }
  report["martingale"] = {{"kappa_shift", a.perturb_kappa}, {"checks", mart}};

  // Trigger survival against event-driven paths.
  auto tcfg = c.simulation;
  tcfg.paths = c.validation.trigger_paths;
  double horizon = 0.0;
  for (double t : c.validation.survival_times) horizon = std::max(horizon, t);
  const auto tau = simulate_trigger_times(c.model, tcfg, horizon);
  const TriggerLaw survival_law = trigger_law(c.model, horizon, c.pricing.trigger);
  ojson surv = ojson::array();
  for (double t : c.validation.survival_times) {
    const double s = survival_law.survival(t);
    const double n = static_cast<double>(tau.size());
    const double emp = static_cast<double>(std::count_if(tau.begin(), tau.end(), [t](double x) { return x > t; })) / n;
    const double z = zscore(emp, s, std::sqrt(s * (1.0 - s) / n));
    surv.push_back({{"t", t}, {"analytic", s}, {"empirical", emp}, {"z", z}});
    checks.push_back({"survival.t=" + format_number(t), z});
  }
  report["survival"] = {{"paths", tcfg.paths}, {"checks", surv}};

  double worst = 0.0;
  ojson failed = ojson::array();
  for (const auto& [name, z] : checks) {
    worst = std::max(worst, std::abs(z));
    if (!(std::abs(z) <= 3.0)) failed.push_back(name);
  }
  report["max_abs_z"] = worst;
  report["failed"] = failed;
  report["pass"] = failed.empty();

  const auto text = report.dump(2) + "\n";
  write_file(output_path(&c, a.common.out, "validation.json"), text);
  out << text;
  return failed.empty() ? exit_ok : exit_validation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CoCoCat bond pricing, calibration and validation", "cococat"};
  app.require_subcommand(1);

  PriceArgs price_args;
  auto* price_cmd = app.add_subcommand("price", "price the bond in a configuration");
  add_pricing_flags(price_cmd, price_args.common);
  price_cmd->add_option("--nu", price_args.nu, "conversion exponent");
  price_cmd->add_option("--zeta", price_args.zeta, "conversion fraction");
  price_cmd->add_option("--d1", price_args.d1, "region 1 threshold");
  price_cmd->add_option("--d2", price_args.d2, "region 2 threshold");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "price over a grid of thresholds and exponents");
  add_pricing_flags(sweep_cmd, sweep_args.common);
  sweep_cmd->add_option("--d1", sweep_args.d1, "D1 grid: list or start:stop:count");
  sweep_cmd->add_option("--d2", sweep_args.d2, "D2 grid: list or start:stop:count");
  sweep_cmd->add_option("--nu", sweep_args.nu, "nu grid: list or start:stop:count");
  sweep_cmd->add_option("--quantiles", sweep_args.quantiles, "severity quantile grid for the thresholds");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "fit a model to a loss history and emit a config");
  cal_cmd->add_option("data", cal.data, "loss CSV (date,loss_region1,loss_region2)")->required();
  cal_cmd->add_option("--mode", cal.mode, "ila, ilp or pla")->check(CLI::IsMember({"ila", "ilp", "pla"}));
  cal_cmd->add_option("--cpi", cal.cpi, "price index CSV (date,index)");
  cal_cmd->add_option("--reference", cal.reference, "restate losses in money of this date");
  cal_cmd->add_option("--window-start", cal.window_start, "observation window start");
  cal_cmd->add_option("--window-end", cal.window_end, "observation window end");
  cal_cmd->add_option("--criterion", cal.criterion, "ks, cvm or ad")->check(CLI::IsMember({"ks", "cvm", "ad"}));
  cal_cmd->add_option("--bootstrap", cal.bootstrap, "goodness-of-fit bootstrap replicates");
  cal_cmd->add_option("--seed", cal.seed, "bootstrap seed");
  cal_cmd->add_option("--delta", cal.delta, "loss size that moves the stock by one unit of log price");
  cal_cmd->add_option("--d1", cal.d1, "threshold written to the emitted config");
  cal_cmd->add_option("--d2", cal.d2, "threshold written to the emitted config");
  cal_cmd->add_option("--nu", cal.nu, "conversion exponent written to the emitted config");
  cal_cmd->add_option("--base-config", cal.base_config, "config supplying bond, market and numerics");
  cal_cmd->add_option("--out", cal.out, "emitted config path");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo price, or a synthetic loss history");
  add_pricing_flags(sim_cmd, sim.common);
  sim_cmd->add_option("--paths", sim.paths, "number of paths");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--step", sim.step, "time step in years");
  sim_cmd->add_option("--dump-paths", sim.dump_paths, "per-path payoff CSV");
  sim_cmd->add_option("--synthetic-losses", sim.synthetic_years, "write a loss history of this many years");
  sim_cmd->add_option("--start", sim.start, "first day of the synthetic history");

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "analytic values against the Monte Carlo oracle");
  add_pricing_flags(val_cmd, val.common);
  val_cmd->add_option("--paths", val.paths, "price and martingale paths");
  val_cmd->add_option("--seed", val.seed, "master seed");
  val_cmd->add_option("--step", val.step, "time step in years");
  val_cmd->add_option("--trigger-paths", val.trigger_paths, "event-driven paths for the survival check");
  val_cmd->add_option("--perturb-kappa", val.perturb_kappa, "add this to kappa (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_config;
  }

  try {
    if (price_cmd->parsed()) return cmd_price(price_args, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, out);
    if (cal_cmd->parsed()) return cmd_calibrate(cal, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out);
    if (val_cmd->parsed()) return cmd_validate(val, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const CoverageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << " (achieved " << e.achieved_error() << ")\n";
    return exit_numerical;
  } catch (const FitError& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
  return exit_config;
}

}  // namespace cococat::cli
