#include "cococat_cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cococat/calibration.hpp"
#include "cococat/errors.hpp"
#include "json.hpp"

namespace cococat::cli {
namespace {

using json = nlohmann::json;

// Reads keys off one JSON object and complains about anything left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) fail(at(key), "is required");
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number()) fail(at(key), "must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_unsigned()) fail(at(key), "must be a nonnegative integer");
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) fail(at(key), "must be a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array()) fail(at(key), "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(at(key), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section child(const std::string& key) { return Section(raw(key), at(key)); }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(at(key), "is not a recognised key");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigurationError("config: '" + where + "' " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SeverityDistribution read_severity(Section s) {
  const auto family = s.text("family");
  SeverityDistribution d = SeverityDistribution::exponential(1.0);
  if (family == "exponential") {
    d = SeverityDistribution::exponential(s.number("rate"));
  } else if (family == "lognormal") {
    d = SeverityDistribution::lognormal(s.number("mu"), s.number("sigma"));
  } else if (family == "gamma") {
    d = SeverityDistribution::gamma(s.number("shape"), s.number("scale"));
  } else if (family == "weibull") {
    d = SeverityDistribution::weibull(s.number("shape"), s.number("scale"));
  } else {
    Section::fail(s.at("family"), "must be exponential, lognormal, gamma or weibull");
  }
  s.finish();
  return d;
}

Intensity read_intensity(Section& parent, const std::string& key) {
  const auto& v = parent.raw(key);
  if (v.is_number()) return Intensity::constant(v.get<double>());
  Section s(v, parent.at(key));
  auto breaks = s.numbers("breaks", {});
  auto rates = s.numbers("rates", {});
  s.finish();
  return Intensity::piecewise(std::move(breaks), std::move(rates));
}

ProportionDistribution read_proportion(Section s) {
  const auto family = s.text("family");
  std::optional<ProportionDistribution> p;
  if (family == "degenerate") {
    p = ProportionDistribution::degenerate(s.number("p"));
  } else if (family == "beta") {
    p = ProportionDistribution::beta(s.number("a"), s.number("b"));
  } else {
    Section::fail(s.at("family"), "must be degenerate or beta");
  }
  s.finish();
  return *p;
}

DependenceModel read_model(Section s) {
  const auto type = s.text("type");
  Section th = s.child("thresholds");
  const Thresholds d{th.number("d1"), th.number("d2")};
  th.finish();
  DependenceModel m{IlaStructure{Intensity::constant(0.0), SeverityDistribution::exponential(1.0),
                                 SeverityDistribution::exponential(1.0)},
                    d};
  if (type == "ila") {
    const auto lam = read_intensity(s, "intensity");
    m.structure = IlaStructure{lam, read_severity(s.child("severity1")), read_severity(s.child("severity2"))};
  } else if (type == "ilp") {
    auto region = [&](const std::string& key) {
      Section r = s.child(key);
      CompoundPoissonSpec spec{read_intensity(r, "intensity"), read_severity(r.child("severity"))};
      r.finish();
      return spec;
    };
    m.structure = IlpStructure{region("region1"), region("region2")};
  } else if (type == "pla") {
    const auto lam = read_intensity(s, "intensity");
    m.structure = PlaStructure{lam, read_severity(s.child("severity")), read_proportion(s.child("proportion"))};
  } else {
    Section::fail(s.at("type"), "must be ila, ilp or pla");
  }
  s.finish();
  m.validate();
  return m;
}

template <class T>
T variant_or_fail(Section& s, const std::string& key, const std::string& fallback,
                  T (*parse)(const std::string&)) {
  try {
    return parse(s.text(key, fallback));
  } catch (const ConfigurationError& e) {
    Section::fail(s.at(key), e.what());
  }
}

json severity_json(const SeverityDistribution& d) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Exponential>) {
          return {{"family", "exponential"}, {"rate", p.rate}};
        } else if constexpr (std::is_same_v<P, Lognormal>) {
          return {{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
        } else if constexpr (std::is_same_v<P, Gamma>) {
          return {{"family", "gamma"}, {"shape", p.shape}, {"scale", p.scale}};
        } else if constexpr (std::is_same_v<P, Weibull>) {
          return {{"family", "weibull"}, {"shape", p.shape}, {"scale", p.scale}};
        } else {
          throw ConfigurationError("tilted laws cannot be written to a config");
        }
      },
      d.family());
}

json intensity_json(const Intensity& lam) {
  if (lam.is_constant()) return lam.rates()[0];
  return {{"breaks", lam.breaks()}, {"rates", lam.rates()}};
}

}  // namespace

ImpactCoefficients ImpactSpec::resolve(const DependenceModel& model) const {
  if (coefficients) return *coefficients;
  return impact_coefficients(delta.value_or(0.02), model);
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  Section root(j, "");
  const auto schema = root.text("schema");
  if (schema != kSchema) Section::fail("schema", "must be \"" + std::string(kSchema) + "\", got \"" + schema + "\"");

  RunConfig c;
  if (root.has("bond")) {
    Section s = root.child("bond");
    c.bond.maturity = s.number("maturity", c.bond.maturity);
    c.bond.nominal = s.number("nominal", c.bond.nominal);
    c.bond.coupon_period = s.number("coupon_period", c.bond.coupon_period);
    c.bond.spread = s.number("spread", c.bond.spread);
    c.bond.conversion_fraction = s.number("conversion_fraction", c.bond.conversion_fraction);
    c.bond.conversion_exponent = s.number("conversion_exponent", c.bond.conversion_exponent);
    s.finish();
  }
  if (root.has("market")) {
    Section s = root.child("market");
    auto& m = c.market;
    m.r0 = s.number("r0", m.r0);
    m.theta_r = s.number("theta_r", m.theta_r);
    m.m_r = s.number("m_r", m.m_r);
    m.sigma_r = s.number("sigma_r", m.sigma_r);
    m.s0 = s.number("s0", m.s0);
    m.sigma_s = s.number("sigma_s", m.sigma_s);
    m.rho = s.number("rho", m.rho);
    m.mu_s = s.number("mu_s", m.mu_s);
    if (s.has("libor0")) m.libor0 = s.number("libor0");
    s.finish();
  }
  c.model = read_model(root.child("model"));
  if (root.has("impact")) {
    Section s = root.child("impact");
    if (s.has("delta")) {
      if (s.has("alpha") || s.has("beta")) Section::fail("impact", "takes either delta or alpha and beta");
      c.impact.delta = s.number("delta");
    } else {
      c.impact.coefficients = ImpactCoefficients{s.number("alpha"), s.number("beta")};
    }
    s.finish();
  }
  if (root.has("numerics")) {
    Section s = root.child("numerics");
    auto& p = c.pricing;
    p.time_nodes = static_cast<int>(s.count("time_nodes", p.time_nodes));
    p.max_time_nodes = static_cast<int>(s.count("max_time_nodes", p.max_time_nodes));
    p.time_tolerance = s.number("time_tolerance", p.time_tolerance);
    auto& conv = p.trigger.convolution;
    conv.grid_points = static_cast<int>(s.count("grid_points", conv.grid_points));
    conv.poisson_tail = s.number("poisson_tail", conv.poisson_tail);
    conv.grid_tolerance = s.number("grid_tolerance", conv.grid_tolerance);
    p.trigger.proportion_nodes = static_cast<int>(s.count("proportion_nodes", p.trigger.proportion_nodes));
    p.coupon = variant_or_fail(s, "variant_coupon", to_string(p.coupon), parse_coupon_variant);
    p.exponent = variant_or_fail(s, "variant_exponent", to_string(p.exponent), parse_exponent_variant);
    p.discount = variant_or_fail(s, "variant_discount", to_string(p.discount), parse_discount_variant);
    s.finish();
  }
  if (root.has("simulation")) {
    Section s = root.child("simulation");
    auto& m = c.simulation;
    m.paths = s.count("paths", m.paths);
    m.time_step = s.number("time_step", m.time_step);
    m.seed = s.count("seed", m.seed);
    m.threads = static_cast<unsigned>(s.count("threads", m.threads));
    const auto scheme = s.text("rate_scheme", "signed_root");
    if (scheme == "signed_root") {
      m.rate_scheme = RateScheme::signed_root;
    } else if (scheme == "full_truncation") {
      m.rate_scheme = RateScheme::full_truncation;
    } else {
      Section::fail(s.at("rate_scheme"), "must be signed_root or full_truncation");
    }
    s.finish();
  }
  if (root.has("validation")) {
    Section s = root.child("validation");
    auto& v = c.validation;
    v.survival_times = s.numbers("survival_times", v.survival_times);
    v.martingale_times = s.numbers("martingale_times", v.martingale_times);
    v.trigger_paths = s.count("trigger_paths", v.trigger_paths);
    s.finish();
  }
  if (root.has("output")) {
    Section s = root.child("output");
    if (s.has("directory")) c.output_directory = s.text("directory");
    s.finish();
  }
  root.finish();
  c.bond.validate();
  c.market.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["schema"] = kSchema;
  j["bond"] = {{"maturity", c.bond.maturity},
               {"nominal", c.bond.nominal},
               {"coupon_period", c.bond.coupon_period},
               {"spread", c.bond.spread},
               {"conversion_fraction", c.bond.conversion_fraction},
               {"conversion_exponent", c.bond.conversion_exponent}};
  const auto& m = c.market;
  j["market"] = {{"r0", m.r0},         {"theta_r", m.theta_r}, {"m_r", m.m_r},   {"sigma_r", m.sigma_r},
                 {"s0", m.s0},         {"sigma_s", m.sigma_s}, {"rho", m.rho},   {"mu_s", m.mu_s}};
  if (m.libor0) j["market"]["libor0"] = *m.libor0;

  json model;
  model["thresholds"] = {{"d1", c.model.thresholds.d1}, {"d2", c.model.thresholds.d2}};
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IlaStructure>) {
          model["type"] = "ila";
          model["intensity"] = intensity_json(s.intensity);
          model["severity1"] = severity_json(s.severity1);
          model["severity2"] = severity_json(s.severity2);
        } else if constexpr (std::is_same_v<S, IlpStructure>) {
          model["type"] = "ilp";
          model["region1"] = {{"intensity", intensity_json(s.region1.intensity)},
                              {"severity", severity_json(s.region1.severity)}};
          model["region2"] = {{"intensity", intensity_json(s.region2.intensity)},
                              {"severity", severity_json(s.region2.severity)}};
        } else {
          model["type"] = "pla";
          model["intensity"] = intensity_json(s.intensity);
          model["severity"] = severity_json(s.total_severity);
          if (const auto* d = std::get_if<Degenerate>(&s.proportion.family())) {
            model["proportion"] = {{"family", "degenerate"}, {"p", d->p}};
          } else {
            const auto& b = std::get<Beta>(s.proportion.family());
            model["proportion"] = {{"family", "beta"}, {"a", b.a}, {"b", b.b}};
          }
        }
      },
      c.model.structure);
  j["model"] = model;

  if (c.impact.coefficients) {
    j["impact"] = {{"alpha", c.impact.coefficients->alpha}, {"beta", c.impact.coefficients->beta}};
  } else {
    j["impact"] = {{"delta", c.impact.delta.value_or(0.02)}};
  }
  const auto& p = c.pricing;
  j["numerics"] = {{"time_nodes", p.time_nodes},
                   {"max_time_nodes", p.max_time_nodes},
                   {"time_tolerance", p.time_tolerance},
                   {"grid_points", p.trigger.convolution.grid_points},
                   {"poisson_tail", p.trigger.convolution.poisson_tail},
                   {"grid_tolerance", p.trigger.convolution.grid_tolerance},
                   {"proportion_nodes", p.trigger.proportion_nodes},
                   {"variant_coupon", to_string(p.coupon)},
                   {"variant_exponent", to_string(p.exponent)},
                   {"variant_discount", to_string(p.discount)}};
  const auto& s = c.simulation;
  j["simulation"] = {{"paths", s.paths},
                     {"time_step", s.time_step},
                     {"seed", s.seed},
                     {"threads", s.threads},
                     {"rate_scheme", s.rate_scheme == RateScheme::signed_root ? "signed_root" : "full_truncation"}};
  j["validation"] = {{"survival_times", c.validation.survival_times},
                     {"martingale_times", c.validation.martingale_times},
                     {"trigger_paths", c.validation.trigger_paths}};
  if (c.output_directory) j["output"] = {{"directory", c.output_directory->string()}};
  return j.dump(2) + "\n";
}

std::filesystem::path output_path(const RunConfig* config, const std::string& out_flag,
                                  const std::string& default_name) {
  if (!out_flag.empty()) return out_flag;
  if (config && config->output_directory) return *config->output_directory / default_name;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return std::filesystem::path(env) / default_name;
  return default_name;
}

std::string apply_overrides(const std::string& text, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return text;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigurationError("override must look like key.path=value: " + o);
    const auto key = o.substr(0, eq);
    const auto value = o.substr(eq + 1);
    json v;
    try {
      v = json::parse(value);
    } catch (const json::parse_error&) {
      v = value;
    }
    std::string pointer = "/" + key;
    for (auto& ch : pointer) {
      if (ch == '.') ch = '/';
    }
    j[json::json_pointer(pointer)] = v;
  }
  return j.dump();
}

}  // namespace cococat::cli
