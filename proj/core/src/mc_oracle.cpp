#include "cococat/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "cococat/errors.hpp"
#include "cococat/random.hpp"

namespace cococat {
namespace {

constexpr std::size_t kBlock = 512;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Running mean and centred second moment; merged with Chan's update.
struct Stat {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Stat& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }

  Moments moments() const {
    const double var = n > 1.0 ? m2 / (n - 1.0) : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0) / std::max(n, 1.0))};
  }
};

using StatVector = std::vector<Stat>;

void merge_into(StatVector& a, const StatVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
}

// Runs path_fn(path, acc) over all paths in fixed blocks, then reduces the
// block results pairwise in block order, so the answer never depends on the
// thread count or scheduling.
template <class PathFn>
StatVector run_paths(std::size_t paths, std::size_t width, unsigned threads, PathFn&& path_fn,
                     std::vector<std::string>* dumps = nullptr) {
  if (paths == 0) throw ConfigurationError("path count must be >= 1");
  const std::size_t blocks = (paths + kBlock - 1) / kBlock;
  std::vector<StatVector> results(blocks, StatVector(width));
  if (dumps) dumps->assign(blocks, {});
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      const std::size_t end = std::min(paths, (b + 1) * kBlock);
      std::ostringstream os;
      for (std::size_t p = b * kBlock; p < end; ++p) {
        path_fn(p, results[b], dumps ? &os : nullptr);
      }
      if (dumps) (*dumps)[b] = os.str();
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, blocks));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t stride = 1; stride < blocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < blocks; i += 2 * stride) merge_into(results[i], results[i + stride]);
  }
  return results[0];
}

struct NormalPair {
  double a;
  double b;
};

NormalPair normal_pair(Philox4x32& eng) {
  const double r = std::sqrt(-2.0 * std::log(uniform_open(eng)));
  const double phase = 2.0 * std::numbers::pi * uniform_open(eng);
  return {r * std::cos(phase), r * std::sin(phase)};
}

double unit_exponential(Philox4x32& eng) { return -std::log(uniform_open(eng)); }

struct LossEvent {
  double t;
  double x1;
  double x2;
};

// Event times of one clock on [0, horizon] by inverting Lambda.
template <class OnEvent>
void event_times(const Intensity& lam, double horizon, Philox4x32& eng, OnEvent&& on_event) {
  double level = 0.0;
  for (;;) {
    level += unit_exponential(eng);
    const double t = lam.inverse_cumulative(level);
    if (!(t <= horizon)) return;
    on_event(t);
  }
}

void simulate_losses(const DependenceModel& model, double horizon, Philox4x32& eng,
                     std::vector<LossEvent>& out) {
  out.clear();
  if (const auto* s = std::get_if<IlpStructure>(&model.structure)) {
    event_times(s->region1.intensity, horizon, eng,
                [&](double t) { out.push_back({t, sample(s->region1.severity, eng), 0.0}); });
    const std::size_t first = out.size();
    event_times(s->region2.intensity, horizon, eng,
                [&](double t) { out.push_back({t, 0.0, sample(s->region2.severity, eng)}); });
    std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                       [](const LossEvent& a, const LossEvent& b) { return a.t < b.t; });
    return;
  }
  if (const auto* s = std::get_if<IlaStructure>(&model.structure)) {
    event_times(s->intensity, horizon, eng, [&](double t) {
      const double a = sample(s->severity1, eng);
      const double b = sample(s->severity2, eng);
      out.push_back({t, a, b});
    });
    return;
  }
  const auto& s = std::get<PlaStructure>(model.structure);
  const double p = s.proportion.sample(eng);  // one split per path
  event_times(s.intensity, horizon, eng, [&](double t) {
    const double x = sample(s.total_severity, eng);
    out.push_back({t, p * x, (1.0 - p) * x});
  });
}

// Index of the event at which either cumulative loss reaches its threshold.
std::ptrdiff_t first_crossing(const std::vector<LossEvent>& events, const Thresholds& d) {
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    l1 += events[k].x1;
    l2 += events[k].x2;
    if (l1 >= d.d1 || l2 >= d.d2) return static_cast<std::ptrdiff_t>(k);
  }
  return -1;
}

// Financial path on a uniform grid: short-rate root, int_0^t r, and the
// equity Brownian motion W2 = rho W1 + sqrt(1 - rho^2) W_perp.
struct RatePath {
  std::vector<double> root;
  std::vector<double> integral;
  std::vector<double> w2;
};

void simulate_rates(const MarketParams& m, RateScheme scheme, double dt, std::size_t steps,
                    Philox4x32& eng, RatePath& path, bool with_equity) {
  path.root.resize(steps + 1);
  path.integral.resize(steps + 1);
  if (with_equity) path.w2.resize(steps + 1);
  const double sq = std::sqrt(dt);
  const double perp = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));
  path.integral[0] = 0.0;
  if (with_equity) path.w2[0] = 0.0;
  if (scheme == RateScheme::signed_root) {
    double y = std::sqrt(m.r0);
    path.root[0] = y;
    // Without the equity driver both normals of a pair go to the rate.
    NormalPair z{};
    for (std::size_t k = 0; k < steps; ++k) {
      if (with_equity || k % 2 == 0) {
        z = normal_pair(eng);
      } else {
        z.a = z.b;
      }
      const double next = y - 0.5 * m.theta_r * dt + 0.5 * m.sigma_r * sq * z.a;
      path.integral[k + 1] = path.integral[k] + 0.5 * dt * (y * y + next * next);
      if (with_equity) path.w2[k + 1] = path.w2[k] + sq * (m.rho * z.a + perp * z.b);
      y = next;
      path.root[k + 1] = y;
    }
    return;
  }
  double r = m.r0;
  path.root[0] = std::sqrt(r);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto z = normal_pair(eng);
    const double rp = std::max(r, 0.0);
    const double next = r + m.theta_r * (m.m_r - std::sqrt(rp)) * dt + m.sigma_r * std::sqrt(rp) * sq * z.a;
    path.integral[k + 1] = path.integral[k] + 0.5 * dt * (rp + std::max(next, 0.0));
    if (with_equity) path.w2[k + 1] = path.w2[k] + sq * (m.rho * z.a + perp * z.b);
    r = next;
    path.root[k + 1] = std::sqrt(std::max(r, 0.0));
  }
}

double lerp_at(const std::vector<double>& v, double t, double dt) {
  const double u = t / dt;
  const std::size_t last = v.size() - 1;
  const std::size_t k = std::min(static_cast<std::size_t>(u), last - 1);
  const double w = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
  return (1.0 - w) * v[k] + w * v[k + 1];
}

McEstimate from_stats(const StatVector& s, std::size_t offset, std::size_t paths, double dt,
                      bool legs) {
  McEstimate e;
  const auto total = s[offset + 3].moments();
  e.mean = total.mean;
  e.std_error = total.std_error;
  e.paths = paths;
  e.time_step = dt;
  if (legs) {
    e.coupons = s[offset + 0].moments();
    e.conversion = s[offset + 1].moments();
    e.principal = s[offset + 2].moments();
  }
  return e;
}

}  // namespace

double McEstimate::z_score(double reference) const {
  const double diff = mean - reference;
  if (std_error == 0.0) return diff == 0.0 ? 0.0 : std::copysign(kInf, diff);
  return diff / std_error;
}

std::vector<McEstimate> simulate_prices(const BondCovenant& bond, const MarketParams& market,
                                        const DependenceModel& model,
                                        const ImpactCoefficients& impact,
                                        std::span<const Scenario> scenarios,
                                        const SimulationConfig& config) {
  bond.validate();
  market.validate();
  if (!(config.time_step > 0.0)) throw ConfigurationError("time step must be > 0");
  if (scenarios.empty()) return {};
  for (const auto& sc : scenarios) {
    if (!(sc.nu >= 0.0 && sc.nu <= 1.0)) throw ParameterError("conversion exponent must lie in [0, 1]");
    DependenceModel m = model;
    m.thresholds = sc.thresholds;
    m.validate();
  }

  const int coupons = bond.coupon_count();
  const double period = bond.coupon_period;
  const auto per_period = static_cast<std::size_t>(std::ceil(period / config.time_step - 1e-9));
  const double dt = period / static_cast<double>(per_period);
  const std::size_t steps = per_period * static_cast<std::size_t>(coupons);
  const double T = bond.maturity;
  const Kappa k = kappa(model, impact);
  const double libor0 = initial_libor(market, period);
  const double vol = market.sigma_s;
  const std::size_t width = 4 * scenarios.size();

  thread_local RatePath path;
  thread_local std::vector<LossEvent> events;
  thread_local std::vector<double> fixings, discount;

  auto path_fn = [&](std::size_t p, StatVector& acc, std::ostream* dump) {
    Philox4x32 fin(config.seed, 2 * static_cast<std::uint64_t>(p));
    Philox4x32 cat(config.seed, 2 * static_cast<std::uint64_t>(p) + 1);
    simulate_rates(market, config.rate_scheme, dt, steps, fin, path, true);
    simulate_losses(model, T, cat, events);

    fixings.assign(coupons, libor0);
    discount.assign(coupons + 1, 1.0);
    for (int i = 1; i <= coupons; ++i) {
      const std::size_t g = per_period * static_cast<std::size_t>(i);
      discount[i] = std::exp(-path.integral[g]);
      if (i < coupons) {
        fixings[i] = libor_from_root(path.root[g], period, market.theta_r, market.sigma_r);
      }
    }

    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      const auto& sc = scenarios[s];
      const auto hit = first_crossing(events, sc.thresholds);
      const double tau = hit < 0 ? kInf : events[static_cast<std::size_t>(hit)].t;
      double coupon_value = 0.0;
      for (int i = 1; i <= coupons; ++i) {
        if (tau > i * period) {
          coupon_value += (fixings[i - 1] + bond.spread) * period * bond.nominal * discount[i];
        }
      }
      double conversion = 0.0;
      double principal = 0.0;
      if (tau <= T) {
        double l1 = 0.0, l2 = 0.0;
        for (std::ptrdiff_t e = 0; e <= hit; ++e) {
          l1 += events[static_cast<std::size_t>(e)].x1;
          l2 += events[static_cast<std::size_t>(e)].x2;
        }
        const double integral = lerp_at(path.integral, tau, dt);
        const double w2 = lerp_at(path.w2, tau, dt);
        const double log_sf = vol * w2 + integral - 0.5 * vol * vol * tau;
        const double log_sc = -impact.alpha * l1 - impact.beta * l2 + compensator(model, impact, k, tau);
        const double log_s = std::log(market.s0) + log_sf + log_sc;
        conversion = bond.conversion_fraction * bond.nominal * std::exp((1.0 - sc.nu) * log_s - integral);
      } else {
        principal = bond.nominal * discount[coupons];
      }
      const double total = coupon_value + conversion + principal;
      acc[4 * s + 0].add(coupon_value);
      acc[4 * s + 1].add(conversion);
      acc[4 * s + 2].add(principal);
      acc[4 * s + 3].add(total);
      if (dump) {
        char line[256];
        std::snprintf(line, sizeof line, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", p, s, tau,
                      coupon_value, conversion, principal, total);
        *dump << line;
      }
    }
  };

  std::vector<std::string> dumps;
  const auto stats =
      run_paths(config.paths, width, config.threads, path_fn, config.path_dump ? &dumps : nullptr);
  if (config.path_dump) {
    *config.path_dump << "path,scenario,tau,coupons,conversion,principal,total\n";
    for (const auto& d : dumps) *config.path_dump << d;
  }
  std::vector<McEstimate> out;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    out.push_back(from_stats(stats, 4 * s, config.paths, dt, true));
  }
  return out;
}

McEstimate simulate_price(const BondCovenant& bond, const MarketParams& market,
                          const DependenceModel& model, const ImpactCoefficients& impact,
                          const SimulationConfig& config) {
  const Scenario sc{model.thresholds, bond.conversion_exponent};
  return simulate_prices(bond, market, model, impact, std::span<const Scenario>(&sc, 1), config)
      .front();
}

McEstimate martingale_check(const DependenceModel& model, const ImpactCoefficients& impact,
                            const Kappa& k, double t, const SimulationConfig& config) {
  if (!(t >= 0.0)) throw ParameterError("time must be >= 0");
  const double drift = compensator(model, impact, k, t);
  thread_local std::vector<LossEvent> events;
  auto path_fn = [&](std::size_t p, StatVector& acc, std::ostream*) {
    Philox4x32 cat(config.seed, 2 * static_cast<std::uint64_t>(p) + 1);
    simulate_losses(model, t, cat, events);
    double l1 = 0.0, l2 = 0.0;
    for (const auto& e : events) {
      l1 += e.x1;
      l2 += e.x2;
    }
    acc[0].add(std::exp(-impact.alpha * l1 - impact.beta * l2 + drift));
  };
  const auto stats = run_paths(config.paths, 1, config.threads, path_fn);
  McEstimate e;
  const auto m = stats[0].moments();
  e.mean = m.mean;
  e.std_error = m.std_error;
  e.paths = config.paths;
  return e;
}

std::vector<double> simulate_trigger_times(const DependenceModel& model,
                                           const SimulationConfig& config, double horizon) {
  model.validate();
  if (!(horizon >= 0.0)) throw ParameterError("horizon must be >= 0");
  std::vector<double> out(config.paths, kInf);
  thread_local std::vector<LossEvent> events;
  auto path_fn = [&](std::size_t p, StatVector&, std::ostream*) {
    Philox4x32 cat(config.seed, 2 * static_cast<std::uint64_t>(p) + 1);
    simulate_losses(model, horizon, cat, events);
    const auto hit = first_crossing(events, model.thresholds);
    if (hit >= 0) out[p] = events[static_cast<std::size_t>(hit)].t;
  };
  run_paths(config.paths, 1, config.threads, path_fn);
  return out;
}

std::vector<McEstimate> simulate_zcb(const MarketParams& market, std::span<const double> maturities,
                                     const SimulationConfig& config) {
  market.validate();
  if (!(config.time_step > 0.0)) throw ConfigurationError("time step must be > 0");
  std::vector<std::size_t> index;
  std::size_t steps = 0;
  for (double T : maturities) {
    const double u = T / config.time_step;
    if (!(T >= 0.0) || std::abs(u - std::round(u)) > 1e-6) {
      throw ConfigurationError("maturities must be multiples of the time step");
    }
    index.push_back(static_cast<std::size_t>(std::llround(u)));
    steps = std::max(steps, index.back());
  }
  thread_local RatePath path;
  auto path_fn = [&](std::size_t p, StatVector& acc, std::ostream*) {
    Philox4x32 fin(config.seed, 2 * static_cast<std::uint64_t>(p));
    simulate_rates(market, config.rate_scheme, config.time_step, steps, fin, path, false);
    for (std::size_t i = 0; i < index.size(); ++i) acc[i].add(std::exp(-path.integral[index[i]]));
  };
  const auto stats = run_paths(config.paths, index.size(), config.threads, path_fn);
  std::vector<McEstimate> out;
  for (const auto& s : stats) {
    McEstimate e;
    const auto m = s.moments();
    e.mean = m.mean;
    e.std_error = m.std_error;
    e.paths = config.paths;
    e.time_step = config.time_step;
    out.push_back(e);
  }
  return out;
}

std::vector<SimulatedLoss> simulate_loss_history(const DependenceModel& model, double horizon,
                                                 std::uint64_t seed) {
  model.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigurationError("horizon must be > 0");
  Philox4x32 eng(seed, 0);
  std::vector<SimulatedLoss> out;
  if (const auto* s = std::get_if<PlaStructure>(&model.structure)) {
    event_times(s->intensity, horizon, eng, [&](double t) {
      const double p = s->proportion.sample(eng);
      const double x = sample(s->total_severity, eng);
      out.push_back({t, p * x, (1.0 - p) * x});
    });
    return out;
  }
  std::vector<LossEvent> events;
  simulate_losses(model, horizon, eng, events);
  for (const auto& e : events) out.push_back({e.t, e.x1, e.x2});
  return out;
}

}  // namespace cococat
