#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cococat/loss_models.hpp"
#include "cococat/pricing.hpp"
#include "cococat/term_structure.hpp"

namespace cococat {

// How the short rate is stepped. `signed_root` simulates y = +-sqrt(r)
// exactly (an arithmetic Brownian motion), which is the process the closed
// form prices. `full_truncation` is an Euler scheme for
// dr = theta (m - sqrt(r)) dt + sigma sqrt(r) dW kept for comparison.
enum class RateScheme { signed_root, full_truncation };

struct SimulationConfig {
  std::size_t paths = 100000;
  double time_step = 1e-3;
  std::uint64_t seed = 20240611;
  RateScheme rate_scheme = RateScheme::signed_root;
  unsigned threads = 0;  // 0 = hardware concurrency
  // Per-path payoffs as CSV (path,scenario,tau,coupons,conversion,principal,total).
  std::ostream* path_dump = nullptr;
};

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  double time_step = 0.0;
  std::optional<Moments> coupons;
  std::optional<Moments> conversion;
  std::optional<Moments> principal;

  // (mean - reference) / std_error
  double z_score(double reference) const;
};

McEstimate simulate_price(const BondCovenant& bond, const MarketParams& market,
                          const DependenceModel& model, const ImpactCoefficients& impact,
                          const SimulationConfig& config);

// Many (thresholds, nu) pairs priced on one set of paths. Path i uses the
// same random numbers for every scenario, and for every model sharing the seed.
struct Scenario {
  Thresholds thresholds;
  double nu;
};
std::vector<McEstimate> simulate_prices(const BondCovenant& bond, const MarketParams& market,
                                        const DependenceModel& model,
                                        const ImpactCoefficients& impact,
                                        std::span<const Scenario> scenarios,
                                        const SimulationConfig& config);

// E[S_t^C] for S_t^C = exp(-alpha L1_t - beta L2_t + alpha k1 Lambda1_t + beta k2 Lambda2_t).
McEstimate martingale_check(const DependenceModel& model, const ImpactCoefficients& impact,
                            const Kappa& k, double t, const SimulationConfig& config);

// Trigger times from exact event-driven paths; +inf when tau > horizon.
std::vector<double> simulate_trigger_times(const DependenceModel& model,
                                           const SimulationConfig& config, double horizon);

// E[exp(-int_0^T r)] for each maturity; maturities must lie on the step grid.
std::vector<McEstimate> simulate_zcb(const MarketParams& market, std::span<const double> maturities,
                                     const SimulationConfig& config);

// One synthetic loss history on [0, horizon]. Unlike the pricing paths, a
// random split is redrawn for every event, which is what a proportion fit
// across historical events assumes.
struct SimulatedLoss {
  double t;
  double loss1;
  double loss2;
};
std::vector<SimulatedLoss> simulate_loss_history(const DependenceModel& model, double horizon,
                                                 std::uint64_t seed);

}  // namespace cococat
