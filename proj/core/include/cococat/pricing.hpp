#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cococat/loss_models.hpp"
#include "cococat/term_structure.hpp"
#include "cococat/trigger.hpp"

namespace cococat {

// Sign in front of (1 - c Delta) P(t_i) in the floating coupons. `minus`
// follows from valuing each LIBOR fixing with the bond curve.
enum class CouponVariant { minus, plus };

// Time factor of the conversion leg: exp(-nu (1-nu) sigma_s^2 t / 2)
// (`proof`) or exp(-nu (1-nu)^2 sigma_s^2 t / 2) (`theorem`).
enum class ExponentVariant { proof, theorem };

// Short rate fed to the tilted bond price: nu r0 (`scaled`) or r0 (`literal`).
enum class DiscountVariant { scaled, literal };

std::string to_string(CouponVariant v);
std::string to_string(ExponentVariant v);
std::string to_string(DiscountVariant v);
CouponVariant parse_coupon_variant(const std::string& s);
ExponentVariant parse_exponent_variant(const std::string& s);
DiscountVariant parse_discount_variant(const std::string& s);

struct BondCovenant {
  double maturity = 5.0;
  double nominal = 1.0;
  double coupon_period = 0.25;
  double spread = 0.10;               // c, added to LIBOR
  double conversion_fraction = 0.1;   // zeta
  double conversion_exponent = 0.5;   // nu

  int coupon_count() const;
  void validate() const;
};

struct PricingOptions {
  int time_nodes = 200;
  double time_tolerance = 1e-7;  // relative change when doubling the nodes
  int max_time_nodes = 6400;
  TriggerOptions trigger;
  CouponVariant coupon = CouponVariant::minus;
  ExponentVariant exponent = ExponentVariant::proof;
  DiscountVariant discount = DiscountVariant::scaled;
};

struct PriceDiagnostics {
  int time_nodes = 0;                 // nodes per sub-interval at acceptance
  double time_relative_change = 0.0;  // last doubling
  int proportion_nodes = 0;           // 0 unless the split is random
  int max_series_terms = 0;
  double grid_error = 0.0;
  CouponVariant coupon = CouponVariant::minus;
  ExponentVariant exponent = ExponentVariant::proof;
  DiscountVariant discount = DiscountVariant::scaled;
};

struct PriceBreakdown {
  double coupons = 0.0;     // floating coupons paid before the trigger
  double conversion = 0.0;  // shares delivered at the trigger
  double principal = 0.0;   // face value repaid at maturity
  double total = 0.0;
  PriceDiagnostics diagnostics;
};

// Legs against a precomputed physical-measure trigger law.
double coupon_leg(const BondCovenant& bond, const MarketParams& market, const TriggerLaw& law,
                  CouponVariant variant = CouponVariant::minus);
double principal_leg(const BondCovenant& bond, const MarketParams& market, const TriggerLaw& law);

double conversion_leg(const BondCovenant& bond, const MarketParams& market,
                      const DependenceModel& model, const ImpactCoefficients& impact,
                      const PricingOptions& options = {}, PriceDiagnostics* diagnostics = nullptr);

PriceBreakdown price(const BondCovenant& bond, const MarketParams& market,
                     const DependenceModel& model, const ImpactCoefficients& impact,
                     const PricingOptions& options = {});

// The loss-driven factor Phi(t) of the conversion leg for a fixed split p
// (ignored unless the model has a random split).
double conversion_loss_factor(const DependenceModel& model, const ImpactCoefficients& impact,
                              double nu, double t, std::optional<double> p = std::nullopt);

// Grid of prices. Either thresholds come from the explicit d1 x d2 lists, or,
// when `quantiles` is non-empty, from severity quantiles: each region's own
// claim law for ILP/ILA and D1 = D2 = the total-claim quantile for PLA.
struct SweepGrid {
  std::vector<double> d1;
  std::vector<double> d2;
  std::vector<double> nu;
  std::vector<double> quantiles;
};

struct SweepRow {
  double d1;
  double d2;
  double nu;
  std::optional<double> quantile;
  PriceBreakdown price;
};

std::vector<SweepRow> sweep(const BondCovenant& bond, const MarketParams& market,
                            const DependenceModel& model, const ImpactCoefficients& impact,
                            const SweepGrid& grid, const PricingOptions& options = {});

// Header D1,D2,nu,q,EI1,EI2,EI3,total; q is empty outside quantile mode.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Thresholds implied by a severity quantile level.
Thresholds quantile_thresholds(const DependenceModel& model, double q);

}  // namespace cococat
