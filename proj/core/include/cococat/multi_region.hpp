#pragma once

#include <vector>

#include "cococat/pricing.hpp"

namespace cococat {

struct RegionSpec {
  CompoundPoissonSpec process;
  double threshold;
  double impact;  // log-price sensitivity to this region's losses
};

// ilp: independent clocks per region. ila: one shared clock, so every region
// must carry the same intensity.
enum class RegionCoupling { ilp, ila };

// R-region price. Implemented separately from the two-region engine so the
// two can be cross-checked against each other.
PriceBreakdown price_multi_region(const BondCovenant& bond, const MarketParams& market,
                                  const std::vector<RegionSpec>& regions, RegionCoupling coupling,
                                  const PricingOptions& options = {});

}  // namespace cococat
