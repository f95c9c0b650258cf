#pragma once

#include "cococat/calibration.hpp"
#include "cococat/mc_oracle.hpp"
#include "cococat/pricing.hpp"
#include "json.hpp"

namespace cococat::cli {

nlohmann::ordered_json to_json(const PriceBreakdown& p);
nlohmann::ordered_json to_json(const McEstimate& e);
nlohmann::ordered_json to_json(const GofStatistics& g);
nlohmann::ordered_json to_json(const FitReport& r);
nlohmann::ordered_json to_json(const ProportionFit& f);
nlohmann::ordered_json to_json(const IntensityFit& f);

// Shortest text that reads back to the same double.
std::string format_number(double v);

}  // namespace cococat::cli
