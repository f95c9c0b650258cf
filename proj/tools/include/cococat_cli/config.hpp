#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cococat/mc_oracle.hpp"
#include "cococat/pricing.hpp"

namespace cococat::cli {

inline constexpr const char* kSchema = "cococat/v1";
inline constexpr const char* kOutputDirEnv = "COCOCAT_OUTPUT_DIR";

// Either explicit coefficients or the loss size delta they are derived from.
struct ImpactSpec {
  std::optional<double> delta;
  std::optional<ImpactCoefficients> coefficients;

  ImpactCoefficients resolve(const DependenceModel& model) const;
};

struct ValidationSpec {
  std::vector<double> survival_times{0.5, 1.0, 2.5, 5.0};
  std::vector<double> martingale_times{1.0, 5.0};
  std::size_t trigger_paths = 1'000'000;
};

struct RunConfig {
  BondCovenant bond;
  MarketParams market;
  // Placeholder until a model section is read.
  DependenceModel model{IlaStructure{Intensity::constant(0.0), SeverityDistribution::exponential(1.0),
                                     SeverityDistribution::exponential(1.0)},
                        {1.0, 1.0}};
  ImpactSpec impact;
  PricingOptions pricing;
  SimulationConfig simulation;
  ValidationSpec validation;
  // Where commands write files when --out is not given; the environment
  // variable is consulted when this is empty too.
  std::optional<std::filesystem::path> output_directory;
};

// --out beats the config, the config beats the environment, and the
// working directory is the last resort.
std::filesystem::path output_path(const RunConfig* config, const std::string& out_flag,
                                  const std::string& default_name);

// Strict reader: `schema` must equal kSchema and unknown keys anywhere are
// rejected with ConfigurationError naming the JSON path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical JSON form; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& config);

// Applies "a.b.c=value" overrides to the JSON text before parsing. Values
// are read as JSON when possible and as strings otherwise.
std::string apply_overrides(const std::string& text, const std::vector<std::string>& overrides);

}  // namespace cococat::cli
