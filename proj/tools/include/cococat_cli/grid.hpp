#pragma once

#include <string>
#include <vector>

namespace cococat::cli {

// "0.2,0.5,0.8" or "start:stop:count" (count points, both ends included).
// An empty specification or a zero count is a ConfigurationError.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace cococat::cli
