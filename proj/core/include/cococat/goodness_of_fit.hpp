#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cococat {

struct GofStatistics {
  double ks = 0.0;   // sup |F_n - F|
  double cvm = 0.0;  // Cramer-von Mises W^2
  double ad = 0.0;   // Anderson-Darling A^2
};

// Statistics of the probability-integral transforms u_i = F(x_i).
GofStatistics gof_from_uniforms(std::vector<double> u);

GofStatistics gof_statistics(std::span<const double> samples,
                             const std::function<double(double)>& cdf);

}  // namespace cococat
