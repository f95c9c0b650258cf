#include "cococat/goodness_of_fit.hpp"

#include <algorithm>
#include <cmath>

#include "cococat/errors.hpp"

namespace cococat {

GofStatistics gof_from_uniforms(std::vector<double> u) {
  if (u.empty()) throw FitError("goodness of fit needs at least one sample");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  GofStatistics s;
  s.cvm = 1.0 / (12.0 * n);
  double ad_sum = 0.0;
  // The AD log terms blow up at exactly 0 or 1; clamp to the nearest
  // representable interior points.
  constexpr double lo = 1e-300;
  constexpr double hi = 1.0 - 1e-16;
  const std::size_t m = u.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double k = static_cast<double>(i + 1);
    s.ks = std::max({s.ks, k / n - u[i], u[i] - (k - 1.0) / n});
    const double c = u[i] - (2.0 * k - 1.0) / (2.0 * n);
    s.cvm += c * c;
    const double a = std::clamp(u[i], lo, hi);
    const double b = std::clamp(u[m - 1 - i], lo, hi);
    ad_sum += (2.0 * k - 1.0) * (std::log(a) + std::log1p(-b));
  }
  s.ad = -n - ad_sum / n;
  return s;
}

GofStatistics gof_statistics(std::span<const double> samples,
                             const std::function<double(double)>& cdf) {
  std::vector<double> u;
  u.reserve(samples.size());
  for (double x : samples) u.push_back(cdf(x));
  return gof_from_uniforms(std::move(u));
}

}  // namespace cococat
