#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cococat/quadrature.hpp"

using namespace cococat;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto& rule = gauss_legendre(10);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  // degree 19 is the limit for 10 points
  auto f = [](double x) { return std::pow(x, 18) + 3 * std::pow(x, 5); };
  CHECK(integrate(rule, f, 0.0, 1.0) == doctest::Approx(1.0 / 19 + 0.5).epsilon(1e-13));
}

TEST_CASE("mapped points") {
  double s = 0.0;
  for (const auto& q : gauss_legendre_points(32, 0.0, std::numbers::pi)) s += q.w * std::sin(q.x);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("panel doubling converges on a peaked integrand") {
  auto f = [](double x) { return 1.0 / (1e-3 + x * x); };
  const auto r = integrate_panels(f, -1.0, 1.0, 1e-10);
  CHECK(r.converged);
  const double exact = 2.0 / std::sqrt(1e-3) * std::atan(1.0 / std::sqrt(1e-3));
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
}
