#include "doctest.h"

#include <cmath>
#include <random>

#include "cococat/distributions.hpp"
#include "cococat/errors.hpp"
#include "oracles.hpp"

using namespace cococat;
using doctest::Approx;

namespace {

// int_0^x e^{-theta y} f(y) dy by Simpson's rule in u = log y.
double tilted_mass(const SeverityDistribution& d, double theta, double x) {
  const double lo = std::log(x) - 40.0, hi = std::log(x);
  const int n = 40000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = lo + i * h;
    const double y = std::exp(u);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(-theta * y) * pdf(d, y) * y;
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("laplace closed forms") {
  const auto e = SeverityDistribution::exponential(2.0);
  CHECK(laplace(e, 0.0) == 1.0);
  CHECK(laplace(e, 2.0) == Approx(0.5).epsilon(1e-15));
  const auto g = SeverityDistribution::gamma(2.5, 0.4);
  CHECK(laplace(g, 1.3) == Approx(std::pow(1.0 + 1.3 * 0.4, -2.5)).epsilon(1e-14));
  CHECK(laplace(SeverityDistribution::lognormal(0.3, 0.7), 0.0) == 1.0);
}

TEST_CASE("lognormal laplace against a brute-force sample average") {
  // Total-loss row of the calibration table.
  const auto d = SeverityDistribution::lognormal(-1.477, 0.902);
  const double value = laplace(d, 1.0);
  CHECK(value > std::exp(-mean(d)));
  CHECK(value < 1.0);
  std::mt19937_64 g(20240611);
  std::lognormal_distribution<double> law(-1.477, 0.902);
  const auto mc = oracle::sample_mean(10'000'000, [&] { return std::exp(-law(g)); });
  CHECK(std::abs(value - mc.mean) < 3.0 * mc.se);
}

TEST_CASE("weibull laplace against quadrature in log space") {
  const auto d = SeverityDistribution::weibull(0.8, 1.5);
  for (double z : {0.1, 1.0, 7.0}) {
    CHECK(laplace(d, z) == Approx(tilted_mass(d, z, 1e4)).epsilon(1e-9));
  }
}

TEST_CASE("cdf, pdf and quantile basics") {
  CHECK(cdf(SeverityDistribution::exponential(1.0), 0.0) == 0.0);
  CHECK(quantile(SeverityDistribution::lognormal(-2.0, 1.1), 0.5) == Approx(std::exp(-2.0)).epsilon(1e-13));
  for (const auto& d : {SeverityDistribution::exponential(3.0), SeverityDistribution::lognormal(-1.0, 0.5),
                        SeverityDistribution::gamma(0.7, 2.0), SeverityDistribution::weibull(1.7, 0.3)}) {
    double prev = 0.0;
    for (double x = 0.01; x < 20.0; x *= 1.3) {
      const double f = cdf(d, x);
      CHECK(f >= prev);
      prev = f;
    }
    CHECK(cdf(d, 1e9) == Approx(1.0).epsilon(1e-12));
    for (double q : {0.01, 0.3, 0.9, 0.999}) CHECK(cdf(d, quantile(d, q)) == Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("exponential tilting") {
  const auto e = SeverityDistribution::exponential(1.0);
  const auto t = exp_tilt(e, 1.0);
  for (double x = 0.0; x < 10.0; x += 0.25) CHECK(cdf(t, x) == Approx(1.0 - std::exp(-2.0 * x)).epsilon(1e-12));

  const auto ln = SeverityDistribution::lognormal(-1.477, 0.902);
  CHECK(cdf(exp_tilt(ln, 0.0), 0.7) == cdf(ln, 0.7));

  const double theta = 0.6;
  const auto tl = exp_tilt(ln, theta);
  CHECK(tl.is_tilted());
  const double norm = laplace(ln, theta);
  CHECK(norm > 0.0);
  CHECK(norm <= 1.0);
  for (double x : {0.05, 0.2, 1.0, 3.0}) {
    CHECK(pdf(tl, x) == Approx(std::exp(-theta * x) * pdf(ln, x) / norm).epsilon(1e-12));
    CHECK(cdf(tl, x) == Approx(tilted_mass(ln, theta, x) / norm).epsilon(1e-8));
  }
  for (double z : {0.1, 0.5, 2.0}) {
    CHECK(laplace(tl, z) * norm == Approx(laplace(ln, z + theta)).epsilon(1e-9));
  }
  // nested tilts collapse
  const auto twice = exp_tilt(exp_tilt(ln, 0.2), 0.4);
  CHECK(cdf(twice, 0.5) == Approx(cdf(tl, 0.5)).epsilon(1e-10));
  CHECK(quantile(tl, 0.4) == Approx(quantile(tl, 0.4)).epsilon(1e-12));
  CHECK(cdf(tl, quantile(tl, 0.75)) == Approx(0.75).epsilon(1e-8));
}

TEST_CASE("sampling matches the mean") {
  Philox4x32 g(7, 0);
  const auto ln = SeverityDistribution::lognormal(-1.0, 0.6);
  for (const auto& d : {SeverityDistribution::exponential(2.0), ln, SeverityDistribution::gamma(3.0, 0.5),
                        SeverityDistribution::weibull(2.0, 1.0), exp_tilt(ln, 1.5)}) {
    const auto m = oracle::sample_mean(200000, [&] { return sample(d, g); });
    CHECK(std::abs(m.mean - mean(d)) < 4.0 * m.se);
  }
}

TEST_CASE("expectation helper") {
  const auto ln = SeverityDistribution::lognormal(0.2, 0.5);
  CHECK(expectation(ln, [](double x) { return x * x; }) == Approx(std::exp(0.4 + 0.5)).epsilon(1e-9));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(SeverityDistribution::lognormal(0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(SeverityDistribution::exponential(-1.0), ParameterError);
  CHECK_THROWS_AS(SeverityDistribution::gamma(1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(laplace(SeverityDistribution::exponential(1.0), -0.1), ParameterError);
  CHECK_THROWS_AS(ProportionDistribution::beta(0.0, 1.0), ParameterError);
}

TEST_CASE("proportion laws") {
  const auto b = ProportionDistribution::beta(2.1531, 3.5135);
  CHECK(b.mean() == Approx(0.38).epsilon(1e-3));
  CHECK(b.expect([](double p) { return p; }) == Approx(b.mean()).epsilon(1e-7));
  CHECK(b.expect([](double p) { return p; }, 64, 0.4) == Approx(b.mean()).epsilon(1e-7));
  const double a = 2.1531, c = 3.5135;
  CHECK(b.expect([](double p) { return p * p; }, 64, 0.5) ==
        Approx(a * (a + 1) / ((a + c) * (a + c + 1))).epsilon(1e-12));
  const auto d = ProportionDistribution::degenerate(0.3);
  CHECK(d.expect([](double p) { return p * p; }) == Approx(0.09));
  CHECK(d.pdf(0.3) == 0.0);
}
