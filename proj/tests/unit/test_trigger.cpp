#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "cococat/quadrature.hpp"
#include "cococat/trigger.hpp"
#include "oracles.hpp"
#include "paper_setup.hpp"

using namespace cococat;
using doctest::Approx;

namespace {


DependenceModel exp_ilp(double l1, double l2, double d1, double d2) {
  return {IlpStructure{{Intensity::constant(l1), SeverityDistribution::exponential(1.0)},
                       {Intensity::constant(l2), SeverityDistribution::exponential(1.0)}},
          {d1, d2}};
}

// First time a rate-`rate` compound Poisson sum of Exp(1) claims reaches d.
double crossing_time(std::mt19937_64& g, double rate, double d) {
  std::exponential_distribution<double> gap(rate), claim(1.0);
  double t = 0.0, l = 0.0;
  while (true) {
    t += gap(g);
    l += claim(g);
    if (l >= d) return t;
  }
}

// Single-region density with Exp(1) claims: G_n = P(Erlang(n) < d).
double single_density(double t, double rate, double d) {
  const double m = rate * t;
  double w = std::exp(-m), s = 0.0;
  for (int n = 0; n < 200; ++n) {
    s += w * (oracle::erlang_cdf(n, d) - oracle::erlang_cdf(n + 1, d));
    w *= m / (n + 1);
  }
  return rate * s;
}

}  // namespace

TEST_CASE("boundary cases") {
  const auto m = paper::ila();
  CHECK(survival_ila(0.0, m) == 1.0);
  CHECK(survival_ilp(0.0, paper::ilp()) == 1.0);
  const auto far = paper::ilp(1e9 * std::exp(-4.564), 1e9 * std::exp(-2.439));
  CHECK(survival_ilp(5.0, far) == Approx(1.0).epsilon(1e-9));
  // vanishing threshold: the first event triggers
  const auto tiny = paper::ila(1e-12, 2.0);
  for (double t : {0.3, 1.0, 4.0}) CHECK(survival_ila(t, tiny) == Approx(std::exp(-1.4 * t)).epsilon(1e-9));
}

TEST_CASE("ILP survival against independent paths") {
  const auto m = exp_ilp(1.0, 1.0, 1.0, 1.0);
  const double s = survival_ilp(1.0, m);
  std::mt19937_64 g(11);
  const int n = 1'000'000;
  int alive = 0;
  for (int i = 0; i < n; ++i) alive += std::min(crossing_time(g, 1, 1), crossing_time(g, 1, 1)) > 1.0;
  CHECK(std::abs(static_cast<double>(alive) / n - s) < 3.0 * oracle::binomial_sigma(s, n));
}

TEST_CASE("ILA density integrates to the trigger probability") {
  const auto m = paper::ila(0.4, 2.0);
  const double horizon = 30.0;
  const auto law = trigger_law(m, horizon);
  double mass = 0.0;
  for (int k = 0; k < 60; ++k) {
    mass += integrate(gauss_legendre(40), [&](double t) { return law.density(t); }, k * 0.5, (k + 1) * 0.5);
  }
  CHECK(mass + law.survival(horizon) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ILA survival against independent paths") {
  const auto m = paper::ila(0.4, 2.0);
  const double s = survival_ila(2.5, m);
  std::mt19937_64 g(12);
  std::lognormal_distribution<double> x1(-4.564, 1.813), x2(-2.439, 1.183);
  const int n = 1'000'000;
  int alive = 0;
  for (int i = 0; i < n; ++i) {
    alive += oracle::survives(g, 1.4, 2.5, 0.4, 2.0, [&](auto& e) { return std::pair{x1(e), x2(e)}; });
  }
  CHECK(std::abs(static_cast<double>(alive) / n - s) < 3.0 * oracle::binomial_sigma(s, n));
}

TEST_CASE("fixed split reduces to one region") {
  const double p = 0.25;
  const auto m = paper::cpla(1.0, 3.0);  // D1/p = D2/(1-p) = 4
  const auto& s = std::get<PlaStructure>(m.structure);
  for (double t : {0.5, 2.0, 5.0}) {
    CHECK(survival_pla_given_p(t, m, p) ==
          Approx(compound_poisson_cdf(s.intensity.cumulative(t), s.total_severity, 4.0)).epsilon(1e-9));
  }
  double prev = survival_pla_given_p(1.0, m, 1e-6);
  double jump = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double q = 1e-6 + i * (1.0 - 2e-6) / 400;
    const double cur = survival_pla_given_p(1.0, m, q);
    jump = std::max(jump, std::abs(cur - prev));
    prev = cur;
  }
  // 400 steps across a smooth curve; a discontinuity would show up as a spike
  CHECK(jump < 5e-3);
}

TEST_CASE("random split survival against independent paths") {
  const auto m = paper::rpla(1.0, 1.0);
  const double s = survival_pla(1.0, m);
  std::mt19937_64 g(13);
  std::lognormal_distribution<double> x(-1.477, 0.902);
  std::gamma_distribution<double> ga(paper::beta_a), gb(paper::beta_b);
  const int n = 1'000'000;
  int alive = 0;
  for (int i = 0; i < n; ++i) {
    const double a = ga(g), b = gb(g);
    const double p = a / (a + b);
    alive += oracle::survives(g, 1.4, 1.0, 1.0, 1.0, [&](auto& e) {
      const double v = x(e);
      return std::pair{p * v, (1 - p) * v};
    });
  }
  CHECK(std::abs(static_cast<double>(alive) / n - s) < 3.0 * oracle::binomial_sigma(s, n));
}

TEST_CASE("ILP density shapes") {
  const auto sym = exp_ilp(1.3, 1.3, 2.0, 2.0);
  const auto one = exp_ilp(1.3, 1.3, 2.0, 1e9);
  for (double t : {0.2, 1.0, 3.0}) {
    const double f1 = trigger_density_ilp(t, one);
    CHECK(f1 == Approx(single_density(t, 1.3, 2.0)).epsilon(1e-8).scale(1e-8));
    CHECK(trigger_density_ilp(t, sym) == Approx(2.0 * f1 * survival_ilp(t, one)).epsilon(1e-10));
  }
}

TEST_CASE("ILP density against a histogram") {
  const auto m = exp_ilp(1.0, 0.7, 1.5, 1.0);
  const auto law = trigger_law(m, 5.0);
  const int bins = 50;
  const double width = 5.0 / bins;
  std::vector<double> expected(bins + 1);
  for (int b = 0; b < bins; ++b) {
    expected[b] = integrate(gauss_legendre(20), [&](double t) { return law.density(t); }, b * width, (b + 1) * width);
  }
  expected[bins] = law.survival(5.0);
  std::vector<int> counts(bins + 1, 0);
  std::mt19937_64 g(14);
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double tau = std::min(crossing_time(g, 1.0, 1.5), crossing_time(g, 0.7, 1.0));
    ++counts[tau >= 5.0 ? bins : static_cast<int>(tau / width)];
  }
  double chi2 = 0.0;
  for (int b = 0; b <= bins; ++b) {
    const double e = expected[b] * n;
    chi2 += (counts[b] - e) * (counts[b] - e) / e;
  }
  CHECK(oracle::chi2_sf(chi2, bins) > 0.01);
}
