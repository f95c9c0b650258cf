#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "cococat/calibration.hpp"
#include "cococat/errors.hpp"
#include "paper_setup.hpp"

using namespace cococat;
using doctest::Approx;

namespace {

std::vector<double> draws(std::size_t n, std::uint64_t seed, auto&& law) {
  std::mt19937_64 g(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = law(g);
  return x;
}

}  // namespace

TEST_CASE("degenerate samples are rejected") {
  const std::vector<double> same{std::exp(1.0), std::exp(1.0)};
  CHECK_THROWS_AS(fit_severity(same, SeverityFamily::lognormal), FitError);
  const std::vector<double> half(50, 0.5);
  CHECK_THROWS_AS(fit_beta(half), FitError);
}

TEST_CASE("lognormal recovery") {
  const auto x = draws(10000, 1, std::lognormal_distribution<double>(-2.439, 1.183));
  const auto r = fit_severity(x, SeverityFamily::lognormal);
  CHECK(std::abs(r.law.parameter("mu") + 2.439) < 0.05);
  CHECK(std::abs(r.law.parameter("sigma") - 1.183) < 0.05);
  const auto wrong = SeverityDistribution::lognormal(r.law.parameter("mu") + 2.0, r.law.parameter("sigma"));
  const auto off = gof_statistics(x, [&](double v) { return cdf(wrong, v); });
  CHECK(r.gof.ks < off.ks);
  CHECK(r.gof.cvm < off.cvm);
  CHECK(r.gof.ad < off.ad);
  CHECK(r.gof.ks >= 0.0);
}

TEST_CASE("gamma and weibull recovery") {
  const auto g = draws(20000, 2, std::gamma_distribution<double>(2.5, 0.3));
  const auto rg = fit_severity(g, SeverityFamily::gamma);
  CHECK(rg.law.parameter("shape") == Approx(2.5).epsilon(0.05));
  CHECK(rg.law.parameter("scale") == Approx(0.3).epsilon(0.05));
  const auto w = draws(20000, 3, std::weibull_distribution<double>(0.7, 1.8));
  const auto rw = fit_severity(w, SeverityFamily::weibull);
  CHECK(rw.law.parameter("shape") == Approx(0.7).epsilon(0.03));
  CHECK(rw.law.parameter("scale") == Approx(1.8).epsilon(0.05));
  CHECK(rw.law.to_severity().family().index() == 3);
}

TEST_CASE("all families and selection") {
  const auto x = draws(3000, 4, std::lognormal_distribution<double>(-1.477, 0.902));
  const auto reports = fit_all_families(x);
  CHECK(reports.size() == 6);
  for (const auto& r : reports) {
    CHECK(r.gof.ks >= 0.0);
    CHECK(r.gof.cvm >= 0.0);
    CHECK(std::isfinite(r.log_likelihood));
  }
  for (auto c : {SelectionCriterion::ks, SelectionCriterion::cvm, SelectionCriterion::ad}) {
    const auto& best = select_best(reports, c);
    CHECK(pricing_admissible(best.law.family));
    auto stat = [c](const FitReport& r) {
      return c == SelectionCriterion::ks ? r.gof.ks : c == SelectionCriterion::cvm ? r.gof.cvm : r.gof.ad;
    };
    for (const auto& r : reports) {
      if (pricing_admissible(r.law.family)) CHECK(stat(best) <= stat(r));
    }
  }
  CHECK(select_best(reports).law.family == SeverityFamily::lognormal);
  for (const auto& r : reports) {
    if (!pricing_admissible(r.law.family)) CHECK_THROWS_AS(r.law.to_severity(), ConfigurationError);
  }
  CHECK(parse_severity_family("gev") == SeverityFamily::gev);
  CHECK_THROWS_AS(parse_severity_family("cauchy"), ConfigurationError);
}

TEST_CASE("bootstrap p-values") {
  const auto x = draws(400, 5, std::lognormal_distribution<double>(0.0, 1.0));
  FitOptions o;
  o.bootstrap_replicates = 100;
  const auto r = fit_severity(x, SeverityFamily::lognormal, o);
  REQUIRE(r.p_values.has_value());
  CHECK(r.p_values->ks > 0.01);
  CHECK(r.p_values->ks <= 1.0);
}

TEST_CASE("poisson intensity") {
  const double one[] = {1.0};
  CHECK(estimate_hpp_intensity(one).rate == Approx(1.0));

  std::mt19937_64 g(6);
  std::exponential_distribution<double> gap(1.4);
  std::vector<double> times;
  for (double t = gap(g); t <= 26.0; t += gap(g)) times.push_back(t);
  const auto fit = estimate_hpp_intensity(times);
  const auto [lo, hi] = hpp_bootstrap_interval(fit.rate, 26.0, 1000, 7);
  CHECK(lo <= 1.4);
  CHECK(hi >= 1.4);
  CHECK(fit.mse >= 0.0);
  CHECK(fit.mae >= 0.0);
  CHECK(fit.mape >= 0.0);
}

TEST_CASE("beta proportions") {
  std::mt19937_64 g(8);
  std::gamma_distribution<double> a(paper::beta_a), b(paper::beta_b);
  std::vector<double> p(10000);
  for (auto& v : p) {
    const double x = a(g), y = b(g);
    v = x / (x + y);
  }
  const auto fit = fit_beta(p);
  CHECK(std::abs(fit.mean() - 0.38) < 0.02);
  CHECK(paper::beta_a / (paper::beta_a + paper::beta_b) == Approx(0.38).epsilon(1e-3));
  CHECK(fit.a == Approx(paper::beta_a).epsilon(0.1));
  CHECK(fit.b == Approx(paper::beta_b).epsilon(0.1));
}

TEST_CASE("split fit skips all-or-nothing events") {
  std::istringstream in(
      "date,loss_region1,loss_region2\n"
      "2001-01-05,0.5,0.5\n2001-02-05,0.2,0.6\n2001-03-05,0,1.0\n2001-04-05,0.3,0.3\n2001-05-05,0.9,0.2\n");
  const auto fit = fit_proportion(parse_losses(in));
  CHECK(fit.excluded == 1);
  CHECK(fit.used == 4);
}

TEST_CASE("impact coefficients") {
  const auto tx = paper::region2();
  const DependenceModel m{IlaStructure{Intensity::constant(1.4), paper::region1(), tx}, {1, 1}};
  CHECK(impact_coefficients(0.02, m).beta == Approx(0.02 / std::exp(-1.7393)).epsilon(1e-4));
  const auto e = SeverityDistribution::exponential(50.0);  // mean 0.02
  const DependenceModel unit{IlaStructure{Intensity::constant(1.0), e, e}, {1, 1}};
  CHECK(impact_coefficients(0.02, unit).alpha == Approx(1.0).epsilon(1e-14));
  const auto c = impact_coefficients(0.02, paper::cpla());
  CHECK(c.alpha / c.beta == Approx((1 - 0.38) / 0.38).epsilon(1e-14));
}
