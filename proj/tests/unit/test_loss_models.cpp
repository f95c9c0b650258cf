#include "doctest.h"

#include <cmath>
#include <random>

#include "cococat/errors.hpp"
#include "cococat/loss_models.hpp"
#include "oracles.hpp"
#include "paper_setup.hpp"

using namespace cococat;
using doctest::Approx;

TEST_CASE("piecewise intensity") {
  const auto lam = Intensity::piecewise({0.0, 1.0, 3.0}, {2.0, 0.0, 0.5});
  CHECK(lam.rate(0.5) == 2.0);
  CHECK(lam.rate(1.0) == 0.0);
  CHECK(lam.rate(10.0) == 0.5);
  CHECK(lam.cumulative(2.0) == Approx(2.0));
  CHECK(lam.cumulative(5.0) == Approx(3.0));
  CHECK(lam.inverse_cumulative(1.0) == Approx(0.5));
  CHECK(lam.inverse_cumulative(2.5) == Approx(4.0));
  CHECK(std::isinf(Intensity::piecewise({0.0, 1.0}, {1.0, 0.0}).inverse_cumulative(2.0)));
  CHECK_THROWS_AS(Intensity::piecewise({0.5}, {1.0}), ParameterError);
  CHECK_THROWS_AS(Intensity::constant(-1.0), ParameterError);
}

TEST_CASE("kappa closed forms") {
  const auto e = SeverityDistribution::exponential(1.0);
  const DependenceModel ila{IlaStructure{Intensity::constant(1.0), e, e}, {1, 1}};
  CHECK(kappa(ila, {1, 1}).region1 == Approx(0.375).epsilon(1e-14));

  const DependenceModel pla{PlaStructure{Intensity::constant(1.0), e, ProportionDistribution::degenerate(0.5)},
                            {1, 1}};
  CHECK(kappa(pla, {1, 1}).region1 == Approx(0.25).epsilon(1e-14));

  const DependenceModel ilp{IlpStructure{{Intensity::constant(1.0), e}, {Intensity::constant(2.0), e}}, {1, 1}};
  const auto k = kappa(ilp, {1, 3});
  CHECK(k.region1 == Approx(0.5));
  CHECK(k.region2 == Approx((1.0 - 0.25) / 3.0));

  for (const auto& m : {ila, pla, ilp, paper::rpla()}) {
    const auto kk = kappa(m, {1e-8, 1e-8});
    CHECK(std::abs(kk.region1 * 2e-8) < 1e-6);
    CHECK(std::abs(kk.region2 * 2e-8) < 1e-6);
  }
  CHECK_THROWS_AS(kappa(ila, {0, 0}), ParameterError);
}

TEST_CASE("tilt with nu = 1 is the identity") {
  for (const auto& m : {paper::ila(), paper::ilp(), paper::cpla()}) {
    const auto t = tilt_model(m, paper::impact(m), 1.0);
    const double theta_probe = 0.3;
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, IlaStructure>) {
            const auto& o = std::get<IlaStructure>(m.structure);
            CHECK(s.intensity == o.intensity);
            CHECK(laplace(s.severity1, theta_probe) == laplace(o.severity1, theta_probe));
            CHECK(laplace(s.severity2, theta_probe) == laplace(o.severity2, theta_probe));
          } else if constexpr (std::is_same_v<S, IlpStructure>) {
            const auto& o = std::get<IlpStructure>(m.structure);
            CHECK(s.region1.intensity == o.region1.intensity);
            CHECK(s.region2.intensity == o.region2.intensity);
            CHECK(!s.region1.severity.is_tilted());
          } else {
            const auto& o = std::get<PlaStructure>(m.structure);
            CHECK(s.intensity == o.intensity);
            CHECK(cdf(s.total_severity, 0.4) == cdf(o.total_severity, 0.4));
          }
        },
        t.structure);
  }
}

TEST_CASE("ILP tilt of an exponential region") {
  const double mu = 2.0, nu = 0.25, alpha = 0.8;
  const DependenceModel m{IlpStructure{{Intensity::constant(1.5), SeverityDistribution::exponential(mu)},
                                       {Intensity::constant(1.0), SeverityDistribution::exponential(1.0)}},
                          {1, 1}};
  const auto t = std::get<IlpStructure>(tilt_model(m, {alpha, 0.1}, nu).structure);
  const double theta = alpha * (1.0 - nu);
  for (double x : {0.1, 0.5, 2.0}) {
    CHECK(cdf(t.region1.severity, x) == Approx(1.0 - std::exp(-(mu + theta) * x)).epsilon(1e-12));
  }
  CHECK(t.region1.intensity.cumulative(2.0) == Approx(1.5 * 2.0 * mu / (mu + theta)).epsilon(1e-14));
}

TEST_CASE("ILA tilted intensity against a sampled joint transform") {
  const auto m = paper::ila();
  const auto imp = paper::impact(m);
  const double nu = 0.5;
  const auto t = std::get<IlaStructure>(tilt_model(m, imp, nu).structure);
  std::mt19937_64 g(5);
  std::lognormal_distribution<double> x1(-4.564, 1.813), x2(-2.439, 1.183);
  const auto mc = oracle::sample_mean(2'000'000, [&] {
    return paper::lambda * std::exp(-imp.alpha * (1 - nu) * x1(g) - imp.beta * (1 - nu) * x2(g));
  });
  CHECK(std::abs(t.intensity.rate(0.0) - mc.mean) < 3.0 * mc.se);
}

TEST_CASE("random split needs a proportion to tilt") {
  const auto m = paper::rpla();
  CHECK_THROWS_AS(tilt_model(m, paper::impact(m), 0.5), ConfigurationError);
  const auto t = tilt_model(m, paper::impact(m), 0.5, 0.3);
  CHECK(t.name() == "PLA");
}

TEST_CASE("pla threshold") {
  const Thresholds d{1.0, 3.0};
  CHECK(pla_threshold(d, 0.0) == 3.0);
  CHECK(pla_threshold(d, 1.0) == 1.0);
  CHECK(pla_threshold(d, 0.25) == Approx(4.0));
  CHECK(pla_threshold(d, 0.5) == Approx(2.0));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(paper::ila(0.0, 1.0).validate(), ParameterError);
  CHECK_NOTHROW(paper::ila(0.4, 4.0).validate());
  CHECK(paper::ilp().name() == "ILP");
  CHECK(paper::rpla().name() == "rPLA");
}
