#include "doctest.h"

#include <cmath>

#include "cococat/errors.hpp"
#include "cococat/multi_region.hpp"
#include "paper_setup.hpp"

using namespace cococat;
using doctest::Approx;

namespace {

void same(const PriceBreakdown& a, const PriceBreakdown& b, double tol) {
  CHECK(a.coupons == Approx(b.coupons).epsilon(tol).scale(1.0));
  CHECK(a.conversion == Approx(b.conversion).epsilon(tol).scale(1.0));
  CHECK(a.principal == Approx(b.principal).epsilon(tol).scale(1.0));
}

}  // namespace

TEST_CASE("two regions match the two-region engine") {
  const auto lam = Intensity::constant(paper::lambda);
  for (double nu : {0.2, 0.5}) {
    const auto bond = paper::bond(nu);
    {
      const auto m = paper::ila(0.4, 2.0);
      const auto imp = paper::impact(m);
      const std::vector<RegionSpec> r{{{lam, paper::region1()}, 0.4, imp.alpha}, {{lam, paper::region2()}, 2.0, imp.beta}};
      same(price_multi_region(bond, paper::market(), r, RegionCoupling::ila), price(bond, paper::market(), m, imp), 1e-9);
    }
    {
      const auto m = paper::ilp(2.0, 0.4);
      const auto imp = paper::impact(m);
      const std::vector<RegionSpec> r{{{lam, paper::region1()}, 2.0, imp.alpha}, {{lam, paper::region2()}, 0.4, imp.beta}};
      same(price_multi_region(bond, paper::market(), r, RegionCoupling::ilp), price(bond, paper::market(), m, imp), 1e-9);
    }
  }
}

TEST_CASE("one region: both couplings agree") {
  const std::vector<RegionSpec> r{{{Intensity::constant(1.4), paper::total()}, 2.0, 0.05}};
  same(price_multi_region(paper::bond(), paper::market(), r, RegionCoupling::ilp),
       price_multi_region(paper::bond(), paper::market(), r, RegionCoupling::ila), 1e-9);
}

TEST_CASE("three symmetric regions are permutation invariant") {
  const auto lam = Intensity::constant(0.9);
  const RegionSpec a{{lam, paper::region2()}, 1.0, 0.1};
  const RegionSpec b{{lam, paper::region2()}, 1.0, 0.1};
  const RegionSpec c{{lam, paper::region2()}, 1.0, 0.1};
  for (auto coupling : {RegionCoupling::ilp, RegionCoupling::ila}) {
    const auto p1 = price_multi_region(paper::bond(), paper::market(), {a, b, c}, coupling);
    const auto p2 = price_multi_region(paper::bond(), paper::market(), {c, a, b}, coupling);
    same(p1, p2, 1e-12);
  }
}

TEST_CASE("shared clock requires a common intensity") {
  const std::vector<RegionSpec> r{{{Intensity::constant(1.0), paper::total()}, 1.0, 0.1},
                                  {{Intensity::constant(2.0), paper::total()}, 1.0, 0.1}};
  CHECK_THROWS_AS(price_multi_region(paper::bond(), paper::market(), r, RegionCoupling::ila), ConfigurationError);
  CHECK_THROWS_AS(price_multi_region(paper::bond(), paper::market(), {}, RegionCoupling::ilp), ConfigurationError);
}
