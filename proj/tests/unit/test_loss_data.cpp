#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "cococat/errors.hpp"
#include "cococat/loss_data.hpp"

using namespace cococat;
using doctest::Approx;

namespace {

LossDataset sample() {
  std::istringstream in(
      "date,loss_region1,loss_region2\n"
      "2001-03-04,0.5,0.25\n"
      "2001-07-01,0,1.5\n"
      "2003-12-30,2,0\n");
  return parse_losses(in);
}

}  // namespace

TEST_CASE("dates") {
  const Date d = parse_date("2020-02-29");
  CHECK(format_date(d) == "2020-02-29");
  CHECK_THROWS_AS(parse_date("2021-02-29"), ParameterError);
  CHECK_THROWS_AS(parse_date("2021-2-01"), ParameterError);
  CHECK(year_fraction(parse_date("2000-01-01"), parse_date("2001-01-01")) == Approx(366.0 / 365.25));
}

TEST_CASE("parse losses") {
  const auto d = sample();
  REQUIRE(d.records.size() == 3);
  CHECK(format_date(d.start) == "2001-01-01");
  CHECK(format_date(d.end) == "2003-12-31");
  CHECK(d.totals()[0] == Approx(0.75));
  CHECK(d.region2()[1] == 1.5);
  CHECK(d.event_times()[0] == Approx(62.0 / 365.25));
}

TEST_CASE("malformed rows name their line") {
  std::istringstream bad("date,loss_region1,loss_region2\n2001-01-01,1,2\n2001-01-02,x,2\n");
  try {
    parse_losses(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream header("when,a,b\n");
  CHECK_THROWS_AS(parse_losses(header), ParseError);
  std::istringstream negative("date,loss_region1,loss_region2\n2001-01-01,-1,2\n");
  CHECK_THROWS_AS(parse_losses(negative), ParseError);
  CHECK_THROWS_AS(load_losses("/nonexistent/losses.csv"), IoError);
}

TEST_CASE("write then read") {
  const auto d = sample();
  std::ostringstream out;
  write_losses(out, d);
  std::istringstream in(out.str());
  CHECK(parse_losses(in, Window{d.start, d.end}) == d);
}

TEST_CASE("inflation adjustment") {
  const auto d = sample();
  const std::vector<IndexPoint> flat{{parse_date("1990-01-01"), 100.0}};
  CHECK(adjust_cpi(d, flat, parse_date("2010-01-01")) == d);

  const std::vector<IndexPoint> doubling{{parse_date("2000-01-01"), 100.0}, {parse_date("2005-01-01"), 200.0}};
  const auto adj = adjust_cpi(d, doubling, parse_date("2006-01-01"));
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(adj.records[i].loss1 == Approx(2.0 * d.records[i].loss1));
    CHECK(adj.records[i].loss2 == Approx(2.0 * d.records[i].loss2));
  }
  const std::vector<IndexPoint> late{{parse_date("2002-01-01"), 100.0}};
  CHECK_THROWS_AS(adjust_cpi(d, late, parse_date("2006-01-01")), CoverageError);

  std::istringstream idx("date,index\n2000-01-01,100\n2001-01-01,103.5\n");
  CHECK(parse_index(idx).size() == 2);
  std::istringstream unordered("date,index\n2001-01-01,100\n2000-01-01,103.5\n");
  CHECK_THROWS_AS(parse_index(unordered), ParseError);
}
