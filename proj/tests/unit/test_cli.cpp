#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cococat_cli/app.hpp"
#include "cococat_cli/config.hpp"
#include "cococat_cli/grid.hpp"
#include "cococat/errors.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cococat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cococat::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(COCOCAT_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cococat_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("grid specs") {
  using cococat::cli::parse_grid;
  CHECK(parse_grid("0.2,0.5,0.8") == std::vector<double>{0.2, 0.5, 0.8});
  const auto g = parse_grid("0.4:4:10");
  REQUIRE(g.size() == 10);
  CHECK(g.front() == doctest::Approx(0.4));
  CHECK(g.back() == doctest::Approx(4.0));
  CHECK(g[1] == doctest::Approx(0.8));
  CHECK(parse_grid("3:3:1") == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_grid(""), cococat::ConfigurationError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), cococat::ConfigurationError);
  CHECK_THROWS_AS(parse_grid("1,x"), cococat::ConfigurationError);
}

TEST_CASE("shipped config is canonical") {
  const auto text = slurp(config("paper-ila.cfg"));
  const auto c = cococat::cli::parse_config(text);
  CHECK(c.model.name() == "ILA");
  CHECK(c.model.thresholds.d1 == 2.0);
  CHECK(c.bond.conversion_exponent == 0.5);
  const auto again = cococat::cli::dump_config(c);
  CHECK(cococat::cli::dump_config(cococat::cli::parse_config(again)) == again);
}

TEST_CASE("config rejects unknown keys and bad schema") {
  auto j = json::parse(slurp(config("paper-ila.cfg")));
  j["bond"]["coupon_rate"] = 0.1;
  CHECK_THROWS_WITH_AS(cococat::cli::parse_config(j.dump()), doctest::Contains("bond.coupon_rate"),
                       cococat::ConfigurationError);
  j = json::parse(slurp(config("paper-ila.cfg")));
  j["schema"] = "cococat/v0";
  CHECK_THROWS_AS(cococat::cli::parse_config(j.dump()), cococat::ConfigurationError);
  j.erase("schema");
  CHECK_THROWS_AS(cococat::cli::parse_config(j.dump()), cococat::ConfigurationError);
}

TEST_CASE("output directory precedence") {
  using cococat::cli::output_path;
  cococat::cli::RunConfig c;
  ::setenv(cococat::cli::kOutputDirEnv, "/env", 1);
  CHECK(output_path(&c, "", "x.csv") == fs::path("/env/x.csv"));
  c.output_directory = "/cfg";
  CHECK(output_path(&c, "", "x.csv") == fs::path("/cfg/x.csv"));
  CHECK(output_path(&c, "/flag.csv", "x.csv") == fs::path("/flag.csv"));
  ::unsetenv(cococat::cli::kOutputDirEnv);
  CHECK(output_path(nullptr, "", "x.csv") == fs::path("x.csv"));
}

TEST_CASE("price the shipped configuration") {
  const auto r = run({"price", config("paper-ila.cfg")});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const double total = j["total"];
  CHECK(total > 0.0);
  CHECK(total <= j["riskless_bound"].get<double>());
  CHECK(j["e_i1"].get<double>() + j["e_i2"].get<double>() + j["e_i3"].get<double>() ==
        doctest::Approx(total).epsilon(1e-12));
  CHECK(j["diagnostics"]["variant_coupon"] == "minus");

  const auto zero = json::parse(run({"price", config("paper-ila.cfg"), "--zeta", "0"}).out);
  CHECK(zero["e_i2"].get<double>() == 0.0);

  const auto plus = json::parse(run({"price", config("paper-ila.cfg"), "--variant-coupon", "plus"}).out);
  CHECK(plus["e_i1"].get<double>() > j["e_i1"].get<double>());
  CHECK(plus["e_i2"].get<double>() == j["e_i2"].get<double>());
}

TEST_CASE("configuration errors exit 1 without output") {
  const auto bad = scratch("bad.cfg");
  std::ofstream(bad) << "{\"schema\": \"cococat/v1\", \"model\": {";
  auto r = run({"price", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(!r.err.empty());

  r = run({"price", config("paper-ila.cfg"), "--set", "bond.colour=red"});
  CHECK(r.code == 1);
  CHECK(r.out.empty());

  r = run({"price", config("paper-ila.cfg"), "--nu", "1.5"});
  CHECK(r.code == 1);

  r = run({"price", config("paper-ila.cfg"), "--variant-exponent", "lemma"});
  CHECK(r.code == 1);

  r = run({"frobnicate"});
  CHECK(r.code == 1);
}

TEST_CASE("missing files exit 3") {
  CHECK(run({"price", "/nonexistent/run.cfg"}).code == 3);
  CHECK(run({"calibrate", "/nonexistent/losses.csv"}).code == 3);
}

TEST_CASE("sweep grid") {
  const auto out = scratch("sweep.csv");
  fs::remove(out);
  const auto r = run({"sweep", config("paper-ila.cfg"), "--d1", "2", "--d2", "0.4:4:10", "--nu", "0.2,0.5,0.8",
                      "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["rows"] == 30);
  CHECK(j["nondecreasing_in_d2"] == true);
  const auto l = lines(slurp(out));
  REQUIRE(l.size() == 31);
  CHECK(l[0] == "D1,D2,nu,q,EI1,EI2,EI3,total");

  // An empty grid is refused before anything is written.
  const auto other = scratch("sweep-empty.csv");
  fs::remove(other);
  const auto e = run({"sweep", config("paper-ila.cfg"), "--d2", "", "--out", other.string()});
  CHECK(e.code == 1);
  CHECK(!fs::exists(other));
  CHECK(run({"sweep", config("paper-ila.cfg"), "--d2", "1:2:0", "--out", other.string()}).code == 1);
}

TEST_CASE("sweep quantile mode") {
  const auto out = scratch("sweep-q.csv");
  const auto r = run({"sweep", config("paper-ila.cfg"), "--quantiles", "0.9,0.99", "--nu", "0.5", "--out",
                      out.string()});
  REQUIRE(r.code == 0);
  const auto l = lines(slurp(out));
  REQUIRE(l.size() == 3);
  CHECK(l[1].find(",0.9,") != std::string::npos);
  CHECK(json::parse(r.out)["nondecreasing_in_q"] == true);
  CHECK(run({"sweep", config("paper-ila.cfg"), "--quantiles", "0.9", "--d1", "2", "--out", out.string()}).code ==
        1);
}

TEST_CASE("sweep honours the output directory variable") {
  const auto dir = scratch("envdir");
  fs::remove_all(dir);
  ::setenv(cococat::cli::kOutputDirEnv, dir.c_str(), 1);
  const auto r = run({"sweep", config("paper-ila.cfg")});
  ::unsetenv(cococat::cli::kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "sweep.csv"));
}

TEST_CASE("synthetic history, calibration and round trip") {
  const auto losses = scratch("losses.csv");
  auto r = run({"simulate", config("paper-rpla.cfg"), "--synthetic-losses", "400", "--seed", "7", "--out",
                losses.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(losses).rfind("date,loss_region1,loss_region2\n", 0) == 0);

  // Same seed, same file.
  const auto again = scratch("losses-again.csv");
  run({"simulate", config("paper-rpla.cfg"), "--synthetic-losses", "400", "--seed", "7", "--out", again.string()});
  CHECK(slurp(losses) == slurp(again));

  // A day with no loss in either region is dropped from every fit.
  {
    auto text = slurp(losses);
    const auto last = lines(text).back();
    std::ofstream(losses, std::ios::app) << last.substr(0, 10) << ",0,0\n";
  }
  const auto cfg = scratch("calibrated.cfg");
  r = run({"calibrate", losses.string(), "--mode", "pla", "--out", cfg.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["total"]["zero_losses_excluded"] == 1);
  CHECK(j["proportion"]["excluded"].get<int>() >= 1);
  CHECK(j["intensity"]["rate"].get<double>() == doctest::Approx(1.4).epsilon(0.15));
  CHECK(j["proportion"]["mean"].get<double>() == doctest::Approx(2.1531 / (2.1531 + 3.5135)).epsilon(0.1));

  const auto text = slurp(cfg);
  const auto c = cococat::cli::parse_config(text);
  CHECK(c.model.name() == "rPLA");
  CHECK(cococat::cli::dump_config(c) == text);
  r = run({"price", cfg.string()});
  CHECK(r.code == 0);
}

TEST_CASE("simulate is deterministic under a seed") {
  const auto a = run({"simulate", config("paper-ila.cfg"), "--paths", "500", "--seed", "11"});
  const auto b = run({"simulate", config("paper-ila.cfg"), "--paths", "500", "--seed", "11"});
  const auto c = run({"simulate", config("paper-ila.cfg"), "--paths", "500", "--seed", "12"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  const auto j = json::parse(a.out);
  CHECK(j["estimate"]["paths"] == 500);
}

TEST_CASE("validate without catastrophes is exact") {
  const auto out = scratch("validation.json");
  const auto r = run({"validate", config("paper-ila.cfg"), "--set", "model.intensity=0", "--paths", "300",
                      "--trigger-paths", "300", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  for (const auto& m : j["martingale"]["checks"]) CHECK(m["z"].get<double>() == 0.0);
  for (const auto& s : j["survival"]["checks"]) CHECK(s["empirical"].get<double>() == 1.0);
  CHECK(j["price"]["z"]["e_i2"].get<double>() == 0.0);
  CHECK(fs::exists(out));
}

TEST_CASE("validate flags a wrong compensator") {
  const auto out = scratch("validation-bad.json");
  const auto r = run({"validate", config("paper-ila.cfg"), "--paths", "2000", "--trigger-paths", "2000",
                      "--perturb-kappa", "0.5", "--out", out.string()});
  CHECK(r.code == 4);
  const auto j = json::parse(r.out);
  CHECK(j["pass"] == false);
  CHECK(j["failed"].size() >= 2);
}

TEST_CASE("installed executable reports exit codes") {
  const std::string exe = COCOCAT_EXE;
  CHECK(std::system((exe + " price " + config("paper-ila.cfg") + " > /dev/null").c_str()) == 0);
  CHECK(WEXITSTATUS(std::system((exe + " price /nonexistent.cfg 2> /dev/null").c_str())) == 3);
  CHECK(WEXITSTATUS(std::system((exe + " sweep " + config("paper-ila.cfg") + " --d1 a 2> /dev/null").c_str())) ==
        1);
}
