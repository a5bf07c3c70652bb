#include <cmath>

#include "doctest.h"
#include "gibbslab/parallel.hpp"
#include "gibbslab/scenario.hpp"

using namespace gibbslab;

TEST_SUITE("cli") {
  TEST_CASE("exit code precedence") {
    CHECK(combine_exit(kExitPass, kExitInconclusive) == kExitInconclusive);
    CHECK(combine_exit(kExitInconclusive, kExitFail) == kExitFail);
    CHECK(combine_exit(kExitFail, kExitUsage) == kExitUsage);
    CHECK(combine_exit(kExitPass, kExitPass) == kExitPass);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) CHECK(combine_exit(a, b) == combine_exit(b, a));
  }

  TEST_CASE("certify") {
    const auto r = run_scenario("certify", Json::parse(R"({"model":{"model":"ising","d":2,"beta":0.15}})"), 0);
    CHECK(r.exit_code == kExitPass);
    const double c = 2 * std::tanh(0.3);
    CHECK(r.report["dobrushin"]["c"].get<double>() == doctest::Approx(c).epsilon(1e-12));
    CHECK(r.report["dobrushin"]["D"].get<double>() == doctest::Approx(0.5 / ((1 - c) * (1 - c))).epsilon(1e-12));
    CHECK(r.headline["satisfied"] == true);

    const auto hot = run_scenario("certify", Json::parse(R"({"model":{"model":"ising","d":2,"beta":0.6}})"), 0);
    CHECK(hot.exit_code == kExitInconclusive);
    CHECK(hot.headline["satisfied"] == false);
  }

  TEST_CASE("exact gcb scenario at infinite temperature") {
    const auto r = run_scenario("gcb-test", Json::parse(R"({"model":{"model":"ising","d":1,"beta":0.0},"D":0.125})"), 0);
    CHECK(r.exit_code == kExitPass);
    CHECK(r.report["verdict"] == "pass");
    CHECK(r.report["D_source"] == "spec");
  }

  TEST_CASE("reports are reproducible across reruns and thread counts") {
    const auto spec = Json::parse(R"({"model":{"model":"ising","d":2,"beta":0.2},"boundary":"periodic","sides":[8],
        "sampling":{"burnin":50,"samples":400,"chains":3}})");
    const auto a = run_scenario("gcb-test", spec, 9).report.dump();
    CHECK(run_scenario("gcb-test", spec, 9).report.dump() == a);
    for (int t : {1, 2, 3}) {
      ThreadLimit limit(t);
      CHECK(run_scenario("gcb-test", spec, 9).report.dump() == a);
    }
    CHECK(run_scenario("gcb-test", spec, 10).report.dump() != a);
  }

  TEST_CASE("spec errors") {
    const auto model = Json::parse(R"({"model":"ising","d":1,"beta":0.1})");
    CHECK_THROWS_AS(run_scenario("certify", Json{{"model", model}, {"colour", "blue"}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_scenario("nonsense", Json{{"model", model}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_scenario("certify", Json{{"scenario", "blowup"}, {"model", model}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_scenario("gcb-test", Json{{"model", model}, {"sampling", {{"speed", 3}}}}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_sweep_parameter(Json{{"model", model}}, "colour", 1.0), std::invalid_argument);
    CHECK(scenario_names().size() == 8);
  }

  TEST_CASE("beta sweep of certify") {
    const auto s = run_sweep("certify", Json::parse(R"({"model":{"model":"ising","d":1,"beta":0.0}})"), "beta",
                             {0.0, 0.1, 0.2, 0.3}, 0);
    CHECK(s.exit_code == kExitPass);
    const auto& pts = s.report["points"];
    REQUIRE(pts.size() == 4);
    CHECK(pts[0]["headline"]["c"] == 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double beta = pts[i]["value"].get<double>();
      CHECK(pts[i]["headline"]["c"].get<double>() == doctest::Approx(std::tanh(2 * beta)).epsilon(1e-12));
      CHECK(pts[i]["headline"]["c"].get<double>() > pts[i - 1]["headline"]["c"].get<double>());
    }
    CHECK(s.csv.rfind("beta,c,satisfied,D,exit_code\n", 0) == 0);
  }
}
