#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "specshape/coded.hpp"
#include "specshape/errors.hpp"

using namespace specshape;

namespace {

CodedScenario half_load(double a_c, double P) {
  CodedScenario s{1.0, 1.0, a_c, 10.0, 1000.0, 1.0, 1.0, 0.0, P};
  s.R_l = 0.5 * s.legacy_capacity();
  return s;
}

double fitted_slope(const CodedScenario& base) {
  const auto powers = oracle::log_space(1e4, 1e8, 9);
  std::vector<double> rates;
  for (double P : powers) rates.push_back(solve_coded(base.with_power(P)).rate);
  return oracle::log_slope(powers, rates);
}

}  // namespace

TEST_CASE("scenario basics") {
  const auto s = half_load(0.01, 1.0);
  CHECK(s.legacy_capacity() == doctest::Approx(std::log(1001.0)));
  CHECK(s.cognitive_capacity() == doctest::Approx(std::log(11.0)));
  CHECK_THROWS_AS(CodedScenario{}.with_power(0.0).validate(), std::invalid_argument);
  auto bad = s;
  bad.g_c = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("classification") {
  CHECK(classify(half_load(0.01, 1.0)) == CodedClass::A);
  CHECK(classify(half_load(1.0, 1.0)) == CodedClass::B);
  auto tiny = half_load(0.01, 1.0);
  tiny.R_l = 1e-9;
  CHECK(classify(tiny) == CodedClass::B);
  auto infeasible = half_load(1.0, 1.0);
  infeasible.R_l = infeasible.legacy_capacity();
  CHECK_THROWS_AS(classify(infeasible), InfeasibleError);
  CHECK_THROWS_AS(solve_coded(infeasible), InfeasibleError);
}

TEST_CASE("constraint maps") {
  const auto s = half_load(1.0, 100.0);
  CHECK(legacy_rate(s, 1e-300) == doctest::Approx(s.legacy_capacity()));
  CHECK(decodable_rate(s, 1e-300) == doctest::Approx(s.cognitive_capacity()));
  for (double w : {0.1, 0.5, 1.0}) {
    CHECK(legacy_rate(s, w) < s.legacy_capacity());
    CHECK(objective_b1(s, w) == doctest::Approx(w * std::log1p(10.0 * 100.0 / w)));
  }
  const double wl = legacy_limit(s);
  CHECK(legacy_rate(s, wl) == doctest::Approx(s.R_l).epsilon(1e-9));
}

TEST_CASE("case A") {
  SUBCASE("vanishing power uses the whole band") {
    const CodedSolution sol = solve_case_a(half_load(0.01, 1e-6));
    CHECK(sol.support_fraction == doctest::Approx(1.0));
    CHECK(sol.legacy_residual > 0.0);
  }
  SUBCASE("legacy rate close to capacity forces a thin support") {
    auto s = half_load(0.01, 100.0);
    s.R_l = s.legacy_capacity() * (1.0 - 1e-4);
    const CodedSolution sol = solve_case_a(s);
    CHECK(sol.support_fraction < 1e-3);
    CHECK(sol.rate < 2e-3);
  }
  SUBCASE("dispatch") {
    CHECK(solve_coded(half_load(0.01, 100.0)).case_tag == CodedCase::A);
  }
  SUBCASE("high-power slope") {
    CHECK(fitted_slope(half_load(0.01, 1.0)) == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("case B") {
  SUBCASE("small power: successive decoding over the full band") {
    const auto s = half_load(1.0, 1e-6);
    const auto b1 = solve_case_b1(s);
    REQUIRE(b1);
    CHECK(b1->support_fraction == doctest::Approx(1.0));
    CHECK(b1->rate == doctest::Approx(std::log1p(10.0 * 1e-6)).epsilon(1e-9));
    CHECK(solve_coded(s).case_tag == CodedCase::B1);
  }
  SUBCASE("strong cross link keeps the legacy message decodable") {
    auto s = half_load(1.0, 1e4);
    s.a_c = 1e9;
    CHECK(decodability_limit(s) == 1.0);
  }
  SUBCASE("B1 and B2 agree on the decodability boundary") {
    for (double P : {10.0, 1e3, 1e5}) {
      const auto s = half_load(1.0, P);
      const double w = decodability_limit(s);
      REQUIRE(w < 1.0);
      CHECK(std::abs(decodable_rate(s, w) - s.R_l) <= 1e-10);
      CHECK(std::abs(objective_b1(s, w) - objective_b2(s, w)) <= 1e-9);
    }
  }
  SUBCASE("zero legacy rate gives the full sum rate") {
    auto s = half_load(1.0, 10.0);
    s.R_l = 0.0;
    const double sum = std::log1p((1000.0 + 100.0) / 1.0);
    CHECK(objective_b2(s, 1.0) == doctest::Approx(sum));
  }
  SUBCASE("best of the two sub-cases") {
    const auto s = half_load(1.0, 1e4);
    const CodedSolution best = solve_coded(s);
    const auto b1 = solve_case_b1(s);
    const auto b2 = solve_case_b2(s);
    double expected = 0.0;
    if (b1) expected = std::max(expected, b1->rate);
    if (b2) expected = std::max(expected, b2->rate);
    CHECK(best.rate == expected);
    CHECK((best.case_tag == CodedCase::B1 || best.case_tag == CodedCase::B2));
  }
  SUBCASE("high-power slope") {
    CHECK(fitted_slope(half_load(1.0, 1.0)) == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("legacy constraint is tight at high power") {
  for (double a_c : {0.01, 1.0}) {
    for (double P : {1e4, 1e6, 1e8}) {
      const CodedSolution sol = solve_coded(half_load(a_c, P));
      CHECK(sol.legacy_residual >= -1e-9);
      CHECK(sol.legacy_residual <= 1e-6);
    }
  }
}

TEST_CASE("dense w-search finds nothing better") {
  for (double a_c : {0.01, 1.0}) {
    for (double P : {1.0, 10.0, 100.0}) {
      CAPTURE(a_c);
      CAPTURE(P);
      const auto s = half_load(a_c, P);
      const double solver = solve_coded(s).rate;
      const double best = oracle::coded_w_search(s, 100000);
      CHECK(best <= solver * (1.0 + 1e-6));
      CHECK(solver <= best * (1.0 + 1e-3));
    }
  }
}

TEST_CASE("coded prelog") {
  auto s = half_load(1.0, 1.0);
  CHECK(coded_prelog(s) == doctest::Approx(0.5).epsilon(1e-12));
  s.R_l = 0.0;
  CHECK(coded_prelog(s) == 1.0);
  s.R_l = s.legacy_capacity() * (1.0 - 1e-12);
  CHECK(coded_prelog(s) < 1e-11);
  s.R_l = s.legacy_capacity() * 2.0;
  CHECK(coded_prelog(s) == 0.0);
  SUBCASE("independent of the cognitive-side gains") {
    const auto base = half_load(0.01, 1.0);
    auto perturbed = base;
    perturbed.a_c *= 10.0;
    perturbed.g_c *= 10.0;
    perturbed.g_l *= 10.0;
    CHECK(coded_prelog(perturbed) == coded_prelog(base));
  }
}
