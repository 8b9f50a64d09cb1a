#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "specshape/estimation.hpp"
#include "specshape/multilegacy.hpp"
#include "specshape/shaping.hpp"

using namespace specshape;

namespace {

MultiLegacyScenario single(const GridPtr& g, double epsilon, double a, double D) {
  return MultiLegacyScenario{ar1_spectrum(g, 1.0, epsilon), {LegacyReceiver{a, flat_spectrum(g, 1.0), D, 1.0}}, 1.0, 1.0};
}

void check_feasible(const MultiPrelogResult& r) {
  for (std::size_t k = 0; k < r.budgets.size(); ++k) CHECK(r.clipped_integrals[k] <= r.budgets[k] + 1e-9);
}

}  // namespace

TEST_CASE("per-receiver floor") {
  const auto g = make_grid(1024);
  const auto sc = single(g, 1.0, 1000.0, 0.01);
  CHECK(per_receiver_floor(sc, 0) == doctest::Approx(1.0 / 1001.0).epsilon(1e-12));
  CHECK(per_receiver_floor(single(g, 1.0, 1e15, 0.01), 0) < 1e-14);
  const auto ar = single(g, 0.1, 50.0, 0.1);
  CHECK(per_receiver_floor(ar, 0) == wk_floor(50.0, ar.phi_s, flat_spectrum(g, 1.0)));
  CHECK_THROWS_AS(per_receiver_floor(sc, 1), std::out_of_range);
}

TEST_CASE("validation") {
  const auto g = make_grid(64);
  auto sc = single(g, 1.0, 10.0, 0.1);
  sc.receivers.clear();
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = single(g, 1.0, 10.0, 0.0);
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = single(g, 1.0, 10.0, 0.1);
  sc.receivers[0].phi_n = flat_spectrum(make_grid(65), 1.0);
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("single receiver reproduces the on-off prelog exactly") {
  const auto g = make_grid(4096);
  for (double eps : {1.0, 0.1, 0.5}) {
    for (double D : {0.01, 0.05, 0.3}) {
      CAPTURE(eps);
      CAPTURE(D);
      const auto ml = single(g, eps, 1000.0, D);
      const UncodedScenario un{1000.0, ml.phi_s, ml.receivers[0].phi_n, D, 1.0};
      const PrelogResult ref = onoff_prelog(un);
      const MultiPrelogResult got = max_prelog_support(ml);
      CHECK(got.prelog == ref.prelog);
      CHECK(got.occupancy == ref.occupancy);
    }
  }
}

TEST_CASE("duplicated receivers change nothing") {
  const auto g = make_grid(2048);
  auto sc = single(g, 0.1, 1000.0, 0.02);
  const MultiPrelogResult one = max_prelog_support(sc);
  sc.receivers.push_back(sc.receivers[0]);
  const MultiPrelogResult two = max_prelog_support(sc);
  CHECK(two.prelog == doctest::Approx(one.prelog).epsilon(1e-12));
}

TEST_CASE("flat spectra: the tightest receiver sets the prelog") {
  const auto g = make_grid(2048);
  MultiLegacyScenario sc{flat_spectrum(g, 1.0),
                         {LegacyReceiver{1000.0, flat_spectrum(g, 1.0), 0.01, 1.0},
                          LegacyReceiver{100.0, flat_spectrum(g, 1.0), 0.05, 1.0}},
                         1.0, 1.0};
  const double f1 = (0.01 - 1.0 / 1001.0) / (1000.0 / 1001.0);
  const double f2 = (0.05 - 1.0 / 101.0) / (100.0 / 101.0);
  const MultiPrelogResult r = max_prelog_support(sc);
  CHECK(r.feasible);
  CHECK(r.prelog == doctest::Approx(std::min(f1, f2)).epsilon(1e-9));
  check_feasible(r);
  SUBCASE("a target at the floor gives zero") {
    sc.receivers[1].D = 1.0 / 101.0;
    const MultiPrelogResult z = max_prelog_support(sc);
    CHECK_FALSE(z.feasible);
    CHECK(z.prelog == 0.0);
  }
}

TEST_CASE("two receivers with different noise shapes") {
  const auto g = make_grid(1024);
  std::vector<double> tilt(g->size());
  for (std::size_t i = 0; i < tilt.size(); ++i) tilt[i] = 0.2 + 3.0 * g->omega(i) / 3.141592653589793;
  std::vector<double> bump(g->size());
  for (std::size_t i = 0; i < bump.size(); ++i) bump[i] = 0.3 + 2.0 * std::exp(-std::pow(g->omega(i) - 2.5, 2) * 4.0);
  const MultiLegacyScenario sc{ar1_spectrum(g, 1.0, 0.3),
                               {LegacyReceiver{50.0, Spectrum(g, tilt), 0.08, 1.0},
                                LegacyReceiver{200.0, Spectrum(g, bump), 0.05, 1.0}},
                               1.0, 1.0};
  const MultiPrelogResult r = max_prelog_support(sc);
  REQUIRE(r.feasible);
  check_feasible(r);
  const double bound = oracle::multilegacy_dual_bound(sc, 400, 1e4);
  CHECK(r.prelog <= bound + 1e-9);
  CHECK(r.prelog >= 0.98 * bound);
}

TEST_CASE("enlarging a target never shrinks the prelog") {
  const auto g = make_grid(512);
  std::mt19937 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> n1(g->size());
    std::vector<double> n2(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
      n1[i] = 0.2 + u(rng);
      n2[i] = 0.2 + u(rng);
    }
    MultiLegacyScenario sc{ar1_spectrum(g, 1.0, 0.05 + 0.9 * u(rng)),
                           {LegacyReceiver{20.0 + 500.0 * u(rng), Spectrum(g, n1), 0.0, 1.0},
                            LegacyReceiver{20.0 + 500.0 * u(rng), Spectrum(g, n2), 0.0, 1.0}},
                           1.0, 1.0};
    for (std::size_t k = 0; k < 2; ++k) {
      sc.receivers[k].D = 1.0;
      sc.receivers[k].D = per_receiver_floor(sc, k) + 0.2 * u(rng);
    }
    const MultiPrelogResult base = max_prelog_support(sc);
    check_feasible(base);
    for (std::size_t k = 0; k < 2; ++k) {
      auto bigger = sc;
      bigger.receivers[k].D *= 1.0 + u(rng);
      CHECK(max_prelog_support(bigger).prelog >= base.prelog - 1e-12);
    }
  }
}

TEST_CASE("low-noise support") {
  const auto g = make_grid(2048);
  SUBCASE("flat legacy PSD") {
    const MultiLegacyScenario sc{flat_spectrum(g, 2.0),
                                 {LegacyReceiver{100.0, flat_spectrum(g, 1.0), 0.3, 1.0},
                                  LegacyReceiver{10.0, flat_spectrum(g, 0.5), 0.4, 1.0}},
                                 1.0, 1.0};
    const double budget = std::min(0.3 - 1.0 / 100.0, 0.4 - 0.5 / 10.0);
    CHECK(low_noise_support(sc).prelog == doctest::Approx(budget / 2.0).epsilon(1e-9));
  }
  SUBCASE("large budget saturates") {
    const MultiLegacyScenario sc{flat_spectrum(g, 1.0), {LegacyReceiver{100.0, flat_spectrum(g, 1.0), 5.0, 1.0}}, 1.0, 1.0};
    CHECK(low_noise_support(sc).prelog == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("negative budget gives an empty support") {
    const MultiLegacyScenario sc{flat_spectrum(g, 1.0), {LegacyReceiver{10.0, flat_spectrum(g, 1.0), 0.05, 1.0}}, 1.0, 1.0};
    CHECK(low_noise_support(sc).prelog == 0.0);
  }
  SUBCASE("AR legacy PSD fills a band ending at pi") {
    const MultiLegacyScenario sc{ar1_spectrum(g, 1.0, 0.1), {LegacyReceiver{1e4, flat_spectrum(g, 0.01), 0.2, 1.0}}, 1.0, 1.0};
    const MultiPrelogResult r = low_noise_support(sc);
    REQUIRE(r.prelog > 0.0);
    const auto& occ = r.occupancy;
    CHECK(occ.back() == 1.0);
    const auto first = std::find_if(occ.begin(), occ.end(), [](double o) { return o > 0.0; });
    CHECK(std::all_of(first + 1, occ.end(), [](double o) { return o == 1.0; }));
  }
  SUBCASE("non-flat noise is rejected") {
    std::vector<double> n(g->size(), 1.0);
    n[3] = 2.0;
    const MultiLegacyScenario sc{flat_spectrum(g, 1.0), {LegacyReceiver{10.0, Spectrum(g, n), 0.5, 1.0}}, 1.0, 1.0};
    CHECK_THROWS_AS(low_noise_support(sc), std::invalid_argument);
  }
}

TEST_CASE("general solver converges to the low-noise form") {
  const auto g = make_grid(2048);
  double previous = 1.0;
  for (double scale : {1e-2, 1e-4, 1e-6}) {
    const MultiLegacyScenario sc{ar1_spectrum(g, 1.0, 0.2),
                                 {LegacyReceiver{10.0, flat_spectrum(g, scale), 0.15, 1.0},
                                  LegacyReceiver{40.0, flat_spectrum(g, 2.0 * scale), 0.12, 1.0}},
                                 1.0, 1.0};
    const double gap = std::abs(max_prelog_support(sc).prelog - low_noise_support(sc).prelog);
    CAPTURE(scale);
    CHECK(gap <= previous);
    CHECK(gap <= 10.0 * scale);
    previous = gap;
  }
}
