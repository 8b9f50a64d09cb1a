// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "specshape/coded.hpp"
#include "specshape/mimo.hpp"
#include "specshape/multilegacy.hpp"
#include "specshape/shaping.hpp"
#include "specshape/waterfill.hpp"

using namespace specshape;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

UncodedScenario flat_reference(const GridPtr& g, double P) {
  return UncodedScenario{1000.0, flat_spectrum(g, 1.0), flat_spectrum(g, 1.0), 0.01, P};
}

CodedScenario half_load(double a_c) {
  CodedScenario s{1.0, 1.0, a_c, 10.0, 1000.0, 1.0, 1.0, 0.0, 1.0};
  s.R_l = 0.5 * s.legacy_capacity();
  return s;
}

std::vector<double> slope_powers() { return oracle::log_space(1e4, 1e8, 9); }

double coded_slope(const CodedScenario& base) {
  const auto powers = slope_powers();
  std::vector<double> rates;
  for (double P : powers) rates.push_back(solve_coded(base.with_power(P)).rate);
  return oracle::log_slope(powers, rates);
}

MimoChannel two_by_two(const Eigen::MatrixXcd& H) {
  MimoChannel ch;
  ch.H_c = H;
  ch.h_l = Eigen::RowVectorXcd::Constant(2, std::complex<double>(1.0 / std::sqrt(2.0), 0.0));
  ch.h_c = Eigen::VectorXcd::Constant(2, std::complex<double>(1.0 / std::sqrt(2.0), 0.0));
  ch.a_l = 1.0;
  ch.g_l = 1.0;
  ch.a_c = 1.0;
  ch.g_c = 10.0;
  ch.sigma2_s = 1000.0;
  ch.sigma2_nl = 1.0;
  ch.sigma2_nc = 1.0;
  ch.R_l = 0.5 * ch.legacy_capacity();
  return ch;
}

MimoChannel scalar_channel(const CodedScenario& s) {
  MimoChannel ch;
  ch.H_c = Eigen::MatrixXcd::Identity(1, 1);
  ch.h_l = Eigen::RowVectorXcd::Ones(1);
  ch.h_c = Eigen::VectorXcd::Ones(1);
  ch.a_l = s.a_l;
  ch.g_l = s.g_l;
  ch.a_c = s.a_c;
  ch.g_c = s.g_c;
  ch.sigma2_s = s.sigma2_s;
  ch.sigma2_nl = s.sigma2_nl;
  ch.sigma2_nc = s.sigma2_nc;
  ch.R_l = s.R_l;
  return ch;
}

// Mesh axes: D / sigma_s^2 and a sigma_s^2 / sigma_n^2 in dB, unit noise.
struct Mesh {
  std::vector<double> d_ratio = oracle::log_space(1e-3, 0.9, 10);
  std::vector<double> snr_db;
  Mesh() {
    for (int k = 0; k < 10; ++k) snr_db.push_back(5.0 * k);
  }
};

UncodedScenario mesh_cell(const GridPtr& g, const Spectrum& phi_s, double d, double snr_db) {
  return UncodedScenario{std::pow(10.0, snr_db / 10.0), phi_s, flat_spectrum(g, 1.0), d, 1.0};
}

Verdict criterion1() {
  Verdict v;
  const auto g = make_grid(4096);
  const double expected = std::log1p((1000.0 / 99.0 - 1.0) / 1001.0);
  const auto powers = oracle::log_space(10.0, 1e8, 29);
  const auto curve = rate_curve(flat_reference(g, 1.0), powers, RateMethod::InterferenceTemperature);
  double worst = 0.0;
  for (const auto& pt : curve) worst = std::max(worst, std::abs(pt.rate - expected) / expected);
  v.detail << "IT rate " << expected << ", max rel. deviation " << worst;
  v.require(worst <= 1e-6, "relative deviation <= 1e-6");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto g = make_grid(4096);
  const auto powers = slope_powers();
  std::vector<double> rates;
  for (const auto& pt : rate_curve(flat_reference(g, 1.0), powers, RateMethod::SpectrumShaping)) rates.push_back(pt.rate);
  const double slope = oracle::log_slope(powers, rates);
  const double prelog = 0.009010;
  v.detail << "fitted slope " << slope << " vs prelog " << prelog;
  v.require(std::abs(slope - prelog) <= 0.02 * prelog, "slope within 2%");
  return v;
}

Verdict criterion3() {
  Verdict v;
  const auto g = make_grid(4096);
  double worst = 0.0;
  for (double P : {1e2, 1e3, 1e4}) {
    const double closed = flat_case_closed_form(flat_reference(g, P)).rate;
    const double numeric = solve_case2(flat_reference(g, P)).rate;
    worst = std::max(worst, std::abs(closed - numeric) / closed);
  }
  v.detail << "max rel. rate gap " << worst;
  v.require(worst <= 1e-6, "rates agree within 1e-6");
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto g = make_grid(4096);
  const Mesh mesh;
  double worst = 0.0;
  int checked = 0;
  for (const Spectrum& phi_s : {flat_spectrum(g, 1.0), ar1_spectrum(g, 1.0, 0.1)}) {
    for (double d : mesh.d_ratio) {
      for (double snr : mesh.snr_db) {
        const PrelogResult pr = onoff_prelog(mesh_cell(g, phi_s, d, snr));
        if (pr.target <= 0.0) continue;
        worst = std::max(worst, std::abs(pr.clipped_integral - pr.target));
        ++checked;
      }
    }
  }
  v.detail << checked << " feasible cells, max residual " << worst;
  v.require(checked > 0, "some feasible cells");
  v.require(worst <= 1e-9, "residual <= 1e-9");
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto g = make_grid(4096);
  const Mesh mesh;
  const Spectrum flat = flat_spectrum(g, 1.0);
  const Spectrum ar = ar1_spectrum(g, 1.0, 0.1);
  int feasible = 0;
  int strict = 0;
  int violations = 0;
  for (double d : mesh.d_ratio) {
    for (double snr : mesh.snr_db) {
      const PrelogResult pa = onoff_prelog(mesh_cell(g, ar, d, snr));
      if (pa.target <= 0.0) continue;
      const PrelogResult pf = onoff_prelog(mesh_cell(g, flat, d, snr));
      ++feasible;
      if (pa.prelog < pf.prelog) ++violations;
      if (pa.prelog > pf.prelog) ++strict;
    }
  }
  v.detail << feasible << " feasible cells, " << strict << " strictly better, " << violations << " worse";
  v.require(violations == 0, "AR >= flat everywhere");
  v.require(2 * strict >= feasible, "strict in >= 50% of cells");
  return v;
}

Verdict criterion6() {
  Verdict v;
  for (double a_c : {0.01, 1.0}) {
    const double slope = coded_slope(half_load(a_c));
    v.detail << "a_c=" << a_c << ": slope " << slope << "; ";
    v.require(std::abs(slope - 0.5) <= 0.025, "slope 0.5 +/- 0.025");
  }
  return v;
}

Verdict criterion7() {
  Verdict v;
  for (double a_c : {0.01, 1.0}) {
    const CodedScenario base = half_load(a_c);
    CodedScenario perturbed = base;
    perturbed.a_c *= 10.0;
    perturbed.g_c *= 10.0;
    perturbed.g_l *= 10.0;
    const bool identical = coded_prelog(perturbed) == coded_prelog(base);
    const double slope = coded_slope(perturbed);
    v.detail << "a_c=" << a_c << ": prelog " << (identical ? "identical" : "changed") << ", slope " << slope << "; ";
    v.require(identical, "bit-identical prelog");
    v.require(std::abs(slope - 0.5) <= 0.02 * 0.5, "slope within 2% of 0.5");
  }
  return v;
}

Verdict criterion8() {
  Verdict v;
  const auto g = make_grid(4096);
  const auto powers = slope_powers();
  const auto slope_of = [&](const MimoChannel& ch) {
    std::vector<double> rates;
    for (double P : powers) rates.push_back(solve_mimo(ch, P, g).rate);
    return oracle::log_slope(powers, rates);
  };
  Eigen::MatrixXcd rank1(2, 2);
  rank1 << 1.0, 1.0, 1.0, 1.0;
  const double full = slope_of(two_by_two(Eigen::MatrixXcd::Identity(2, 2)));
  const double deflated = slope_of(two_by_two(rank1));
  v.detail << "identity slope " << full << ", rank-1 slope " << deflated;
  v.require(std::abs(full - 1.0) <= 0.05, "identity slope 1.0 +/- 0.05");
  v.require(std::abs(deflated - 0.5) <= 0.05, "rank-1 slope 0.5 +/- 0.05");
  return v;
}

Verdict criterion9() {
  Verdict v;
  const auto g = make_midpoint_grid(64);
  const std::vector<double> bins{6.0, 4.0, 2.5, 1.6, 1.0, 0.6, 0.35, 0.2};
  std::vector<double> s(64);
  for (std::size_t i = 0; i < 64; ++i) s[i] = bins[i / 8];
  UncodedScenario sc{10.0, Spectrum(g, s), flat_spectrum(g, 1.0), 1.0, 3.0};
  const double floor = wk_floor(sc);
  const double wf_mse = wk_mse(waterfill(interference_base(sc), sc.P).phi_x, sc);
  sc.D = floor + 0.3 * (wf_mse - floor);
  const ShapingSolution sol = solve_shaping(sc);
  const auto best = oracle::bin_grid_search(oracle::BinInstance{bins, std::vector<double>(8, 1.0), sc.a, sc.D, sc.P}, 20);
  v.detail << "8-bin: solver " << sol.rate << " vs grid " << best.rate << "; ";
  v.require(sol.case_tag == ShapingCase::BothConstraintsActive, "both constraints active");
  v.require(sol.rate >= (1.0 - 1e-3) * best.rate, "8-bin solver >= (1 - 1e-3) grid optimum");

  double worst = 0.0;
  for (double a_c : {0.01, 1.0}) {
    for (double P : {1.0, 10.0, 100.0}) {
      const CodedScenario c = half_load(a_c).with_power(P);
      const double solver = solve_coded(c).rate;
      const double search = oracle::coded_w_search(c, 100000);
      worst = std::max(worst, (search - solver) / solver);
    }
  }
  v.detail << "coded: max w-search excess " << worst;
  v.require(worst <= 1e-3, "coded solver >= (1 - 1e-3) w-search optimum");
  return v;
}

Verdict criterion10() {
  Verdict v;
  const auto g = make_grid(4096);
  bool k1 = true;
  for (double eps : {1.0, 0.1}) {
    for (double D : {0.01, 0.1}) {
      const Spectrum phi_s = ar1_spectrum(g, 1.0, eps);
      const Spectrum phi_n = flat_spectrum(g, 1.0);
      const PrelogResult single = onoff_prelog(UncodedScenario{1000.0, phi_s, phi_n, D, 1.0});
      const MultiPrelogResult multi =
          max_prelog_support(MultiLegacyScenario{phi_s, {LegacyReceiver{1000.0, phi_n, D, 1.0}}, 1.0, 1.0});
      k1 = k1 && multi.occupancy == single.occupancy && multi.prelog == single.prelog;
    }
  }
  double mimo_gap = 0.0;
  const auto grid = make_grid(256);
  for (double a_c : {0.01, 1.0}) {
    for (double P : {0.5, 10.0, 1e3, 1e6}) {
      const CodedScenario c = half_load(a_c).with_power(P);
      const double coded = solve_coded(c).rate;
      const double mimo = solve_mimo(scalar_channel(c), P, grid).rate;
      mimo_gap = std::max(mimo_gap, std::abs(mimo - coded) / std::max(1.0, coded));
    }
    mimo_gap = std::max(mimo_gap, std::abs(mimo_prelog(scalar_channel(half_load(a_c))) - coded_prelog(half_load(a_c))));
  }
  const Spectrum ar = ar1_spectrum(g, 1.7, 1.0);
  const Spectrum flat = flat_spectrum(g, 1.7);
  bool ar_flat = true;
  for (std::size_t i = 0; i < g->size(); ++i) ar_flat = ar_flat && ar[i] == flat[i];
  v.detail << "K=1 " << (k1 ? "exact" : "differs") << ", N=1 gap " << mimo_gap << ", eps=1 "
           << (ar_flat ? "exact" : "differs");
  v.require(k1, "K=1 multilegacy support equals the single-receiver support");
  v.require(mimo_gap <= 1e-9, "N=1 mimo within 1e-9 of coded");
  v.require(ar_flat, "eps=1 AR equals flat");
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "interference-temperature saturation", 1.0, criterion1},
      {2, "shaping logarithmic growth", 10.0, criterion2},
      {3, "closed-form agreement", 10.0, criterion3},
      {4, "prelog threshold residual", 30.0, criterion4},
      {5, "correlation gain", 30.0, criterion5},
      {6, "coded prelog 0.5", 5.0, criterion6},
      {7, "prelog gain-independence", 10.0, criterion7},
      {8, "MIMO rank scaling", 30.0, criterion8},
      {9, "oracle equivalence", 300.0, criterion9},
      {10, "reductions", 5.0, criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(elapsed < c.budget_s, "runtime budget");
    if (!v.pass) ++failures;
    std::printf("[%s] %d. %s: %s (%.3f s, budget %.0f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.str().c_str(), elapsed, c.budget_s);
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
