#include "specshape/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "numerics.hpp"
#include "specshape/errors.hpp"
#include "specshape/waterfill.hpp"
#include "support_fill.hpp"

namespace specshape {

namespace {

constexpr double kFloorRelTol = 1e-12;
constexpr double kTightRelTol = 1e-6;
constexpr int kShapeScanPoints = 41;
constexpr int kShapeRefineIterations = 80;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Distortion headroom D - Dfloor, with the degenerate and infeasible cases
// reported by the sign (zero means degenerate).
double excess_budget(const UncodedScenario& scenario) {
  const double floor = wk_floor(scenario);
  const double gap = scenario.D - floor;
  if (std::abs(gap) <= kFloorRelTol * scenario.D) return 0.0;
  return gap;
}

void require_feasible(const UncodedScenario& scenario) {
  const double gap = excess_budget(scenario);
  if (gap <= 0.0) {
    std::ostringstream msg;
    msg << "distortion target " << scenario.D << " does not exceed the Wiener-Kolmogorov floor "
        << wk_floor(scenario);
    throw InfeasibleError(msg.str());
  }
}

ShapingSolution make_solution(Spectrum phi_x, double rate, double mse, double power, ShapingCase tag) {
  return ShapingSolution{std::move(phi_x), rate, mse, power, tag, 0.0, 0.0, 0.0, {}};
}

ShapingSolution zero_solution(const UncodedScenario& scenario, ShapingCase tag) {
  Spectrum zero(scenario.phi_s.grid_ptr(), std::vector<double>(scenario.phi_s.size(), 0.0));
  return make_solution(std::move(zero), 0.0, wk_floor(scenario), 0.0, tag);
}

// One frequency cell, in pre-emphasized order.
struct Cell {
  std::size_t index;
  double w;
  double p;  // pre-emphasized PSD a s^2 / (a s + n)
  double B;  // a s + n
  double c;  // a s^2
  double log_B;
};

struct ShapeCandidate {
  bool valid = false;
  double rate = kNegInf;  // times pi
  double s = 0.0;         // lambda * (-mu)
  double nu = 0.0;        // -mu
  std::size_t last = 0;   // position of the last support cell in sorted order
  double theta = 0.0;     // occupancy of that cell
};

// Both-active search over prefix supports. For a shape parameter s the
// on-support levels are T_j = f_j / nu with f_j = (1 + sqrt(1 - 4 s c_j)) / 2;
// the MSE equality fixes nu in closed form and the power equality fixes the
// support size.
class BothActiveSearch {
 public:
  BothActiveSearch(const UncodedScenario& scenario, double excess)
      : target_(std::numbers::pi * scenario.P), budget_(std::numbers::pi * excess) {
    const auto& grid = scenario.phi_s.grid();
    const double a = scenario.a;
    std::vector<double> pre(grid.size());
    cells_.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = scenario.phi_s[i];
      const double B = a * s + scenario.phi_n[i];
      if (!(B > 0.0)) throw std::invalid_argument("solve_case2: a phi_s + phi_n must be positive");
      pre[i] = a * s * s / B;
    }
    for (std::size_t i : detail::ascending_order(pre)) {
      const double s = scenario.phi_s[i];
      const double B = a * s + scenario.phi_n[i];
      cells_.push_back({i, grid.weight(i), pre[i], B, a * s * s, std::log(B)});
    }
    double used = 0.0;
    for (const Cell& cell : cells_) {
      c_cap_ = std::max(c_cap_, cell.c);
      used += cell.w * cell.p;
      if (used > budget_) break;
    }
    if (used <= budget_) throw SolverError("solve_case2: the MSE target cannot bind on any support");
  }

  double shape_limit() const { return c_cap_ > 0.0 ? 0.25 / c_cap_ : 0.0; }

  ShapeCandidate evaluate(double s) const {
    ShapeCandidate out;
    out.s = s;
    double wf = 0.0, wcf = 0.0, wp = 0.0, wb = 0.0, wlf = 0.0, wlb = 0.0, wm = 0.0;
    for (std::size_t j = 0; j < cells_.size(); ++j) {
      const Cell& cell = cells_[j];
      const double disc = 1.0 - 4.0 * s * cell.c;
      if (disc < 0.0) return out;
      const double f = 0.5 * (1.0 + std::sqrt(disc));
      const double slack = wp - budget_;
      const auto power_at = [&](double theta) {
        const double A = slack + theta * cell.w * cell.p;
        if (A <= 0.0) return std::numeric_limits<double>::infinity();
        const double nu = A / (wcf + theta * cell.w * cell.c / f);
        return (wf + theta * cell.w * f) / nu - (wb + theta * cell.w * cell.B);
      };
      if (power_at(1.0) <= target_) {
        const double theta_lo = slack >= 0.0 ? 0.0 : std::min(1.0, -slack / (cell.w * cell.p));
        const double theta = detail::bisect_decreasing(power_at, target_, theta_lo, 1.0);
        const double A = slack + theta * cell.w * cell.p;
        if (!(A > 0.0) || !(theta > 0.0)) return out;
        const double nu = A / (wcf + theta * cell.w * cell.c / f);
        for (std::size_t l = 0; l <= j; ++l) {
          const double fl = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * s * cells_[l].c));
          if (!(fl > nu * cells_[l].B)) return out;
        }
        const double measure = wm + theta * cell.w;
        out.valid = true;
        out.nu = nu;
        out.last = j;
        out.theta = theta;
        out.rate = wlf + theta * cell.w * std::log(f) - measure * std::log(nu) - (wlb + theta * cell.w * cell.log_B);
        return out;
      }
      wf += cell.w * f;
      wcf += cell.w * cell.c / f;
      wp += cell.w * cell.p;
      wb += cell.w * cell.B;
      wlf += cell.w * std::log(f);
      wlb += cell.w * cell.log_B;
      wm += cell.w;
    }
    return out;
  }

  ShapeCandidate search() const {
    const double limit = shape_limit();
    if (limit == 0.0) return evaluate(0.0);
    std::vector<ShapeCandidate> scan;
    scan.reserve(kShapeScanPoints);
    std::size_t best = 0;
    for (int k = 0; k < kShapeScanPoints; ++k) {
      scan.push_back(evaluate(limit * k / (kShapeScanPoints - 1)));
      if (scan.back().rate > scan[best].rate) best = scan.size() - 1;
    }
    if (!scan[best].valid) return scan[best];
    const double lo = limit * (best == 0 ? 0.0 : static_cast<double>(best - 1)) / (kShapeScanPoints - 1);
    const double hi = limit * std::min<double>(best + 1, kShapeScanPoints - 1) / (kShapeScanPoints - 1);
    const auto refined = detail::golden_max([&](double s) { return evaluate(s).rate; }, lo, hi,
                                            kShapeRefineIterations);
    if (refined.value > scan[best].rate) return evaluate(refined.x);
    return scan[best];
  }

  const std::vector<Cell>& cells() const { return cells_; }

 private:
  double target_;
  double budget_;
  double c_cap_ = 0.0;
  std::vector<Cell> cells_;
};

bool within(double value, double expected, double rel_tol) {
  return std::abs(value - expected) <= rel_tol * std::abs(expected);
}

}  // namespace

std::string_view to_string(ShapingCase c) {
  switch (c) {
    case ShapingCase::WaterfillFeasible: return "WaterfillFeasible";
    case ShapingCase::BothConstraintsActive: return "BothConstraintsActive";
    case ShapingCase::Infeasible: return "Infeasible";
    case ShapingCase::DegenerateZero: return "DegenerateZero";
  }
  return "Unknown";
}

Spectrum preemphasized_psd(double a, const Spectrum& phi_s, const Spectrum& phi_n) {
  require_same_grid(phi_s, phi_n);
  std::vector<double> values(phi_s.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double denom = a * phi_s[i] + phi_n[i];
    values[i] = denom > 0.0 ? a * phi_s[i] * phi_s[i] / denom : 0.0;
  }
  return Spectrum(phi_s.grid_ptr(), std::move(values));
}

Spectrum preemphasized_psd(const UncodedScenario& scenario) {
  return preemphasized_psd(scenario.a, scenario.phi_s, scenario.phi_n);
}

Spectrum interference_base(const UncodedScenario& scenario) {
  require_same_grid(scenario.phi_s, scenario.phi_n);
  std::vector<double> values(scenario.phi_s.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = scenario.a * scenario.phi_s[i] + scenario.phi_n[i];
  return Spectrum(scenario.phi_s.grid_ptr(), std::move(values));
}

std::optional<ShapingSolution> solve_case1(const UncodedScenario& scenario) {
  scenario.validate();
  require_feasible(scenario);
  const Spectrum base = interference_base(scenario);
  WaterfillResult wf = waterfill(base, scenario.P);
  const double mse = wk_mse(wf.phi_x, scenario);
  if (scenario.D < scenario.legacy_variance() && mse > scenario.D * (1.0 + kFloorRelTol)) return std::nullopt;
  ShapingSolution out = make_solution(std::move(wf.phi_x), wf.rate, mse, wf.power_used, ShapingCase::WaterfillFeasible);
  out.water_level = wf.water_level;
  return out;
}

ShapingSolution solve_case2(const UncodedScenario& scenario) {
  scenario.validate();
  require_feasible(scenario);
  const BothActiveSearch search(scenario, excess_budget(scenario));
  const ShapeCandidate best = search.search();
  if (!best.valid) {
    std::ostringstream msg;
    msg << "solve_case2: no support satisfies both constraints with a positive PSD (P=" << scenario.P
        << ", D=" << scenario.D << ", shape limit " << search.shape_limit() << ")";
    throw SolverError(msg.str());
  }

  const auto& cells = search.cells();
  std::vector<double> values(cells.size(), 0.0);
  std::vector<double> occupancy(cells.size(), 0.0);
  for (std::size_t j = 0; j <= best.last; ++j) {
    const Cell& cell = cells[j];
    const double f = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * best.s * cell.c));
    values[cell.index] = f / best.nu - cell.B;
    occupancy[cell.index] = j == best.last ? best.theta : 1.0;
  }
  Spectrum phi_x(scenario.phi_s.grid_ptr(), std::move(values), std::move(occupancy));
  const Spectrum base = interference_base(scenario);

  ShapingSolution out = make_solution(phi_x, rate(phi_x, base), wk_mse(phi_x, scenario), mean_power(phi_x),
                                      ShapingCase::BothConstraintsActive);
  out.mu = -best.nu;
  out.lambda = best.s / best.nu;
  if (!within(out.mse, scenario.D, kTightRelTol) || !within(out.power, scenario.P, kTightRelTol)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "solve_case2: constraints not tight (mse " << out.mse << " vs " << scenario.D << ", power "
        << out.power << " vs " << scenario.P << ")";
    throw SolverError(msg.str());
  }
  return out;
}

ShapingSolution flat_case_closed_form(const UncodedScenario& scenario) {
  scenario.validate();
  if (!scenario.phi_s.is_flat() || !scenario.phi_n.is_flat()) {
    throw std::invalid_argument("flat_case_closed_form: legacy and noise spectra must be flat");
  }
  require_feasible(scenario);
  const double s2 = scenario.phi_s[0];
  const double n2 = scenario.phi_n[0];
  const double a = scenario.a;
  const double B = a * s2 + n2;
  const double floor = s2 * n2 / B;
  const double level = a * s2 * s2 * scenario.P / ((scenario.D - floor) * B) - B;
  const double fraction = scenario.P / level;
  if (!(level > 0.0) || fraction > 1.0) {
    ShapingSolution out = solve_shaping(scenario);
    out.note = "closed-form support fraction exceeds one; solved numerically";
    return out;
  }

  const auto& grid = scenario.phi_s.grid();
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  OnOffSpectrum on_off{scenario.phi_s.grid_ptr(),
                       detail::prefix_occupancy(grid, order, std::numbers::pi * fraction), level};
  Spectrum phi_x = on_off.to_spectrum();
  ShapingSolution out = make_solution(phi_x, fraction * std::log1p(level / B), wk_mse(phi_x, scenario),
                                      mean_power(phi_x), ShapingCase::BothConstraintsActive);
  // Multipliers that make the boundary indifferent between on and off.
  const double x = (level + B) / B;
  const double nu = (x - 1.0 - std::log(x)) / (B * (x - 1.0) * (x - 1.0));
  const double T = level + B;
  out.mu = -nu;
  out.lambda = T * (1.0 - nu * T) / (a * s2 * s2);
  return out;
}

ShapingSolution solve_shaping(const UncodedScenario& scenario) {
  scenario.validate();
  const double gap = excess_budget(scenario);
  if (gap < 0.0) return zero_solution(scenario, ShapingCase::Infeasible);
  if (gap == 0.0) return zero_solution(scenario, ShapingCase::DegenerateZero);
  if (auto first = solve_case1(scenario)) return std::move(*first);
  return solve_case2(scenario);
}

PrelogResult onoff_prelog(const UncodedScenario& scenario) {
  scenario.validate();
  PrelogResult out;
  const double gap = excess_budget(scenario);
  out.target = std::max(gap, 0.0);
  out.occupancy.assign(scenario.phi_s.size(), 0.0);
  if (gap <= 0.0) return out;

  const Spectrum pre = preemphasized_psd(scenario);
  const auto order = detail::ascending_order(pre.values());
  const std::span<const double> costs[] = {pre.values()};
  const double budgets[] = {std::numbers::pi * gap};
  auto fill = detail::fill_in_order(pre.grid(), order, costs, budgets);

  out.occupancy = std::move(fill.occupancy);
  out.support_fraction = fill.measure / std::numbers::pi;
  out.prelog = out.support_fraction;
  out.clipped_integral = fill.used[0] / std::numbers::pi;
  const std::size_t edge = fill.boundary != std::numeric_limits<std::size_t>::max() ? fill.boundary : fill.last_touched;
  out.gamma = edge < pre.size() ? pre[edge] : 0.0;
  return out;
}

RatePoint interference_temperature_rate(const UncodedScenario& scenario) {
  const PowerCap cap = memoryless_power_cap(scenario);
  if (cap.status == CapStatus::Infeasible) return {scenario.P, 0.0, false};
  if (!(cap.cap > 0.0)) return {scenario.P, 0.0, true};
  return {scenario.P, waterfill(interference_base(scenario), cap.cap).rate, true};
}

std::vector<RatePoint> rate_curve(const UncodedScenario& scenario, std::span<const double> powers,
                                  RateMethod method) {
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (!(powers[i] > 0.0) || (i > 0 && !(powers[i] > powers[i - 1]))) {
      throw std::invalid_argument("rate_curve: budgets must be positive and ascending");
    }
  }
  std::vector<RatePoint> out;
  out.reserve(powers.size());
  for (double power : powers) {
    const UncodedScenario point = scenario.with_power(power);
    if (method == RateMethod::InterferenceTemperature) {
      out.push_back(interference_temperature_rate(point));
    } else {
      const ShapingSolution sol = solve_shaping(point);
      const bool feasible = sol.case_tag != ShapingCase::Infeasible;
      out.push_back({power, sol.rate, feasible});
    }
  }
  return out;
}

}  // namespace specshape
