#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specshape/estimation.hpp"

namespace specshape {

enum class ShapingCase { WaterfillFeasible, BothConstraintsActive, Infeasible, DegenerateZero };

std::string_view to_string(ShapingCase c);

struct ShapingSolution {
  Spectrum phi_x;
  double rate = 0.0;   // nats
  double mse = 0.0;    // Wiener-Kolmogorov MSE at the legacy receiver
  double power = 0.0;  // mean power of phi_x
  ShapingCase case_tag = ShapingCase::Infeasible;
  // Multipliers of the stationarity condition
  //   phi_x = (sqrt(1 + 4 lambda mu a phi_s^2) + 1) / (-2 mu) - a phi_s - phi_n
  // on the support. Only meaningful for BothConstraintsActive.
  double lambda = 0.0;
  double mu = 0.0;
  double water_level = 0.0;  // WaterfillFeasible only
  std::string note;

  double support_fraction() const { return phi_x.support_fraction(); }
};

struct PrelogResult {
  double prelog = 0.0;
  double gamma = 0.0;             // threshold on the pre-emphasized PSD
  double support_fraction = 0.0;  // equals prelog
  double clipped_integral = 0.0;  // (1/pi) integral of the pre-emphasized PSD over the support
  double target = 0.0;            // D minus the Wiener-Kolmogorov floor
  std::vector<double> occupancy;
};

// a phi_s^2 / (a phi_s + phi_n), zero where both spectra vanish.
Spectrum preemphasized_psd(double a, const Spectrum& phi_s, const Spectrum& phi_n);
Spectrum preemphasized_psd(const UncodedScenario& scenario);

// Spectrum a phi_s + phi_n seen by the cognitive decoder.
Spectrum interference_base(const UncodedScenario& scenario);

// Water-filling against a phi_s + phi_n at full power; returns nullopt when
// it violates the MSE target, in which case both constraints are active.
// Throws InfeasibleError when D does not exceed the Wiener-Kolmogorov floor.
std::optional<ShapingSolution> solve_case1(const UncodedScenario& scenario);

// Both constraints tight. Supports are prefixes of the cells sorted by the
// pre-emphasized PSD (ties in index order), measured continuously so the last
// cell may be partially occupied. On a support the PSD follows the local-max
// branch with multipliers (lambda, mu); the search runs over the support size
// and the shape parameter lambda*mu and keeps the best rate.
// Throws InfeasibleError or SolverError.
ShapingSolution solve_case2(const UncodedScenario& scenario);

// Flat spectra only: on-off PSD at
//   phi_0 = a s^4 P / ((D - Dfloor)(a s^2 + n^2)) - a s^2 - n^2
// on a fraction P / phi_0 of the band starting at omega = 0. When that fraction
// exceeds one the scenario is solved by solve_shaping() and `note` says so.
ShapingSolution flat_case_closed_form(const UncodedScenario& scenario);

// Full dispatch: infeasible, degenerate, water-filling, or both-active.
ShapingSolution solve_shaping(const UncodedScenario& scenario);

// High-power prelog of the best on-off PSD: fill the cells where the
// pre-emphasized PSD is smallest until its average over the support reaches
// D - Dfloor. The threshold gamma is the pre-emphasized value of the last
// (possibly partial) cell.
PrelogResult onoff_prelog(const UncodedScenario& scenario);

enum class RateMethod { InterferenceTemperature, SpectrumShaping };

struct RatePoint {
  double power = 0.0;
  double rate = 0.0;  // nats; zero when infeasible
  bool feasible = false;
};

// Memoryless legacy receiver: water-filling at min{P, cap}.
RatePoint interference_temperature_rate(const UncodedScenario& scenario);

// One point per budget, in input order. Budgets must be positive and ascending.
std::vector<RatePoint> rate_curve(const UncodedScenario& scenario, std::span<const double> powers,
                                  RateMethod method);

}  // namespace specshape
