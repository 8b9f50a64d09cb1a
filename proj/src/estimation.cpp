#include "specshape/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specshape {

namespace {

// s (x + n) / (a s + x + n) with the 0/0 limit taken as 0.
double mmse_ratio(double s, double x, double n, double a) {
  const double denom = a * s + x + n;
  return denom > 0.0 ? s * (x + n) / denom : 0.0;
}

}  // namespace

void UncodedScenario::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("legacy gain a must be positive");
  if (!(D > 0.0)) throw std::invalid_argument("distortion target D must be positive");
  if (!(P > 0.0)) throw std::invalid_argument("power budget P must be positive");
  require_same_grid(phi_s, phi_n);
}

UncodedScenario UncodedScenario::with_power(double power) const {
  UncodedScenario copy = *this;
  copy.P = power;
  return copy;
}

double memoryless_mse(double sigma2_s, double sigma2_x, double sigma2_n, double a) {
  if (sigma2_s < 0.0 || sigma2_x < 0.0 || sigma2_n < 0.0 || a < 0.0) {
    throw std::invalid_argument("memoryless_mse: negative argument");
  }
  const double denom = a * sigma2_s + sigma2_x + sigma2_n;
  if (!(denom > 0.0)) throw std::invalid_argument("memoryless_mse: zero denominator");
  return sigma2_s * (sigma2_x + sigma2_n) / denom;
}

double memoryless_floor(double sigma2_s, double sigma2_n, double a) {
  return memoryless_mse(sigma2_s, 0.0, sigma2_n, a);
}

PowerCap memoryless_power_cap(const UncodedScenario& scenario) {
  scenario.validate();
  const double s2s = scenario.legacy_variance();
  const double s2n = scenario.noise_variance();
  // Relative slack absorbs quadrature round-off in the variance.
  if (scenario.D >= s2s * (1.0 - 1e-12)) return {CapStatus::Unconstrained, scenario.P};
  if (scenario.D < memoryless_floor(s2s, s2n, scenario.a)) return {CapStatus::Infeasible, 0.0};
  const double limit = s2s * scenario.D / (s2s - scenario.D) * scenario.a - s2n;
  return {CapStatus::Capped, std::clamp(limit, 0.0, scenario.P)};
}

double wk_mse(const Spectrum& phi_x, const UncodedScenario& scenario) {
  require_same_grid(phi_x, scenario.phi_s);
  require_same_grid(phi_x, scenario.phi_n);
  const double a = scenario.a;
  return band_average(phi_x.grid(), [&](std::size_t i) {
    const double s = scenario.phi_s[i];
    const double n = scenario.phi_n[i];
    const double occ = phi_x.occupancy(i);
    const double on = mmse_ratio(s, phi_x[i], n, a);
    return occ == 1.0 ? on : occ * on + (1.0 - occ) * mmse_ratio(s, 0.0, n, a);
  });
}

double wk_floor(double a, const Spectrum& phi_s, const Spectrum& phi_n) {
  require_same_grid(phi_s, phi_n);
  return band_average(phi_s.grid(), [&](std::size_t i) { return mmse_ratio(phi_s[i], 0.0, phi_n[i], a); });
}

double wk_floor(const UncodedScenario& scenario) {
  return wk_floor(scenario.a, scenario.phi_s, scenario.phi_n);
}

}  // namespace specshape
