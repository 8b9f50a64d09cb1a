#pragma once

#include "specshape/spectra.hpp"

namespace specshape {

// Uncoded legacy service observed at a receiver shared by the legacy and the
// cognitive links:  y = sqrt(a) s + x + n.
struct UncodedScenario {
  double a = 1.0;   // legacy channel power gain
  Spectrum phi_s;   // legacy signal PSD
  Spectrum phi_n;   // noise PSD
  double D = 1.0;   // MSE distortion target
  double P = 1.0;   // cognitive power budget

  // Throws std::invalid_argument on a nonpositive a, D or P, or mismatched grids.
  void validate() const;

  double legacy_variance() const { return mean_power(phi_s); }
  double noise_variance() const { return mean_power(phi_n); }
  UncodedScenario with_power(double power) const;
};

// Symbol-by-symbol MMSE of s from sqrt(a) s + x + n with the given variances.
double memoryless_mse(double sigma2_s, double sigma2_x, double sigma2_n, double a);

// Memoryless floor (1/sigma2_s + a/sigma2_n)^-1.
double memoryless_floor(double sigma2_s, double sigma2_n, double a);

enum class CapStatus { Capped, Unconstrained, Infeasible };

struct PowerCap {
  CapStatus status = CapStatus::Infeasible;
  double cap = 0.0;  // usable cognitive power; zero when infeasible
};

// Power budget left to the cognitive user when the legacy receiver estimates
// sample by sample: min{P, sigma2_s D a / (sigma2_s - D) - sigma2_n}.
PowerCap memoryless_power_cap(const UncodedScenario& scenario);

// Non-causal Wiener-Kolmogorov MSE for the cognitive PSD phi_x (ratio form).
double wk_mse(const Spectrum& phi_x, const UncodedScenario& scenario);

// MSE with no cognitive transmission; targets at or below it are infeasible.
double wk_floor(double a, const Spectrum& phi_s, const Spectrum& phi_n);
double wk_floor(const UncodedScenario& scenario);

}  // namespace specshape
