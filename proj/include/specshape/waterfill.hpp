#pragma once

#include "specshape/spectra.hpp"

namespace specshape {

struct WaterfillResult {
  Spectrum phi_x;
  double water_level = 0.0;  // 1/lambda
  double rate = 0.0;         // nats per symbol
  double power_used = 0.0;
  int iterations = 0;
};

// phi_x = [L - base]^+ with mean power equal to budget.
//
// L is bracketed in [min(base), max(base) + pi * budget], widened
// geometrically if needed, bisected (at most 200 steps, 1e-12 absolute), and
// then recomputed exactly on the active set the bisection settled on.
WaterfillResult waterfill(const Spectrum& base, double budget);

// (1/pi) sum_i w_i occ_i log(1 + phi_x[i] / base[i]) in nats. Throws when
// phi_x is positive where base vanishes.
double rate(const Spectrum& phi_x, const Spectrum& base);

}  // namespace specshape
