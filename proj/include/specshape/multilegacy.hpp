#pragma once

#include <cstddef>
#include <vector>

#include "specshape/spectra.hpp"

namespace specshape {

// One legacy receiver listening to the common legacy transmitter.
struct LegacyReceiver {
  double a = 1.0;  // legacy-to-receiver gain
  Spectrum phi_n;  // receiver noise PSD
  double D = 1.0;  // distortion target
  double g = 1.0;  // cognitive-to-receiver gain, carried for completeness
};

struct MultiLegacyScenario {
  Spectrum phi_s;
  std::vector<LegacyReceiver> receivers;
  double a0 = 1.0;  // legacy-to-cognitive-receiver gain
  double g0 = 1.0;  // cognitive link gain

  // Throws std::invalid_argument when K = 0, a gain or target is not
  // positive, or the spectra live on different grids.
  void validate() const;
};

struct MultiPrelogResult {
  bool feasible = false;               // every target exceeds its floor
  double prelog = 0.0;                 // support fraction
  std::vector<double> occupancy;       // per grid cell, in [0, 1]
  std::vector<double> budgets;         // D_k minus the receiver's floor
  std::vector<double> clipped_integrals;  // (1/pi) integral of each pre-emphasized PSD over the support
};

// Wiener-Kolmogorov floor of receiver k. Throws std::out_of_range on a bad k.
double per_receiver_floor(const MultiLegacyScenario& scenario, std::size_t k);

// Largest on-off support whose pre-emphasized integrals fit every receiver's
// headroom. K = 1 is the exact single-receiver fill. For K >= 2 the support is
// the best of several greedy cheapest-first fills (worst normalized cost and a
// lattice of weighted normalized costs), improved by a swap pass that retires
// one cell at a time to make room for the rest.
MultiPrelogResult max_prelog_support(const MultiLegacyScenario& scenario);

// Low-noise form: the constraints collapse to
//   (1/pi) integral over U of phi_s = min_k (D_k - sigma2_nk / a_k),
// filled where phi_s is smallest. Requires flat noise spectra.
MultiPrelogResult low_noise_support(const MultiLegacyScenario& scenario);

}  // namespace specshape
