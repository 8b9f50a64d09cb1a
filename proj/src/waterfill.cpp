#include "specshape/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace specshape {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kLevelTolerance = 1e-12;

double power_at_level(const Spectrum& base, double level) {
  return band_average(base.grid(), [&](std::size_t i) { return std::max(level - base[i], 0.0); });
}

}  // namespace

WaterfillResult waterfill(const Spectrum& base, double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("waterfill: budget must be positive and finite");
  }
  if (!base.fully_occupied()) throw std::invalid_argument("waterfill: base must be an ordinary spectrum");
  if (!(base.max_value() > 0.0)) throw std::invalid_argument("waterfill: base vanishes everywhere");

  double lo = base.min_value();
  double hi = base.max_value() + budget * std::numbers::pi;
  while (power_at_level(base, hi) < budget) hi = 2.0 * hi + 1.0;

  int iterations = 0;
  while (iterations < kMaxIterations && hi - lo > kLevelTolerance * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (power_at_level(base, mid) < budget ? lo : hi) = mid;
    ++iterations;
  }
  double level = 0.5 * (lo + hi);

  // Exact level on the active set found by the bisection.
  double active_weight = 0.0;
  double active_base = 0.0;
  const auto& grid = base.grid();
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i] < level) {
      active_weight += grid.weight(i);
      active_base += grid.weight(i) * base[i];
    }
  }
  if (active_weight > 0.0) {
    const double exact = (std::numbers::pi * budget + active_base) / active_weight;
    bool consistent = true;
    for (std::size_t i = 0; i < base.size() && consistent; ++i) {
      consistent = (base[i] < level) == (base[i] < exact) || base[i] == exact;
    }
    if (consistent) level = exact;
  }

  std::vector<double> values(base.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::max(level - base[i], 0.0);
  Spectrum phi_x(base.grid_ptr(), std::move(values));
  const double used = mean_power(phi_x);
  const double r = rate(phi_x, base);
  return {std::move(phi_x), level, r, used, iterations};
}

double rate(const Spectrum& phi_x, const Spectrum& base) {
  require_same_grid(phi_x, base);
  return band_average(phi_x.grid(), [&](std::size_t i) {
    const double x = phi_x[i];
    const double occ = phi_x.occupancy(i);
    if (x <= 0.0 || occ <= 0.0) return 0.0;
    if (!(base[i] > 0.0)) throw std::invalid_argument("rate: positive PSD where the base vanishes");
    return occ * std::log1p(x / base[i]);
  });
}

}  // namespace specshape
