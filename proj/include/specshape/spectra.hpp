#pragma once

#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace specshape {

// Half-band frequency grid on [0, pi].
//
// Every PSD handled here is even in omega, so an average over [-pi, pi] is
// computed as (1/pi) * sum_i w_i f(omega_i). Each sample i is treated as a
// cell of measure w_i on which the spectra are constant; on-off supports may
// occupy a fraction of a cell.
class FrequencyGrid {
 public:
  static constexpr std::size_t kMinPoints = 16;
  static constexpr std::size_t kDefaultPoints = 4096;

  // Composite trapezoid rule on uniform nodes including both endpoints.
  static std::shared_ptr<const FrequencyGrid> trapezoid(std::size_t n_points);
  // Uniform cells of width pi/n with nodes at the cell centers.
  static std::shared_ptr<const FrequencyGrid> midpoint(std::size_t n_points);

  std::size_t size() const { return omegas_.size(); }
  std::span<const double> omegas() const { return omegas_; }
  std::span<const double> weights() const { return weights_; }
  double omega(std::size_t i) const { return omegas_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  bool same_layout(const FrequencyGrid& other) const;

 private:
  FrequencyGrid(std::vector<double> omegas, std::vector<double> weights);

  std::vector<double> omegas_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const FrequencyGrid>;

GridPtr make_grid(std::size_t n_points = FrequencyGrid::kDefaultPoints);
GridPtr make_midpoint_grid(std::size_t n_points);

// Sampled nonnegative PSD.
//
// A spectrum may carry a per-cell occupancy in [0, 1]: the PSD equals values[i]
// on that fraction of cell i and zero on the rest. An empty occupancy means
// every cell is fully occupied, which is the case for all input spectra.
class Spectrum {
 public:
  Spectrum(GridPtr grid, std::vector<double> values);
  Spectrum(GridPtr grid, std::vector<double> values, std::vector<double> occupancy);

  const FrequencyGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool fully_occupied() const { return occupancy_.empty(); }
  double occupancy(std::size_t i) const { return occupancy_.empty() ? 1.0 : occupancy_[i]; }
  std::vector<double> occupancy_vector() const;

  // Fraction of [0, pi] on which the PSD is strictly positive.
  double support_fraction() const;

  double max_value() const;
  double min_value() const;
  bool is_flat(double rel_tol = 1e-12) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<double> occupancy_;
};

// On-off PSD: `level` on the occupied part of each cell, zero elsewhere.
struct OnOffSpectrum {
  GridPtr grid;
  std::vector<double> occupancy;
  double level = 0.0;

  double support_fraction() const;
  Spectrum to_spectrum() const;
};

Spectrum flat_spectrum(GridPtr grid, double variance);

// First-order autoregressive PSD with innovation rate epsilon in (0, 1]:
//   eps * var / ((2 - eps) - 2 sqrt(1 - eps) cos(omega)).
Spectrum ar1_spectrum(GridPtr grid, double variance, double epsilon);

// (1/pi) * sum_i w_i * values[i] * occupancy[i].
double mean_power(const Spectrum& spectrum);

// (1/pi) * sum_i w_i f(i).
template <typename F>
double band_average(const FrequencyGrid& grid, F&& f) {
  double acc = 0.0;
  const auto w = grid.weights();
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f(i);
  return acc / std::numbers::pi;
}

// Throws std::invalid_argument unless every spectrum lives on the same grid.
void require_same_grid(const Spectrum& a, const Spectrum& b);

}  // namespace specshape
