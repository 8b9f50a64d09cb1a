#include "specshape/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace specshape {

namespace {

void check_point_count(std::size_t n_points) {
  if (n_points < FrequencyGrid::kMinPoints) {
    throw std::invalid_argument("frequency grid needs at least " +
                                std::to_string(FrequencyGrid::kMinPoints) + " points, got " +
                                std::to_string(n_points));
  }
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<double> omegas, std::vector<double> weights)
    : omegas_(std::move(omegas)), weights_(std::move(weights)) {}

std::shared_ptr<const FrequencyGrid> FrequencyGrid::trapezoid(std::size_t n_points) {
  check_point_count(n_points);
  const double h = std::numbers::pi / static_cast<double>(n_points - 1);
  std::vector<double> omegas(n_points);
  std::vector<double> weights(n_points, h);
  for (std::size_t i = 0; i < n_points; ++i) omegas[i] = h * static_cast<double>(i);
  omegas.back() = std::numbers::pi;
  weights.front() = 0.5 * h;
  weights.back() = 0.5 * h;
  return std::shared_ptr<const FrequencyGrid>(new FrequencyGrid(std::move(omegas), std::move(weights)));
}

std::shared_ptr<const FrequencyGrid> FrequencyGrid::midpoint(std::size_t n_points) {
  check_point_count(n_points);
  const double h = std::numbers::pi / static_cast<double>(n_points);
  std::vector<double> omegas(n_points);
  std::vector<double> weights(n_points, h);
  for (std::size_t i = 0; i < n_points; ++i) omegas[i] = h * (static_cast<double>(i) + 0.5);
  return std::shared_ptr<const FrequencyGrid>(new FrequencyGrid(std::move(omegas), std::move(weights)));
}

bool FrequencyGrid::same_layout(const FrequencyGrid& other) const {
  return this == &other || (omegas_ == other.omegas_ && weights_ == other.weights_);
}

GridPtr make_grid(std::size_t n_points) { return FrequencyGrid::trapezoid(n_points); }

GridPtr make_midpoint_grid(std::size_t n_points) { return FrequencyGrid::midpoint(n_points); }

Spectrum::Spectrum(GridPtr grid, std::vector<double> values)
    : Spectrum(std::move(grid), std::move(values), {}) {}

Spectrum::Spectrum(GridPtr grid, std::vector<double> values, std::vector<double> occupancy)
    : grid_(std::move(grid)), values_(std::move(values)), occupancy_(std::move(occupancy)) {
  if (!grid_) throw std::invalid_argument("spectrum: null grid");
  if (values_.size() != grid_->size()) {
    throw std::invalid_argument("spectrum: " + std::to_string(values_.size()) +
                                " samples for a grid of " + std::to_string(grid_->size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("spectrum: samples must be finite and nonnegative");
    }
  }
  if (!occupancy_.empty()) {
    if (occupancy_.size() != values_.size()) {
      throw std::invalid_argument("spectrum: occupancy length mismatch");
    }
    for (double o : occupancy_) {
      if (!(o >= 0.0 && o <= 1.0)) throw std::invalid_argument("spectrum: occupancy outside [0, 1]");
    }
  }
}

std::vector<double> Spectrum::occupancy_vector() const {
  if (occupancy_.empty()) return std::vector<double>(values_.size(), 1.0);
  return occupancy_;
}

double Spectrum::support_fraction() const {
  return band_average(*grid_, [&](std::size_t i) { return values_[i] > 0.0 ? occupancy(i) : 0.0; });
}

double Spectrum::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double Spectrum::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

bool Spectrum::is_flat(double rel_tol) const {
  const double hi = max_value();
  const double lo = min_value();
  return hi - lo <= rel_tol * std::max(hi, 1e-300);
}

double OnOffSpectrum::support_fraction() const {
  if (level <= 0.0) return 0.0;
  return band_average(*grid, [&](std::size_t i) { return occupancy[i]; });
}

Spectrum OnOffSpectrum::to_spectrum() const {
  if (level < 0.0) throw std::invalid_argument("on-off spectrum: negative level");
  std::vector<double> values(grid->size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (occupancy[i] > 0.0) values[i] = level;
  }
  return Spectrum(grid, std::move(values), occupancy);
}

Spectrum flat_spectrum(GridPtr grid, double variance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("flat spectrum: negative variance");
  const std::size_t n = grid->size();
  return Spectrum(std::move(grid), std::vector<double>(n, variance));
}

Spectrum ar1_spectrum(GridPtr grid, double variance, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("AR(1) spectrum: innovation rate must lie in (0, 1]");
  }
  if (!(variance >= 0.0)) throw std::invalid_argument("AR(1) spectrum: negative variance");
  const double pole = 2.0 * std::sqrt(1.0 - epsilon);
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = epsilon * variance / ((2.0 - epsilon) - pole * std::cos(grid->omega(i)));
  }
  return Spectrum(std::move(grid), std::move(values));
}

double mean_power(const Spectrum& spectrum) {
  return band_average(spectrum.grid(), [&](std::size_t i) { return spectrum[i] * spectrum.occupancy(i); });
}

void require_same_grid(const Spectrum& a, const Spectrum& b) {
  if (!a.grid().same_layout(b.grid())) throw std::invalid_argument("spectra live on different grids");
}

}  // namespace specshape
