#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "specshape/spectra.hpp"

namespace specshape::detail {

struct FillResult {
  std::vector<double> occupancy;
  std::vector<double> used;  // sum_i w_i occ_i cost_k[i], not divided by pi
  std::size_t boundary = std::numeric_limits<std::size_t>::max();  // cell left partially occupied
  std::size_t last_touched = std::numeric_limits<std::size_t>::max();
  double measure = 0.0;  // sum_i w_i occ_i
};

// Visits cells in `order` and occupies as much of each as every budget allows.
// budgets[k] is compared against sum_i w_i occ_i costs[k][i].
FillResult fill_in_order(const FrequencyGrid& grid, std::span<const std::size_t> order,
                         std::span<const std::span<const double>> costs,
                         std::span<const double> budgets);

// Indices sorted by ascending key; ties keep index order.
std::vector<std::size_t> ascending_order(std::span<const double> keys);

// Occupies cells in `order` until their total measure reaches `measure`.
std::vector<double> prefix_occupancy(const FrequencyGrid& grid, std::span<const std::size_t> order,
                                     double measure);

}  // namespace specshape::detail
