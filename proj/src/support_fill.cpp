#include "support_fill.hpp"

#include <algorithm>
#include <numeric>

namespace specshape::detail {

FillResult fill_in_order(const FrequencyGrid& grid, std::span<const std::size_t> order,
                         std::span<const std::span<const double>> costs,
                         std::span<const double> budgets) {
  const std::size_t n_constraints = costs.size();
  FillResult out;
  out.occupancy.assign(grid.size(), 0.0);
  out.used.assign(n_constraints, 0.0);

  for (std::size_t i : order) {
    const double w = grid.weight(i);
    double fraction = 1.0;
    for (std::size_t k = 0; k < n_constraints; ++k) {
      const double cell_cost = w * costs[k][i];
      if (cell_cost <= 0.0) continue;
      if (out.used[k] + cell_cost > budgets[k]) {
        fraction = std::min(fraction, std::max(budgets[k] - out.used[k], 0.0) / cell_cost);
      }
    }
    if (fraction <= 0.0) continue;
    out.occupancy[i] = fraction;
    for (std::size_t k = 0; k < n_constraints; ++k) out.used[k] += fraction * w * costs[k][i];
    out.measure += fraction * w;
    out.last_touched = i;
    if (fraction < 1.0 && out.boundary == std::numeric_limits<std::size_t>::max()) out.boundary = i;
  }
  return out;
}

std::vector<std::size_t> ascending_order(std::span<const double> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return keys[l] < keys[r]; });
  return order;
}

std::vector<double> prefix_occupancy(const FrequencyGrid& grid, std::span<const std::size_t> order,
                                     double measure) {
  std::vector<double> occupancy(grid.size(), 0.0);
  double remaining = measure;
  for (std::size_t i : order) {
    if (remaining <= 0.0) break;
    const double w = grid.weight(i);
    occupancy[i] = std::min(1.0, remaining / w);
    remaining -= w;
  }
  return occupancy;
}

}  // namespace specshape::detail
