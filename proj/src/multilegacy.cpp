#include "specshape/multilegacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "specshape/estimation.hpp"
#include "specshape/shaping.hpp"
#include "support_fill.hpp"

namespace specshape {

namespace {

constexpr double kFloorRelTol = 1e-12;
constexpr std::size_t kMaxLatticeOrders = 256;
constexpr std::size_t kSwapCandidates = 32;
constexpr int kSwapRounds = 8;
constexpr int kRefinePasses = 6;

double headroom(const LegacyReceiver& rx, const Spectrum& phi_s) {
  const double gap = rx.D - wk_floor(rx.a, phi_s, rx.phi_n);
  return std::abs(gap) <= kFloorRelTol * rx.D ? 0.0 : gap;
}

MultiPrelogResult empty_result(std::size_t cells, std::vector<double> budgets) {
  MultiPrelogResult out;
  out.occupancy.assign(cells, 0.0);
  out.clipped_integrals.assign(budgets.size(), 0.0);
  out.budgets = std::move(budgets);
  return out;
}

MultiPrelogResult from_fill(detail::FillResult fill, std::vector<double> budgets) {
  MultiPrelogResult out;
  out.feasible = true;
  out.prelog = fill.measure / std::numbers::pi;
  out.occupancy = std::move(fill.occupancy);
  out.budgets = std::move(budgets);
  for (double used : fill.used) out.clipped_integrals.push_back(used / std::numbers::pi);
  return out;
}

// Weight vectors on the simplex with the given number of subdivisions.
void simplex_lattice(std::size_t dims, int steps, std::vector<double>& current, int remaining,
                     std::vector<std::vector<double>>& out) {
  if (current.size() + 1 == dims) {
    current.push_back(static_cast<double>(remaining) / steps);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current.push_back(static_cast<double>(k) / steps);
    simplex_lattice(dims, steps, current, remaining - k, out);
    current.pop_back();
  }
}

std::size_t lattice_size(std::size_t dims, int steps) {
  // C(steps + dims - 1, dims - 1)
  double count = 1.0;
  for (std::size_t j = 1; j < dims; ++j) count = count * static_cast<double>(steps + j) / static_cast<double>(j);
  return static_cast<std::size_t>(count);
}

class MultiFill {
 public:
  MultiFill(const FrequencyGrid& grid, std::vector<std::vector<double>> costs, std::vector<double> budgets,
            std::vector<double> headrooms)
      : grid_(grid), costs_(std::move(costs)), budgets_(std::move(budgets)), headrooms_(std::move(headrooms)) {
    for (const auto& c : costs_) spans_.emplace_back(c);
  }

  detail::FillResult fill(std::span<const std::size_t> order) const {
    return detail::fill_in_order(grid_, order, spans_, budgets_);
  }

  std::vector<std::size_t> weighted_order(std::span<const double> weights) const {
    std::vector<double> keys(grid_.size(), 0.0);
    for (std::size_t k = 0; k < costs_.size(); ++k) {
      if (weights[k] == 0.0) continue;
      for (std::size_t i = 0; i < keys.size(); ++i) keys[i] += weights[k] * costs_[k][i] / headrooms_[k];
    }
    return detail::ascending_order(keys);
  }

  std::vector<std::size_t> worst_cost_order() const {
    std::vector<double> keys(grid_.size(), 0.0);
    for (std::size_t k = 0; k < costs_.size(); ++k) {
      for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = std::max(keys[i], costs_[k][i] / headrooms_[k]);
    }
    return detail::ascending_order(keys);
  }

  std::size_t constraints() const { return costs_.size(); }

 private:
  const FrequencyGrid& grid_;
  std::vector<std::vector<double>> costs_;
  std::vector<std::span<const double>> spans_;
  std::vector<double> budgets_;
  std::vector<double> headrooms_;
};

struct Best {
  std::vector<std::size_t> order;
  detail::FillResult fill;
  std::vector<double> weights;  // empty for the worst-cost order

  bool offer(std::vector<std::size_t> candidate, const MultiFill& problem, std::vector<double> w) {
    detail::FillResult result = problem.fill(candidate);
    if (!order.empty() && !(result.measure > fill.measure)) return false;
    order = std::move(candidate);
    fill = std::move(result);
    weights = std::move(w);
    return true;
  }
};

// Coordinate refinement of the weighted order around the best lattice point.
void refine_weights(Best& best, const MultiFill& problem, double step) {
  const std::size_t dims = problem.constraints();
  for (int pass = 0; pass < kRefinePasses; ++pass, step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t from = 0; from < dims; ++from) {
        for (std::size_t to = 0; to < dims; ++to) {
          if (from == to || best.weights[from] <= 0.0) continue;
          std::vector<double> w = best.weights;
          const double moved = std::min(step, w[from]);
          w[from] -= moved;
          w[to] += moved;
          auto order = problem.weighted_order(w);
          if (best.offer(std::move(order), problem, std::move(w))) improved = true;
        }
      }
    }
  }
}

// Retire one expensive cell to the end of the order when that lets the rest
// of the budget cover more measure.
void swap_pass(Best& best, const MultiFill& problem) {
  for (int round = 0; round < kSwapRounds; ++round) {
    std::vector<std::size_t> full;
    for (auto it = best.order.rbegin(); it != best.order.rend() && full.size() < kSwapCandidates; ++it) {
      if (best.fill.occupancy[*it] >= 1.0) full.push_back(*it);
    }
    bool improved = false;
    for (std::size_t cell : full) {
      std::vector<std::size_t> candidate;
      candidate.reserve(best.order.size());
      for (std::size_t i : best.order) {
        if (i != cell) candidate.push_back(i);
      }
      candidate.push_back(cell);
      if (best.offer(std::move(candidate), problem, best.weights)) {
        improved = true;
        break;
      }
    }
    if (!improved) return;
  }
}

}  // namespace

void MultiLegacyScenario::validate() const {
  if (receivers.empty()) throw std::invalid_argument("multilegacy scenario needs at least one receiver");
  if (!(a0 > 0.0) || !(g0 > 0.0)) throw std::invalid_argument("cognitive-link gains must be positive");
  for (const auto& rx : receivers) {
    if (!(rx.a > 0.0) || !(rx.g > 0.0)) throw std::invalid_argument("receiver gains must be positive");
    if (!(rx.D > 0.0)) throw std::invalid_argument("receiver distortion targets must be positive");
    require_same_grid(phi_s, rx.phi_n);
  }
}

double per_receiver_floor(const MultiLegacyScenario& scenario, std::size_t k) {
  if (k >= scenario.receivers.size()) {
    throw std::out_of_range("receiver index " + std::to_string(k) + " out of range");
  }
  const auto& rx = scenario.receivers[k];
  return wk_floor(rx.a, scenario.phi_s, rx.phi_n);
}

MultiPrelogResult max_prelog_support(const MultiLegacyScenario& scenario) {
  scenario.validate();
  const auto& grid = scenario.phi_s.grid();
  const std::size_t K = scenario.receivers.size();

  std::vector<double> headrooms;
  for (const auto& rx : scenario.receivers) headrooms.push_back(headroom(rx, scenario.phi_s));
  if (*std::min_element(headrooms.begin(), headrooms.end()) <= 0.0) {
    return empty_result(grid.size(), std::move(headrooms));
  }

  std::vector<std::vector<double>> costs;
  std::vector<double> budgets;
  for (std::size_t k = 0; k < K; ++k) {
    const Spectrum pre = preemphasized_psd(scenario.receivers[k].a, scenario.phi_s, scenario.receivers[k].phi_n);
    costs.emplace_back(pre.values().begin(), pre.values().end());
    budgets.push_back(std::numbers::pi * headrooms[k]);
  }

  if (K == 1) {
    const auto order = detail::ascending_order(costs[0]);
    const std::span<const double> spans[] = {costs[0]};
    return from_fill(detail::fill_in_order(grid, order, spans, budgets), std::move(headrooms));
  }

  const MultiFill problem(grid, std::move(costs), budgets, headrooms);
  Best best;
  best.offer(problem.worst_cost_order(), problem, {});

  int steps = 1;
  while (lattice_size(K, steps + 1) <= kMaxLatticeOrders) ++steps;
  std::vector<std::vector<double>> lattice;
  std::vector<double> scratch;
  simplex_lattice(K, steps, scratch, steps, lattice);
  Best weighted;
  for (auto& w : lattice) {
    auto order = problem.weighted_order(w);
    weighted.offer(std::move(order), problem, std::move(w));
  }
  refine_weights(weighted, problem, 0.5 / steps);
  if (weighted.fill.measure > best.fill.measure) best = std::move(weighted);

  swap_pass(best, problem);
  return from_fill(std::move(best.fill), std::move(headrooms));
}

MultiPrelogResult low_noise_support(const MultiLegacyScenario& scenario) {
  scenario.validate();
  const auto& grid = scenario.phi_s.grid();
  double budget = std::numeric_limits<double>::infinity();
  for (const auto& rx : scenario.receivers) {
    if (!rx.phi_n.is_flat()) throw std::invalid_argument("low_noise_support: noise spectra must be flat");
    budget = std::min(budget, rx.D - mean_power(rx.phi_n) / rx.a);
  }
  if (!(budget > 0.0)) return empty_result(grid.size(), {budget});

  const auto order = detail::ascending_order(scenario.phi_s.values());
  const std::span<const double> spans[] = {scenario.phi_s.values()};
  const double budgets[] = {std::numbers::pi * budget};
  return from_fill(detail::fill_in_order(grid, order, spans, budgets), {budget});
}

}  // namespace specshape
