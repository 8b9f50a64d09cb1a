#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <limits>
#include <numbers>

namespace specshape::detail {

// Shrinks [lo, hi] around a sign change of f - target, assuming
// f(lo) >= target > f(hi) for a decreasing map. Stops when the midpoint no
// longer moves or after max_iterations.
template <typename F>
double bisect_decreasing(F&& f, double target, double lo, double hi, int max_iterations = 200) {
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) >= target ? lo : hi) = mid;
  }
  return lo;
}

struct GoldenResult {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

// Golden-section maximization on [lo, hi]; infeasible points may return -inf.
template <typename F>
GoldenResult golden_max(F&& f, double lo, double hi, int iterations = 100) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < iterations && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

// Largest x in [0, 1] with f(x) >= target for a decreasing f.
template <typename F>
double upper_limit(F&& f, double target) {
  if (f(1.0) >= target) return 1.0;
  return bisect_decreasing(f, target, 0.0, 1.0);
}

// Maximizes a unimodal objective on [lo, hi]; an endpoint wins when it is at
// least as good as the interior search.
template <typename F>
double best_on_interval(F&& f, double lo, double hi) {
  if (hi <= lo) return hi;
  const auto interior = golden_max(f, lo, hi);
  double best = interior.x;
  double value = interior.value;
  for (double edge : {lo, hi}) {
    const double v = f(edge);
    if (v >= value) {
      best = edge;
      value = v;
    }
  }
  return best;
}

// Samples f on [0, 1] and throws when it increases anywhere.
template <typename F>
void require_decreasing(F&& f, const std::string& name, int samples = 64) {
  double prev = f(0.0);
  for (int k = 1; k <= samples; ++k) {
    const double value = f(static_cast<double>(k) / samples);
    if (value > prev + 1e-9 * std::max(1.0, std::abs(prev))) {
      throw std::runtime_error(name + " is not decreasing in the support fraction");
    }
    prev = value;
  }
}

}  // namespace specshape::detail
