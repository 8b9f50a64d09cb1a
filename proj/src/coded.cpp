#include "specshape/coded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "numerics.hpp"
#include "specshape/errors.hpp"

namespace specshape {

namespace {

// Rate kept by a link of capacity `capacity` when interference of power
// `gain * P / w` hits a fraction w of the band.
double interfered_rate(double signal, double gain, double noise, double capacity, double P, double w) {
  if (w <= 0.0) return capacity;
  return w * std::log1p(signal / (gain * P / w + noise)) + (1.0 - w) * capacity;
}

void require_feasible(const CodedScenario& scenario) {
  scenario.validate();
  if (!scenario.feasible()) {
    std::ostringstream msg;
    msg << "legacy rate " << scenario.R_l << " is not below the legacy capacity " << scenario.legacy_capacity();
    throw InfeasibleError(msg.str());
  }
}

template <typename F>
void checked_decreasing(F&& f, const std::string& name) {
  try {
    detail::require_decreasing(f, name);
  } catch (const std::runtime_error& e) {
    throw SolverError(e.what());
  }
}

CodedSolution make_solution(const CodedScenario& scenario, double w, double rate, CodedCase tag) {
  CodedSolution out;
  out.support_fraction = w;
  out.level = w > 0.0 ? scenario.P / w : 0.0;
  out.rate = rate;
  out.case_tag = tag;
  out.legacy_residual = legacy_rate(scenario, w) - scenario.R_l;
  out.decodability_residual = decodable_rate(scenario, w) - scenario.R_l;
  return out;
}

}  // namespace

void CodedScenario::validate() const {
  for (double v : {a_l, g_l, a_c, g_c}) {
    if (!(v > 0.0)) throw std::invalid_argument("coded scenario gains must be positive");
  }
  for (double v : {sigma2_s, sigma2_nl, sigma2_nc}) {
    if (!(v > 0.0)) throw std::invalid_argument("coded scenario powers must be positive");
  }
  if (!(P > 0.0)) throw std::invalid_argument("power budget P must be positive");
  if (!(R_l >= 0.0)) throw std::invalid_argument("legacy rate must be nonnegative");
}

double CodedScenario::legacy_capacity() const { return std::log1p(a_l * sigma2_s / sigma2_nl); }

double CodedScenario::cognitive_capacity() const { return std::log1p(a_c * sigma2_s / sigma2_nc); }

CodedScenario CodedScenario::with_power(double power) const {
  CodedScenario copy = *this;
  copy.P = power;
  return copy;
}

std::string_view to_string(CodedCase c) {
  switch (c) {
    case CodedCase::A: return "A";
    case CodedCase::B1: return "B1";
    case CodedCase::B2: return "B2";
  }
  return "Unknown";
}

CodedClass classify(const CodedScenario& scenario) {
  require_feasible(scenario);
  return scenario.cognitive_capacity() <= scenario.R_l ? CodedClass::A : CodedClass::B;
}

double legacy_rate(const CodedScenario& s, double w) {
  return interfered_rate(s.a_l * s.sigma2_s, s.g_l, s.sigma2_nl, s.legacy_capacity(), s.P, w);
}

double decodable_rate(const CodedScenario& s, double w) {
  return interfered_rate(s.a_c * s.sigma2_s, s.g_c, s.sigma2_nc, s.cognitive_capacity(), s.P, w);
}

double objective_a(const CodedScenario& s, double w) {
  if (w <= 0.0) return 0.0;
  return w * std::log1p(s.g_c * s.P / (w * (s.a_c * s.sigma2_s + s.sigma2_nc)));
}

double objective_b1(const CodedScenario& s, double w) {
  if (w <= 0.0) return 0.0;
  return w * std::log1p(s.g_c * s.P / (w * s.sigma2_nc));
}

double objective_b2(const CodedScenario& s, double w) {
  const double base = (1.0 - w) * s.cognitive_capacity() - s.R_l;
  if (w <= 0.0) return base;
  return w * std::log1p((s.a_c * s.sigma2_s + s.g_c * s.P / w) / s.sigma2_nc) + base;
}

double legacy_limit(const CodedScenario& scenario) {
  require_feasible(scenario);
  const auto f = [&](double w) { return legacy_rate(scenario, w); };
  checked_decreasing(f, "legacy rate");
  return detail::upper_limit(f, scenario.R_l);
}

double decodability_limit(const CodedScenario& scenario) {
  require_feasible(scenario);
  const auto f = [&](double w) { return decodable_rate(scenario, w); };
  checked_decreasing(f, "decodable legacy rate");
  if (f(0.0) < scenario.R_l) return 0.0;
  return detail::upper_limit(f, scenario.R_l);
}

CodedSolution solve_case_a(const CodedScenario& scenario) {
  const double w_max = legacy_limit(scenario);
  const auto f = [&](double w) { return objective_a(scenario, w); };
  const double w = detail::best_on_interval(f, 0.0, w_max);
  return make_solution(scenario, w, f(w), CodedCase::A);
}

std::optional<CodedSolution> solve_case_b1(const CodedScenario& scenario) {
  if (classify(scenario) != CodedClass::B) return std::nullopt;
  const double w_max = std::min(legacy_limit(scenario), decodability_limit(scenario));
  if (!(w_max > 0.0)) return std::nullopt;
  const auto f = [&](double w) { return objective_b1(scenario, w); };
  const double w = detail::best_on_interval(f, 0.0, w_max);
  return make_solution(scenario, w, f(w), CodedCase::B1);
}

std::optional<CodedSolution> solve_case_b2(const CodedScenario& scenario) {
  if (classify(scenario) != CodedClass::B) return std::nullopt;
  const double w_lo = decodability_limit(scenario);
  const double w_hi = legacy_limit(scenario);
  // The program needs the legacy message undecodable, so the interval is
  // [w_D, w_L] closed at w_D; it is empty when decoding always succeeds.
  if (w_lo > w_hi || decodable_rate(scenario, w_hi) > scenario.R_l) return std::nullopt;
  const auto f = [&](double w) { return objective_b2(scenario, w); };
  const double w = detail::best_on_interval(f, w_lo, w_hi);
  return make_solution(scenario, w, f(w), CodedCase::B2);
}

CodedSolution solve_coded(const CodedScenario& scenario) {
  if (classify(scenario) == CodedClass::A) return solve_case_a(scenario);
  auto b1 = solve_case_b1(scenario);
  auto b2 = solve_case_b2(scenario);
  if (b1 && b2) return b2->rate > b1->rate ? *b2 : *b1;
  if (b1) return *b1;
  if (b2) return *b2;
  throw SolverError("neither successive decoding nor rate splitting has a feasible support");
}

double coded_prelog(const CodedScenario& scenario) {
  scenario.validate();
  if (!scenario.feasible()) return 0.0;
  return 1.0 - scenario.R_l / scenario.legacy_capacity();
}

}  // namespace specshape
