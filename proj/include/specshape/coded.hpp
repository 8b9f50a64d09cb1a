#pragma once

#include <optional>
#include <string_view>

namespace specshape {

// Coded legacy link with flat spectra. The cognitive signal is on-off with
// support fraction w and level P / w. Rates are in nats.
struct CodedScenario {
  double a_l = 1.0;  // legacy transmitter -> legacy receiver
  double g_l = 1.0;  // cognitive transmitter -> legacy receiver
  double a_c = 1.0;  // legacy transmitter -> cognitive receiver
  double g_c = 1.0;  // cognitive transmitter -> cognitive receiver
  double sigma2_s = 1.0;
  double sigma2_nl = 1.0;
  double sigma2_nc = 1.0;
  double R_l = 0.0;  // legacy rate
  double P = 1.0;

  // Throws std::invalid_argument on nonpositive gains, powers or budget, or a
  // negative legacy rate. Feasibility is checked separately.
  void validate() const;
  bool feasible() const { return legacy_capacity() > R_l; }

  double legacy_capacity() const;    // log(1 + a_l s / n_l)
  double cognitive_capacity() const; // log(1 + a_c s / n_c), legacy rate decodable at the cognitive receiver
  CodedScenario with_power(double power) const;
};

enum class CodedCase { A, B1, B2 };
enum class CodedClass { A, B };

std::string_view to_string(CodedCase c);

struct CodedSolution {
  double support_fraction = 0.0;  // w
  double level = 0.0;             // P / w
  double rate = 0.0;
  CodedCase case_tag = CodedCase::A;
  double legacy_residual = 0.0;        // legacy rate achieved minus R_l (>= 0)
  double decodability_residual = 0.0;  // legacy rate decodable at the cognitive receiver minus R_l
};

// A when the cognitive receiver cannot decode the legacy message even with
// no cognitive transmission. Throws InfeasibleError when R_l >= C_l.
CodedClass classify(const CodedScenario& scenario);

// Legacy rate with cognitive interference on a fraction w:
//   w log(1 + a_l s / (g_l P / w + n_l)) + (1 - w) C_l.
double legacy_rate(const CodedScenario& scenario, double w);
// Same at the cognitive receiver, with (a_c, g_c, n_c).
double decodable_rate(const CodedScenario& scenario, double w);

// Objectives of the three programs as functions of w.
double objective_a(const CodedScenario& scenario, double w);
double objective_b1(const CodedScenario& scenario, double w);
double objective_b2(const CodedScenario& scenario, double w);

// Largest w with legacy_rate >= R_l (1 when the constraint is slack).
double legacy_limit(const CodedScenario& scenario);
// Largest w with decodable_rate >= R_l (Case B only).
double decodability_limit(const CodedScenario& scenario);

CodedSolution solve_case_a(const CodedScenario& scenario);
// nullopt when the program's feasible interval is empty.
std::optional<CodedSolution> solve_case_b1(const CodedScenario& scenario);
std::optional<CodedSolution> solve_case_b2(const CodedScenario& scenario);

// Case A, or the better of B1 and B2.
CodedSolution solve_coded(const CodedScenario& scenario);

// 1 - R_l / C_l, zero when infeasible.
double coded_prelog(const CodedScenario& scenario);

}  // namespace specshape
