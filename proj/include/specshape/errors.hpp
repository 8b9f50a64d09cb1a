#pragma once

#include <stdexcept>
#include <string>

namespace specshape {

// Raised when a solver is asked to work on a scenario whose distortion or rate
// target cannot be met even without cognitive transmission. Dispatchers such as
// solve_shaping() report infeasibility as a tagged result instead.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A root finder or search failed to produce a solution that meets its
// tolerances. The message carries the diagnostics.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specshape
