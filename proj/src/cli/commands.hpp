#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/scenario_file.hpp"
#include "json.hpp"
#include "specshape/units.hpp"

namespace specshape::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kInfeasible = 3, kSolverFailure = 4 };

struct Options {
  std::optional<std::size_t> grid_points;  // overrides the file
  LogBase log_base = LogBase::Nats;
  bool quiet = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// 12 significant digits, "." decimal, no locale.
std::string format_number(double x);

// Flag, then file, then the default grid size.
std::size_t resolve_grid(const ScenarioFile& file, const Options& options);

// CSV bodies with a header row.
//   uncoded: P_db,rate_it,rate_shaping    coded: P_db,rate,case_tag
//   mimo:    P_db,rate,mode
std::string rate_curve_csv(const ScenarioFile& file, const Options& options);
// uncoded only: d_ratio,snr_db,prelog; infeasible cells read 0.
std::string prelog_mesh_csv(const ScenarioFile& file, const Options& options);
// Solution fields for a single operating point.
nlohmann::json solve_json(const ScenarioFile& file, const Options& options);

// Writes through a temporary file in the same directory and renames it.
void write_atomically(const std::filesystem::path& path, const std::string& content);

// Command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace specshape::cli
