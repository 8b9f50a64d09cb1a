#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "specshape/coded.hpp"
#include "specshape/estimation.hpp"
#include "specshape/mimo.hpp"
#include "specshape/multilegacy.hpp"
#include "specshape/units.hpp"

namespace specshape::cli {

// Malformed or out-of-schema scenario file.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Budgets in dB, log-spaced in linear power, endpoints included.
struct PowerSweep {
  double start_db = 0.0;
  double stop_db = 0.0;
  std::size_t points = 0;

  std::vector<double> powers() const;
};

// Shape of a PSD on the grid. Flat and AR(1) shapes are scaled to the given
// variance; a table is the PSD itself, interpolated linearly in omega.
struct SpectrumSpec {
  enum class Kind { Flat, Ar1, Table };
  Kind kind = Kind::Flat;
  double epsilon = 1.0;
  std::vector<double> table_omega;
  std::vector<double> table_values;

  Spectrum build(const GridPtr& grid, double variance) const;
};

// Prelog mesh over D / sigma2_s and a sigma2_s / sigma2_n (dB).
struct PrelogMesh {
  std::vector<double> d_ratio;
  std::vector<double> snr_db;
};

struct UncodedFile {
  double sigma2_s = 1.0;
  double sigma2_n = 1.0;
  SpectrumSpec legacy_psd;
  SpectrumSpec noise_psd;
  double a = 1.0;
  std::optional<double> D;
  std::optional<double> P;
  std::optional<PowerSweep> sweep;
  std::optional<PrelogMesh> mesh;

  // Needs D; P defaults to one when absent.
  UncodedScenario build(const GridPtr& grid) const;
};

struct ReceiverSpec {
  double a = 1.0;
  double sigma2_n = 1.0;
  SpectrumSpec noise_psd;
  double D = 1.0;
  double g = 1.0;
};

struct MultiLegacyFile {
  double sigma2_s = 1.0;
  SpectrumSpec legacy_psd;
  std::vector<ReceiverSpec> receivers;
  double a0 = 1.0;
  double g0 = 1.0;

  MultiLegacyScenario build(const GridPtr& grid) const;
};

struct CodedFile {
  CodedScenario scenario;  // P is a placeholder when only a sweep is given
  std::optional<double> P;
  std::optional<PowerSweep> sweep;
};

struct MimoFile {
  MimoChannel channel;
  std::optional<Eigen::MatrixXcd> on_shape;
  std::optional<double> P;
  std::optional<PowerSweep> sweep;
};

struct ScenarioFile {
  std::variant<UncodedFile, MultiLegacyFile, CodedFile, MimoFile> body;
  std::optional<std::size_t> grid_points;
};

// Rates in the file (R_l) are read in `base` units and stored in nats.
ScenarioFile parse_scenario(const nlohmann::json& doc, LogBase base);
ScenarioFile load_scenario(const std::filesystem::path& path, LogBase base);

}  // namespace specshape::cli
