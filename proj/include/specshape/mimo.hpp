#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "specshape/spectra.hpp"

namespace specshape {

// Sampled N_t x N_t PSD matrix. Each cell carries a Hermitian PSD matrix and
// an occupancy in [0, 1], as for Spectrum.
class PsdMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kEigenFloor = -1e-12;

  // Throws std::invalid_argument on non-square or mismatched matrices, a
  // non-Hermitian sample, or an eigenvalue below the floor (relative to the
  // sample's norm). Slightly negative eigenvalues are clamped to zero.
  PsdMatrix(GridPtr grid, std::vector<Eigen::MatrixXcd> values, std::vector<double> occupancy = {});

  // `level` on the occupied part of each cell.
  static PsdMatrix on_off(GridPtr grid, const Eigen::MatrixXcd& level, std::vector<double> occupancy);

  const FrequencyGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Eigen::Index dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  const Eigen::MatrixXcd& operator[](std::size_t i) const { return values_[i]; }
  double occupancy(std::size_t i) const { return occupancy_.empty() ? 1.0 : occupancy_[i]; }

 private:
  GridPtr grid_;
  Eigen::Index dims_ = 0;
  std::vector<Eigen::MatrixXcd> values_;
  std::vector<double> occupancy_;
};

// Vector cognitive link next to a scalar coded legacy link.
//   legacy receiver:    sqrt(a_l) s + sqrt(g_l) h_l x + n_l
//   cognitive receiver: sqrt(a_c) h_c s + sqrt(g_c) H_c x + n_c,  n_c white
struct MimoChannel {
  Eigen::MatrixXcd H_c;     // N_r x N_t
  Eigen::RowVectorXcd h_l;  // 1 x N_t, cognitive transmitter to legacy receiver
  Eigen::VectorXcd h_c;     // N_r x 1, legacy transmitter to cognitive receiver
  double a_l = 1.0;
  double g_l = 1.0;
  double a_c = 1.0;
  double g_c = 1.0;
  double sigma2_s = 1.0;
  double sigma2_nl = 1.0;
  double sigma2_nc = 1.0;  // per receive antenna
  double R_l = 0.0;

  // Throws std::invalid_argument on inconsistent dimensions or nonpositive
  // gains and powers.
  void validate() const;
  bool feasible() const { return legacy_capacity() > R_l; }
  Eigen::Index n_t() const { return H_c.cols(); }
  Eigen::Index n_r() const { return H_c.rows(); }

  double legacy_capacity() const;     // log(1 + a_l s / n_l)
  double cognitive_capacity() const;  // legacy rate decodable at the cognitive receiver without x
};

enum class DecodeMode { TreatAsNoise, SuccessiveB1, RateSplitB2 };

std::string_view to_string(DecodeMode mode);

// (1/pi) sum_i w_i trace(phi_i) occ_i.
double trace_power(const PsdMatrix& psd);

// Legacy rate with interference g_l h_l phi h_l^H.
double legacy_rate_mimo(const PsdMatrix& psd, const MimoChannel& channel);

// Rate at which the cognitive receiver can decode the legacy message while
// treating x as noise.
double decodable_rate_mimo(const PsdMatrix& psd, const MimoChannel& channel);

// Log-det cognitive rate. TreatAsNoise keeps the legacy signal in the noise,
// SuccessiveB1 cancels it first and requires decodable_rate_mimo >= R_l,
// RateSplitB2 is the sum rate minus R_l and requires decodable_rate_mimo <= R_l.
// Throws std::domain_error when the mode's precondition fails.
double cognitive_rate_mimo(const PsdMatrix& psd, const MimoChannel& channel, DecodeMode mode);

// Numerical rank: singular values above 1e-9 times the largest.
Eigen::Index channel_rank(const Eigen::MatrixXcd& H);

// (1 - R_l / C_l) rank(H_c), zero when infeasible.
double mimo_prelog(const MimoChannel& channel);

struct MimoSolution {
  PsdMatrix psd;
  double support_fraction = 0.0;
  double rate = 0.0;
  DecodeMode mode = DecodeMode::TreatAsNoise;
  double legacy_residual = 0.0;        // legacy rate minus R_l
  double decodability_residual = 0.0;  // decodable legacy rate minus R_l
};

// On-off PSD matrix (P / w) Q on a fraction w of the band, starting at
// omega = 0. Q defaults to I / N_t and is normalized to unit trace. The
// fraction is optimized per decoding mode as in the scalar coded problem and
// the best mode is returned. Throws InfeasibleError when R_l >= C_l.
MimoSolution solve_mimo(const MimoChannel& channel, double P, GridPtr grid,
                        const std::optional<Eigen::MatrixXcd>& on_shape = std::nullopt);

}  // namespace specshape
