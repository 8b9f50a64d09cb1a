#include "specshape/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "numerics.hpp"
#include "specshape/errors.hpp"
#include "support_fill.hpp"

namespace specshape {

namespace {

constexpr double kRankTol = 1e-9;
constexpr double kModeTol = 1e-9;

using Eigen::MatrixXcd;

// log det(M + X) - log det(M) for Hermitian positive definite M and
// Hermitian PSD X, through the eigenvalues of L^-1 X L^-H.
double log_det_ratio(const MatrixXcd& M, const MatrixXcd& X) {
  const Eigen::LLT<MatrixXcd> llt(M);
  if (llt.info() != Eigen::Success) throw std::domain_error("log-det: covariance is not positive definite");
  const MatrixXcd left = llt.matrixL().solve(X);
  MatrixXcd Y = llt.matrixL().solve(left.adjoint()).adjoint();
  Y = 0.5 * (Y + Y.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(Y, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) acc += std::log1p(std::max(eig.eigenvalues()[k], 0.0));
  return acc;
}

// Per-cell quantities of the vector MAC at the cognitive receiver.
class CognitiveReceiver {
 public:
  explicit CognitiveReceiver(const MimoChannel& ch)
      : ch_(ch),
        noise_(ch.sigma2_nc * MatrixXcd::Identity(ch.n_r(), ch.n_r())),
        legacy_(ch.a_c * ch.sigma2_s * ch.h_c * ch.h_c.adjoint()),
        capacity_(log_det_ratio(noise_, legacy_)) {}

  MatrixXcd received(const MatrixXcd& phi) const { return ch_.g_c * ch_.H_c * phi * ch_.H_c.adjoint(); }

  double treat_as_noise(const MatrixXcd& G) const { return log_det_ratio(noise_ + legacy_, G); }
  double cancelled(const MatrixXcd& G) const { return log_det_ratio(noise_, G); }
  double sum_rate(const MatrixXcd& G) const { return log_det_ratio(noise_, legacy_ + G); }
  double decodable(const MatrixXcd& G) const { return log_det_ratio(noise_ + G, legacy_); }
  double capacity() const { return capacity_; }

 private:
  const MimoChannel& ch_;
  MatrixXcd noise_;
  MatrixXcd legacy_;
  double capacity_;
};

double legacy_interference(const MimoChannel& ch, const MatrixXcd& phi) {
  return std::max((ch.h_l * phi * ch.h_l.adjoint())(0, 0).real(), 0.0);
}

// (1/pi) sum_i w_i [occ_i f(phi_i) + (1 - occ_i) off], with f evaluated only
// on occupied cells.
template <typename F>
double band_rate(const PsdMatrix& psd, double off, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const double occ = psd.occupancy(i);
    const double w = psd.grid().weight(i);
    acc += w * (1.0 - occ) * off;
    if (occ > 0.0) acc += w * occ * f(psd[i]);
  }
  return acc / std::numbers::pi;
}

void require_dims(const PsdMatrix& psd, const MimoChannel& ch) {
  ch.validate();
  if (psd.dims() != ch.n_t()) throw std::invalid_argument("PSD matrix size does not match the transmit antennas");
}

}  // namespace

PsdMatrix::PsdMatrix(GridPtr grid, std::vector<Eigen::MatrixXcd> values, std::vector<double> occupancy)
    : grid_(std::move(grid)), values_(std::move(values)), occupancy_(std::move(occupancy)) {
  if (!grid_) throw std::invalid_argument("PSD matrix: null grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("PSD matrix: sample count does not match grid");
  if (!occupancy_.empty() && occupancy_.size() != values_.size()) {
    throw std::invalid_argument("PSD matrix: occupancy length mismatch");
  }
  for (double o : occupancy_) {
    if (!(o >= 0.0 && o <= 1.0)) throw std::invalid_argument("PSD matrix: occupancy outside [0, 1]");
  }
  dims_ = values_.front().rows();
  for (auto& m : values_) {
    if (m.rows() != dims_ || m.cols() != dims_) throw std::invalid_argument("PSD matrix: samples must be square and equal-sized");
    if (!m.allFinite()) throw std::invalid_argument("PSD matrix: non-finite sample");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > kHermitianTol * scale) throw std::invalid_argument("PSD matrix: sample is not Hermitian");
    m = 0.5 * (m + m.adjoint()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
    const double lowest = eig.eigenvalues().minCoeff();
    if (lowest < kEigenFloor * scale) throw std::invalid_argument("PSD matrix: sample is not positive semidefinite");
    if (lowest < 0.0) {
      const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
      m = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().adjoint();
    }
  }
}

PsdMatrix PsdMatrix::on_off(GridPtr grid, const Eigen::MatrixXcd& level, std::vector<double> occupancy) {
  if (!grid) throw std::invalid_argument("PSD matrix: null grid");
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(level.rows(), level.cols());
  std::vector<Eigen::MatrixXcd> values(grid->size(), zero);
  for (std::size_t i = 0; i < values.size() && i < occupancy.size(); ++i) {
    if (occupancy[i] > 0.0) values[i] = level;
  }
  return PsdMatrix(std::move(grid), std::move(values), std::move(occupancy));
}

void MimoChannel::validate() const {
  if (H_c.rows() < 1 || H_c.cols() < 1) throw std::invalid_argument("MIMO channel: H_c must be nonempty");
  if (h_l.size() != H_c.cols()) throw std::invalid_argument("MIMO channel: h_l needs one entry per transmit antenna");
  if (h_c.size() != H_c.rows()) throw std::invalid_argument("MIMO channel: h_c needs one entry per receive antenna");
  for (double v : {a_l, g_l, a_c, g_c, sigma2_s, sigma2_nl, sigma2_nc}) {
    if (!(v > 0.0)) throw std::invalid_argument("MIMO channel: gains and powers must be positive");
  }
  if (!(R_l >= 0.0)) throw std::invalid_argument("MIMO channel: legacy rate must be nonnegative");
}

double MimoChannel::legacy_capacity() const { return std::log1p(a_l * sigma2_s / sigma2_nl); }

double MimoChannel::cognitive_capacity() const { return CognitiveReceiver(*this).capacity(); }

std::string_view to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::TreatAsNoise: return "TreatAsNoise";
    case DecodeMode::SuccessiveB1: return "SuccessiveB1";
    case DecodeMode::RateSplitB2: return "RateSplitB2";
  }
  return "Unknown";
}

double trace_power(const PsdMatrix& psd) {
  return band_average(psd.grid(), [&](std::size_t i) { return psd[i].trace().real() * psd.occupancy(i); });
}

double legacy_rate_mimo(const PsdMatrix& psd, const MimoChannel& channel) {
  require_dims(psd, channel);
  const double signal = channel.a_l * channel.sigma2_s;
  return band_rate(psd, channel.legacy_capacity(), [&](const MatrixXcd& phi) {
    return std::log1p(signal / (channel.g_l * legacy_interference(channel, phi) + channel.sigma2_nl));
  });
}

double decodable_rate_mimo(const PsdMatrix& psd, const MimoChannel& channel) {
  require_dims(psd, channel);
  const CognitiveReceiver rx(channel);
  return band_rate(psd, rx.capacity(), [&](const MatrixXcd& phi) { return rx.decodable(rx.received(phi)); });
}

double cognitive_rate_mimo(const PsdMatrix& psd, const MimoChannel& channel, DecodeMode mode) {
  require_dims(psd, channel);
  const CognitiveReceiver rx(channel);
  const double tol = kModeTol * std::max(1.0, channel.R_l);
  switch (mode) {
    case DecodeMode::TreatAsNoise:
      return band_rate(psd, 0.0, [&](const MatrixXcd& phi) { return rx.treat_as_noise(rx.received(phi)); });
    case DecodeMode::SuccessiveB1: {
      const double decodable = decodable_rate_mimo(psd, channel);
      if (decodable < channel.R_l - tol) {
        throw std::domain_error("successive decoding needs the legacy message decodable at the cognitive receiver");
      }
      return band_rate(psd, 0.0, [&](const MatrixXcd& phi) { return rx.cancelled(rx.received(phi)); });
    }
    case DecodeMode::RateSplitB2: {
      const double decodable = decodable_rate_mimo(psd, channel);
      if (decodable > channel.R_l + tol) {
        throw std::domain_error("rate splitting applies only when the legacy message is not decodable directly");
      }
      return band_rate(psd, rx.capacity(), [&](const MatrixXcd& phi) { return rx.sum_rate(rx.received(phi)); }) -
             channel.R_l;
    }
  }
  throw std::invalid_argument("unknown decode mode");
}

Eigen::Index channel_rank(const Eigen::MatrixXcd& H) {
  if (H.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[0] > 0.0)) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > kRankTol * sv[0]) ++rank;
  }
  return rank;
}

double mimo_prelog(const MimoChannel& channel) {
  channel.validate();
  if (!channel.feasible()) return 0.0;
  return (1.0 - channel.R_l / channel.legacy_capacity()) * static_cast<double>(channel_rank(channel.H_c));
}

MimoSolution solve_mimo(const MimoChannel& channel, double P, GridPtr grid, const std::optional<Eigen::MatrixXcd>& on_shape) {
  channel.validate();
  if (!(P > 0.0)) throw std::invalid_argument("power budget P must be positive");
  if (!grid) throw std::invalid_argument("solve_mimo: null grid");
  if (!channel.feasible()) {
    std::ostringstream msg;
    msg << "legacy rate " << channel.R_l << " is not below the legacy capacity " << channel.legacy_capacity();
    throw InfeasibleError(msg.str());
  }

  const Eigen::Index nt = channel.n_t();
  MatrixXcd Q = on_shape ? *on_shape : MatrixXcd(MatrixXcd::Identity(nt, nt));
  if (Q.rows() != nt || Q.cols() != nt) throw std::invalid_argument("solve_mimo: on-level shape must be N_t x N_t");
  const double trace = Q.trace().real();
  if (!(trace > 0.0)) throw std::invalid_argument("solve_mimo: on-level shape needs a positive trace");
  Q /= trace;
  Q = PsdMatrix(grid, std::vector<MatrixXcd>(grid->size(), Q))[0];  // Hermitian PSD check and clamp

  const CognitiveReceiver rx(channel);
  const MatrixXcd HQH = rx.received(Q);
  const double C_l = channel.legacy_capacity();
  const double C_c = rx.capacity();
  const double R_l = channel.R_l;
  const double legacy_gain = channel.g_l * legacy_interference(channel, Q);
  const double legacy_signal = channel.a_l * channel.sigma2_s;

  const auto legacy = [&](double w) {
    if (w <= 0.0) return C_l;
    return w * std::log1p(legacy_signal / (legacy_gain * P / w + channel.sigma2_nl)) + (1.0 - w) * C_l;
  };
  const auto on_cell = [&](double w) -> MatrixXcd { return (P / w) * HQH; };
  const auto decodable = [&](double w) {
    if (w <= 0.0) return C_c;
    return w * rx.decodable(on_cell(w)) + (1.0 - w) * C_c;
  };
  const auto tan_rate = [&](double w) { return w <= 0.0 ? 0.0 : w * rx.treat_as_noise(on_cell(w)); };
  const auto b1_rate = [&](double w) { return w <= 0.0 ? 0.0 : w * rx.cancelled(on_cell(w)); };
  const auto b2_rate = [&](double w) {
    return (w <= 0.0 ? 0.0 : w * rx.sum_rate(on_cell(w))) + (1.0 - w) * C_c - R_l;
  };

  const auto checked = [](const auto& f, const char* name) {
    try {
      detail::require_decreasing(f, name);
    } catch (const std::runtime_error& e) {
      throw SolverError(e.what());
    }
  };
  checked(legacy, "legacy rate");
  const double w_legacy = detail::upper_limit(legacy, R_l);

  double best_w = 0.0;
  double best_rate = -1.0;
  DecodeMode best_mode = DecodeMode::TreatAsNoise;
  if (C_c <= R_l) {
    best_w = detail::best_on_interval(tan_rate, 0.0, w_legacy);
    best_rate = tan_rate(best_w);
  } else {
    checked(decodable, "decodable legacy rate");
    const double w_decode = detail::upper_limit(decodable, R_l);
    const double b1_hi = std::min(w_legacy, w_decode);
    if (b1_hi > 0.0) {
      best_w = detail::best_on_interval(b1_rate, 0.0, b1_hi);
      best_rate = b1_rate(best_w);
      best_mode = DecodeMode::SuccessiveB1;
    }
    if (w_decode <= w_legacy && decodable(w_legacy) <= R_l) {
      const double w = detail::best_on_interval(b2_rate, w_decode, w_legacy);
      const double r = b2_rate(w);
      if (r > best_rate) {
        best_w = w;
        best_rate = r;
        best_mode = DecodeMode::RateSplitB2;
      }
    }
    if (best_rate < 0.0) throw SolverError("neither successive decoding nor rate splitting has a feasible support");
  }

  std::vector<std::size_t> order(grid->size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto occupancy = detail::prefix_occupancy(*grid, order, std::numbers::pi * best_w);
  const MatrixXcd level = best_w > 0.0 ? MatrixXcd((P / best_w) * Q) : MatrixXcd(MatrixXcd::Zero(nt, nt));
  return MimoSolution{PsdMatrix::on_off(grid, level, std::move(occupancy)), best_w, best_rate, best_mode,
                      legacy(best_w) - R_l, decodable(best_w) - R_l};
}

}  // namespace specshape
