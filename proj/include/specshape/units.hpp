#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace specshape {

// Rates are carried in nats everywhere inside the library.
enum class LogBase { Nats, Bits };

inline double nats_to(double nats, LogBase base) {
  return base == LogBase::Bits ? nats / std::numbers::ln2 : nats;
}

inline double to_nats(double value, LogBase base) {
  return base == LogBase::Bits ? value * std::numbers::ln2 : value;
}

inline LogBase parse_log_base(std::string_view s) {
  if (s == "e") return LogBase::Nats;
  if (s == "2") return LogBase::Bits;
  throw std::invalid_argument("log base must be 'e' or '2'");
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw std::invalid_argument("dB conversion needs a positive value");
  return 10.0 * std::log10(linear);
}

}  // namespace specshape
