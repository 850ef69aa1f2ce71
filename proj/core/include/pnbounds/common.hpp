#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pnb {

/// Invalid or unreadable input data (files, records, domain violations).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fit or estimate cannot be produced from the given sample
/// (empty treatment arm, no treated successes, solver failure).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fitted probability surfaces are clamped into
/// [kPredictionClamp, 1 - kPredictionClamp].
inline constexpr double kPredictionClamp = 1e-6;

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace pnb
