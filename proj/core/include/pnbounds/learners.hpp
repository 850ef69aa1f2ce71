#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "pnbounds/dataset.hpp"

namespace pnb {

enum class LearnerKind {
  LogisticInteraction,  // expit(b0 + bx*x + bv'v + bxv'(x*v)), damped Newton
  LogisticMain,         // expit(b0 + bx*x + bv'v)
  ArmMean,              // per-arm outcome means, ignores covariates
  LocalAverage,         // k-nearest-neighbour mean within arm
};

/// Parses the CLI/config tag ("logistic-interaction", "logistic-main",
/// "arm-mean", "local-average").
LearnerKind parse_learner(std::string_view tag);
std::string_view learner_tag(LearnerKind kind);

/// Fitted conditional outcome-probability surface pi(x, v).
/// Immutable after fitting; safe for concurrent prediction.
class OutcomeModel {
 public:
  virtual ~OutcomeModel() = default;

  /// Probability in [kPredictionClamp, 1 - kPredictionClamp].
  double predict(int x, std::span<const double> v) const;

  virtual std::string_view tag() const = 0;

  /// Fitted parameters as a JSON object string, for audit output.
  virtual std::string coefficients_json() const = 0;

  /// True when the fit went through the ridge-stabilized path
  /// (separation detected).
  virtual bool fallback_engaged() const { return false; }

 private:
  virtual double raw_predict(int x, std::span<const double> v) const = 0;
};

/// Fits the requested learner on the subset of rows given by `idx`.
std::unique_ptr<OutcomeModel> fit_outcome_model(const Dataset& data,
                                                std::span<const std::size_t> idx,
                                                LearnerKind kind);

/// Fits on the whole dataset.
std::unique_ptr<OutcomeModel> fit_outcome_model(const Dataset& data, LearnerKind kind);

}  // namespace pnb
