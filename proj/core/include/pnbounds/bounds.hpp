#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pnbounds/dataset.hpp"
#include "pnbounds/nuisance.hpp"

namespace pnb {

/// No-covariate bounds. l0 = (mu11 - mu10)/mu11 and u0 = (1 - mu10)/mu11
/// may fall outside [0,1]; l_pt = max(0, l0) and u_pt = min(1, u0) are the
/// reported bounds. sigma_l0/sigma_u0 are the asymptotic standard
/// deviations of the sqrt(N)-scaled plug-in estimators.
struct PtBounds {
  double l0 = 0.0;
  double u0 = 0.0;
  double l_pt = 0.0;
  double u_pt = 0.0;
  double sigma_l0 = 0.0;
  double sigma_u0 = 0.0;
  /// Set when mu10 sits on {0,1}: the variance formulas degenerate and the
  /// sigmas are reported as zero.
  bool degenerate_variance = false;
};

PtBounds pt_bounds(double p_hat, double mu11_hat, double mu10_hat, std::size_t n);

/// Uncentred efficient-influence evaluations for the lower and upper
/// covariate-assisted bounds. Means of these over a sample estimate the
/// bounds themselves.
double psi_lower(const Record& o, const NuisanceFit& fit);
double psi_upper(const Record& o, const NuisanceFit& fit);

enum class BoundSide { Lower, Upper };

/// Cross-fitted estimate of one bound with its variance estimate and the
/// per-observation influence values (psi_i - value, in record order).
struct BoundEstimate {
  double value = 0.0;
  double sigma_hat = 0.0;
  std::vector<double> if_values;
  BoundSide which = BoundSide::Lower;
  std::size_t n = 0;
  int k_folds = 0;
  std::string learner_tag;
  std::uint64_t seed = 0;
  std::vector<double> fold_estimates;  // diagnostic: one mean per fold

  std::string to_json() const;
};

/// Result of the K-fold cross-fitting procedure. `inverted` flags the
/// small-sample event lower.value > upper.value; interval constructors
/// that need an ordered pair should use `for_intervals()`, which collapses
/// both values to their midpoint in that case.
struct CrossfitBounds {
  BoundEstimate lower;
  BoundEstimate upper;
  bool inverted = false;
  /// Fitted per-fold model parameters (JSON object strings), for audit.
  std::vector<std::string> fold_model_coefficients;

  std::pair<BoundEstimate, BoundEstimate> for_intervals() const;
};

/// K-fold cross-fitted bound estimation: per fold, nuisances are fit on
/// the complement (stratified by arm), the influence functions are
/// averaged over the held-out fold, fold estimates are averaged, and the
/// variance is the K-fold average of within-fold second moments around
/// the pooled estimate.
CrossfitBounds crossfit_bounds(const Dataset& data, int k_folds, LearnerKind learner,
                               std::uint64_t seed);

/// One covariate stratum of a finite-support distribution.
struct DiscreteStratum {
  double weight = 0.0;
  double pi1 = 0.0;
  double pi0 = 0.0;
};

/// Closed-form covariate-assisted bounds for a discrete covariate,
/// by exact enumeration. Weights must sum to one.
struct ExactBounds {
  double lower = 0.0;
  double upper = 0.0;
  double mu11 = 0.0;
  double delta_l = 0.0;
  double delta_u = 0.0;
};

ExactBounds exact_bounds_discrete(std::span<const DiscreteStratum> strata);

}  // namespace pnb
