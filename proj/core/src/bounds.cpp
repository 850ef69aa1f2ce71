#include "pnbounds/bounds.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace pnb {

PtBounds pt_bounds(double p_hat, double mu11_hat, double mu10_hat, std::size_t n) {
  if (n < 1) throw ConfigError("pt_bounds: sample size must be positive");
  if (mu11_hat <= 0.0) throw EstimationError("pt_bounds: mu11 must be positive");
  if (!(p_hat > 0.0 && p_hat < 1.0)) throw EstimationError("pt_bounds: p must lie in (0,1)");
  if (mu10_hat < 0.0 || mu10_hat > 1.0) throw ConfigError("pt_bounds: mu10 outside [0,1]");

  PtBounds b;
  b.l0 = (mu11_hat - mu10_hat) / mu11_hat;
  b.u0 = (1.0 - mu10_hat) / mu11_hat;
  b.l_pt = std::max(0.0, b.l0);
  b.u_pt = std::min(1.0, b.u0);
  if (mu10_hat > 0.0 && mu10_hat < 1.0) {
    const double m3 = mu11_hat * mu11_hat * mu11_hat;
    const double shared = mu10_hat * (1.0 - mu10_hat) / (mu11_hat * mu11_hat * (1.0 - p_hat));
    b.sigma_l0 = std::sqrt(mu10_hat * mu10_hat * (1.0 - mu11_hat) / (m3 * p_hat) + shared);
    b.sigma_u0 = std::sqrt((1.0 - mu10_hat) * (1.0 - mu10_hat) * (1.0 - mu11_hat) / (m3 * p_hat) + shared);
  } else {
    b.degenerate_variance = true;
  }
  return b;
}

double psi_lower(const Record& o, const NuisanceFit& fit) {
  const double p1 = fit.model->predict(1, o.v);
  const double p0 = fit.model->predict(0, o.v);
  const double m = fit.mu11_hat;
  const double res1 = o.x ? (o.y - p1) / fit.p_hat : 0.0;
  const double res0 = o.x ? 0.0 : (o.y - p0) / (1.0 - fit.p_hat);
  double out = 0.0;
  if (p1 > p0) out = (p1 - p0 + res1 - res0) / m;
  return out - fit.delta_l_hat / (m * m) * (res1 + p1 - m);
}

double psi_upper(const Record& o, const NuisanceFit& fit) {
  const double p1 = fit.model->predict(1, o.v);
  const double p0 = fit.model->predict(0, o.v);
  const double m = fit.mu11_hat;
  const double res1 = o.x ? (o.y - p1) / fit.p_hat : 0.0;
  const double res0 = o.x ? 0.0 : (o.y - p0) / (1.0 - fit.p_hat);
  double out = 1.0;
  if (p1 > 1.0 - p0) out -= (p1 + p0 - 1.0 + res1 + res0) / m;
  return out + fit.delta_u_hat / (m * m) * (res1 + p1 - m);
}

std::string BoundEstimate::to_json() const {
  nlohmann::json j;
  j["which"] = which == BoundSide::Lower ? "lower" : "upper";
  j["value"] = value;
  j["sigma_hat"] = sigma_hat;
  j["n"] = n;
  j["k_folds"] = k_folds;
  j["learner_tag"] = learner_tag;
  j["seed"] = seed;
  return j.dump();
}

std::pair<BoundEstimate, BoundEstimate> CrossfitBounds::for_intervals() const {
  if (!inverted) return {lower, upper};
  BoundEstimate lo = lower;
  BoundEstimate up = upper;
  const double mid = 0.5 * (lower.value + upper.value);
  lo.value = mid;
  up.value = mid;
  return {lo, up};
}

CrossfitBounds crossfit_bounds(const Dataset& data, int k_folds, LearnerKind learner,
                               std::uint64_t seed) {
  if (k_folds < 2) throw ConfigError("crossfit_bounds: need at least 2 folds");
  data.require_inference_ready();
  const std::size_t n = data.size();
  const FoldPlan plan = make_stratified_folds(data, k_folds, seed);
  const auto folds = plan.folds();

  std::vector<double> psi_l(n), psi_u(n);
  std::vector<double> fold_l(folds.size()), fold_u(folds.size());
  std::vector<std::string> fold_coefs(folds.size());
  std::vector<std::size_t> train;
  train.reserve(n);
  for (std::size_t k = 0; k < folds.size(); ++k) {
    train.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.assignment[i] != static_cast<int>(k)) train.push_back(i);
    }
    NuisanceFit fit;
    try {
      fit = fit_nuisances(data, train, learner);
    } catch (const EstimationError& e) {
      throw EstimationError("fold " + std::to_string(k + 1) + ": " + e.what());
    }
    fold_coefs[k] = fit.model->coefficients_json();
    double sum_l = 0.0;
    double sum_u = 0.0;
    for (std::size_t i : folds[k]) {
      psi_l[i] = psi_lower(data[i], fit);
      psi_u[i] = psi_upper(data[i], fit);
      sum_l += psi_l[i];
      sum_u += psi_u[i];
    }
    const double fold_n = static_cast<double>(folds[k].size());
    fold_l[k] = sum_l / fold_n;
    fold_u[k] = sum_u / fold_n;
  }

  double value_l = 0.0;
  double value_u = 0.0;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    value_l += fold_l[k];
    value_u += fold_u[k];
  }
  value_l /= static_cast<double>(folds.size());
  value_u /= static_cast<double>(folds.size());

  // K-fold average of within-fold second moments around the pooled value.
  double s2_l = 0.0;
  double s2_u = 0.0;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i : folds[k]) {
      a += (psi_l[i] - value_l) * (psi_l[i] - value_l);
      b += (psi_u[i] - value_u) * (psi_u[i] - value_u);
    }
    s2_l += a / static_cast<double>(folds[k].size());
    s2_u += b / static_cast<double>(folds[k].size());
  }
  s2_l /= static_cast<double>(folds.size());
  s2_u /= static_cast<double>(folds.size());

  CrossfitBounds out;
  const std::string tag(learner_tag(learner));
  out.fold_model_coefficients = std::move(fold_coefs);
  out.lower = {value_l, std::sqrt(s2_l), {}, BoundSide::Lower, n, k_folds, tag, seed, fold_l};
  out.upper = {value_u, std::sqrt(s2_u), {}, BoundSide::Upper, n, k_folds, tag, seed, fold_u};
  out.lower.if_values.resize(n);
  out.upper.if_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.lower.if_values[i] = psi_l[i] - value_l;
    out.upper.if_values[i] = psi_u[i] - value_u;
  }
  out.inverted = value_l > value_u;
  return out;
}

ExactBounds exact_bounds_discrete(std::span<const DiscreteStratum> strata) {
  if (strata.empty()) throw ConfigError("exact_bounds_discrete: no strata");
  double total = 0.0;
  ExactBounds out;
  for (const DiscreteStratum& s : strata) {
    if (s.weight < 0.0) throw ConfigError("exact_bounds_discrete: negative weight");
    if (s.pi1 < 0.0 || s.pi1 > 1.0 || s.pi0 < 0.0 || s.pi0 > 1.0) {
      throw ConfigError("exact_bounds_discrete: probabilities must lie in [0,1]");
    }
    total += s.weight;
    out.mu11 += s.weight * s.pi1;
    out.delta_l += s.weight * std::max(0.0, s.pi1 - s.pi0);
    out.delta_u += s.weight * std::max(0.0, s.pi1 + s.pi0 - 1.0);
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw ConfigError("exact_bounds_discrete: stratum weights must sum to 1");
  }
  if (out.mu11 <= 0.0) throw EstimationError("exact_bounds_discrete: mu11 must be positive");
  out.lower = out.delta_l / out.mu11;
  out.upper = 1.0 - out.delta_u / out.mu11;
  return out;
}

}  // namespace pnb
