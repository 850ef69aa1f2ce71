#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pnbounds/dataset.hpp"
#include "pnbounds/learners.hpp"

namespace pnb {

/// Sample-analogy marginals: p = pr(X=1), mu11 = pr(Y=1|X=1),
/// mu10 = pr(Y=1|X=0).
struct Marginals {
  double p_hat = 0.0;
  double mu11_hat = 0.0;
  double mu10_hat = 0.0;
};

Marginals fit_marginals(const Dataset& data);
Marginals fit_marginals(const Dataset& data, std::span<const std::size_t> idx);

/// Plug-in non-smooth components: lower = mean of d_L(v)*(pi1 - pi0),
/// upper = mean of d_U(v)*(pi1 + pi0 - 1) over the evaluation points.
/// Both are nonnegative by construction.
struct Deltas {
  double lower = 0.0;
  double upper = 0.0;
};

Deltas plug_in_deltas(const OutcomeModel& model, const Dataset& data,
                      std::span<const std::size_t> eval_idx);
Deltas plug_in_deltas(const OutcomeModel& model,
                      std::span<const std::vector<double>> eval_points);

/// Everything one fold's influence-function evaluation needs: marginals,
/// the fitted surface, the plug-in deltas, and the induced decision rules.
struct NuisanceFit {
  double p_hat = 0.0;
  double mu11_hat = 0.0;
  std::shared_ptr<const OutcomeModel> model;
  double delta_l_hat = 0.0;
  double delta_u_hat = 0.0;

  /// d_L(v) = 1{pi(1,v) > pi(0,v)}; ties give 0.
  bool d_lower(std::span<const double> v) const {
    return model->predict(1, v) > model->predict(0, v);
  }
  /// d_U(v) = 1{pi(1,v) > 1 - pi(0,v)}; ties give 0.
  bool d_upper(std::span<const double> v) const {
    return model->predict(1, v) > 1.0 - model->predict(0, v);
  }
};

/// Fits all nuisances on the subset `train_idx` (the auxiliary sample):
/// marginals by sample analogy, the outcome surface by the requested
/// learner, and the deltas by plug-in over the same subset.
NuisanceFit fit_nuisances(const Dataset& data, std::span<const std::size_t> train_idx,
                          LearnerKind learner);

}  // namespace pnb
