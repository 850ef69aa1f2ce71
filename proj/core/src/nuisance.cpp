#include "pnbounds/nuisance.hpp"

#include <numeric>

namespace pnb {

Marginals fit_marginals(const Dataset& data, std::span<const std::size_t> idx) {
  double n1 = 0, n0 = 0, s1 = 0, s0 = 0;
  for (std::size_t i : idx) {
    const Record& r = data[i];
    if (r.x) {
      n1 += 1;
      s1 += r.y;
    } else {
      n0 += 1;
      s0 += r.y;
    }
  }
  if (n1 == 0) throw EstimationError("marginals: treated arm is empty");
  if (n0 == 0) throw EstimationError("marginals: control arm is empty");
  Marginals m;
  m.p_hat = n1 / (n1 + n0);
  m.mu11_hat = s1 / n1;
  m.mu10_hat = s0 / n0;
  if (m.mu11_hat == 0.0) {
    throw EstimationError("marginals: no treated successes, attribution target undefined");
  }
  return m;
}

Marginals fit_marginals(const Dataset& data) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return fit_marginals(data, idx);
}

Deltas plug_in_deltas(const OutcomeModel& model, const Dataset& data,
                      std::span<const std::size_t> eval_idx) {
  if (eval_idx.empty()) throw ConfigError("plug_in_deltas: empty evaluation set");
  Deltas d;
  for (std::size_t i : eval_idx) {
    const double p1 = model.predict(1, data[i].v);
    const double p0 = model.predict(0, data[i].v);
    if (p1 > p0) d.lower += p1 - p0;
    if (p1 > 1.0 - p0) d.upper += p1 + p0 - 1.0;
  }
  d.lower /= static_cast<double>(eval_idx.size());
  d.upper /= static_cast<double>(eval_idx.size());
  return d;
}

Deltas plug_in_deltas(const OutcomeModel& model,
                      std::span<const std::vector<double>> eval_points) {
  if (eval_points.empty()) throw ConfigError("plug_in_deltas: empty evaluation set");
  Deltas d;
  for (const auto& v : eval_points) {
    const double p1 = model.predict(1, v);
    const double p0 = model.predict(0, v);
    if (p1 > p0) d.lower += p1 - p0;
    if (p1 > 1.0 - p0) d.upper += p1 + p0 - 1.0;
  }
  d.lower /= static_cast<double>(eval_points.size());
  d.upper /= static_cast<double>(eval_points.size());
  return d;
}

NuisanceFit fit_nuisances(const Dataset& data, std::span<const std::size_t> train_idx,
                          LearnerKind learner) {
  const Marginals m = fit_marginals(data, train_idx);
  NuisanceFit fit;
  fit.p_hat = m.p_hat;
  fit.mu11_hat = m.mu11_hat;
  fit.model = fit_outcome_model(data, train_idx, learner);
  const Deltas d = plug_in_deltas(*fit.model, data, train_idx);
  fit.delta_l_hat = d.lower;
  fit.delta_u_hat = d.upper;
  return fit;
}

}  // namespace pnb
