#include "pnbounds/learners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <vector>

namespace pnb {

LearnerKind parse_learner(std::string_view tag) {
  if (tag == "logistic-interaction") return LearnerKind::LogisticInteraction;
  if (tag == "logistic-main") return LearnerKind::LogisticMain;
  if (tag == "arm-mean") return LearnerKind::ArmMean;
  if (tag == "local-average") return LearnerKind::LocalAverage;
  throw ConfigError("unknown learner '" + std::string(tag) +
                    "' (expected logistic-interaction, logistic-main, arm-mean, local-average)");
}

std::string_view learner_tag(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::LogisticInteraction: return "logistic-interaction";
    case LearnerKind::LogisticMain: return "logistic-main";
    case LearnerKind::ArmMean: return "arm-mean";
    case LearnerKind::LocalAverage: return "local-average";
  }
  throw ConfigError("invalid learner kind");
}

double OutcomeModel::predict(int x, std::span<const double> v) const {
  return std::clamp(raw_predict(x, v), kPredictionClamp, 1.0 - kPredictionClamp);
}

namespace {

double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + exp(z)) without overflow
double log1pexp(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

class LogisticModel final : public OutcomeModel {
 public:
  LogisticModel(Eigen::VectorXd beta, bool interaction, int dim, bool fallback)
      : beta_(std::move(beta)), interaction_(interaction), dim_(dim), fallback_(fallback) {}

  std::string_view tag() const override {
    return interaction_ ? "logistic-interaction" : "logistic-main";
  }

  bool fallback_engaged() const override { return fallback_; }

  std::string coefficients_json() const override {
    nlohmann::json j;
    j["intercept"] = beta_[0];
    j["x"] = beta_[1];
    for (int d = 0; d < dim_; ++d) j["v" + std::to_string(d + 1)] = beta_[2 + d];
    if (interaction_) {
      for (int d = 0; d < dim_; ++d) j["xv" + std::to_string(d + 1)] = beta_[2 + dim_ + d];
    }
    j["ridge_fallback"] = fallback_;
    return j.dump();
  }

 private:
  double raw_predict(int x, std::span<const double> v) const override {
    double eta = beta_[0] + beta_[1] * x;
    for (int d = 0; d < dim_; ++d) eta += beta_[2 + d] * v[static_cast<std::size_t>(d)];
    if (interaction_ && x) {
      for (int d = 0; d < dim_; ++d) eta += beta_[2 + dim_ + d] * v[static_cast<std::size_t>(d)];
    }
    return expit(eta);
  }

  Eigen::VectorXd beta_;
  bool interaction_;
  int dim_;
  bool fallback_;
};

constexpr double kScoreTol = 1e-8;
constexpr int kMaxNewtonIter = 100;
constexpr int kMaxHalvings = 20;
constexpr double kRidge = 1e-4;
// Saturated linear index or exploding coefficients mark a likelihood
// maximized at infinity; from then on the Hessian gets the ridge.
constexpr double kSeparationEtaMax = 15.0;
constexpr double kSeparationBetaMax = 30.0;

std::unique_ptr<OutcomeModel> fit_logistic(const Dataset& data,
                                           std::span<const std::size_t> idx,
                                           bool interaction) {
  const int dim = data.covariate_dim();
  const int p = 2 + dim + (interaction ? dim : 0);
  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Record& r = data[idx[static_cast<std::size_t>(i)]];
    X(i, 0) = 1.0;
    X(i, 1) = r.x;
    for (int d = 0; d < dim; ++d) X(i, 2 + d) = r.v[static_cast<std::size_t>(d)];
    if (interaction) {
      for (int d = 0; d < dim; ++d) X(i, 2 + dim + d) = r.x * r.v[static_cast<std::size_t>(d)];
    }
    y[i] = r.y;
  }

  const auto loglik = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = X * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += y[i] * eta[i] - log1pexp(eta[i]);
    return ll / static_cast<double>(n);
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ll = loglik(beta);
  bool fallback = false;
  bool converged = false;
  for (int iter = 0; iter < kMaxNewtonIter; ++iter) {
    const Eigen::VectorXd eta = X * beta;
    if (!fallback && (eta.lpNorm<Eigen::Infinity>() > kSeparationEtaMax ||
                      beta.lpNorm<Eigen::Infinity>() > kSeparationBetaMax)) {
      fallback = true;
    }
    const Eigen::VectorXd mu = eta.unaryExpr([](double z) { return expit(z); });
    const Eigen::VectorXd score = X.transpose() * (y - mu) / static_cast<double>(n);
    if (score.lpNorm<Eigen::Infinity>() < kScoreTol) {
      converged = true;
      break;
    }
    const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
    Eigen::MatrixXd hess = X.transpose() * w.asDiagonal() * X / static_cast<double>(n);
    if (fallback) hess.diagonal().array() += kRidge;
    Eigen::LDLT<Eigen::MatrixXd> solver(hess);
    Eigen::VectorXd step = solver.solve(score);
    if (solver.info() != Eigen::Success || !step.allFinite()) {
      if (!fallback) {
        fallback = true;
        hess.diagonal().array() += kRidge;
        solver.compute(hess);
        step = solver.solve(score);
      }
      if (!step.allFinite()) throw EstimationError("logistic fit: singular Hessian");
    }
    // damped update: halve the step until the likelihood stops decreasing
    double t = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double cand_ll = loglik(candidate);
    for (int h = 0; h < kMaxHalvings && !(cand_ll >= ll - 1e-14); ++h) {
      t *= 0.5;
      candidate = beta + t * step;
      cand_ll = loglik(candidate);
    }
    beta = candidate;
    ll = cand_ll;
  }
  if (!converged && !fallback) {
    throw EstimationError("logistic fit: Newton did not converge within " +
                          std::to_string(kMaxNewtonIter) + " iterations");
  }
  return std::make_unique<LogisticModel>(std::move(beta), interaction, dim, fallback);
}

class ArmMeanModel final : public OutcomeModel {
 public:
  ArmMeanModel(double mu1, double mu0) : mu1_(mu1), mu0_(mu0) {}
  std::string_view tag() const override { return "arm-mean"; }
  std::string coefficients_json() const override {
    nlohmann::json j;
    j["mu1"] = mu1_;
    j["mu0"] = mu0_;
    return j.dump();
  }

 private:
  double raw_predict(int x, std::span<const double>) const override { return x ? mu1_ : mu0_; }
  double mu1_, mu0_;
};

std::pair<double, double> arm_means(const Dataset& data, std::span<const std::size_t> idx) {
  double s1 = 0, n1 = 0, s0 = 0, n0 = 0;
  for (std::size_t i : idx) {
    const Record& r = data[i];
    if (r.x) {
      s1 += r.y;
      n1 += 1;
    } else {
      s0 += r.y;
      n0 += 1;
    }
  }
  if (n1 == 0 || n0 == 0) throw EstimationError("arm-mean fit: a treatment arm is empty");
  return {s1 / n1, s0 / n0};
}

class LocalAverageModel final : public OutcomeModel {
 public:
  LocalAverageModel(const Dataset& data, std::span<const std::size_t> idx) {
    const int dim = data.covariate_dim();
    mean_.assign(static_cast<std::size_t>(dim), 0.0);
    scale_.assign(static_cast<std::size_t>(dim), 1.0);
    const double n = static_cast<double>(idx.size());
    for (std::size_t i : idx) {
      for (int d = 0; d < dim; ++d) mean_[static_cast<std::size_t>(d)] += data[i].v[static_cast<std::size_t>(d)];
    }
    for (double& m : mean_) m /= n;
    std::vector<double> ss(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i : idx) {
      for (int d = 0; d < dim; ++d) {
        const double c = data[i].v[static_cast<std::size_t>(d)] - mean_[static_cast<std::size_t>(d)];
        ss[static_cast<std::size_t>(d)] += c * c;
      }
    }
    for (int d = 0; d < dim; ++d) {
      const double sd = std::sqrt(ss[static_cast<std::size_t>(d)] / n);
      scale_[static_cast<std::size_t>(d)] = sd > 0 ? sd : 1.0;
    }
    for (std::size_t i : idx) {
      const Record& r = data[i];
      Arm& a = arm_[static_cast<std::size_t>(r.x)];
      for (int d = 0; d < dim; ++d) {
        a.z.push_back((r.v[static_cast<std::size_t>(d)] - mean_[static_cast<std::size_t>(d)]) /
                      scale_[static_cast<std::size_t>(d)]);
      }
      a.y.push_back(r.y);
    }
    if (arm_[0].y.empty() || arm_[1].y.empty()) {
      throw EstimationError("local-average fit: a treatment arm is empty");
    }
    k_ = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(idx.size()), 0.7) / 2.0));
    if (k_ < 1) k_ = 1;
    dim_ = dim;
    for (Arm& a : arm_) a.fallback_mean = std::accumulate(a.y.begin(), a.y.end(), 0.0) / a.y.size();
  }

  std::string_view tag() const override { return "local-average"; }

  std::string coefficients_json() const override {
    nlohmann::json j;
    j["k_neighbors"] = k_;
    j["n_treated"] = arm_[1].y.size();
    j["n_control"] = arm_[0].y.size();
    return j.dump();
  }

 private:
  struct Arm {
    std::vector<double> z;  // standardized covariates, row-major
    std::vector<int> y;
    double fallback_mean = 0.0;
  };

  double raw_predict(int x, std::span<const double> v) const override {
    const Arm& a = arm_[static_cast<std::size_t>(x != 0)];
    if (dim_ == 0) return a.fallback_mean;  // no metric: whole-arm mean
    const std::size_t m = a.y.size();
    const std::size_t k = std::min(k_, m);
    std::vector<std::pair<double, std::size_t>> d2(m);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      const double* z = a.z.data() + i * static_cast<std::size_t>(dim_);
      for (int d = 0; d < dim_; ++d) {
        const double diff = (v[static_cast<std::size_t>(d)] - mean_[static_cast<std::size_t>(d)]) /
                                scale_[static_cast<std::size_t>(d)] -
                            z[d];
        acc += diff * diff;
      }
      d2[i] = {acc, i};  // index tie-break keeps the neighbour set deterministic
    }
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(k - 1), d2.end());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += a.y[d2[i].second];
    return s / static_cast<double>(k);
  }

  std::array<Arm, 2> arm_;
  std::vector<double> mean_, scale_;
  std::size_t k_ = 1;
  int dim_ = 0;
};

}  // namespace

std::unique_ptr<OutcomeModel> fit_outcome_model(const Dataset& data,
                                                std::span<const std::size_t> idx,
                                                LearnerKind kind) {
  if (idx.empty()) throw EstimationError("cannot fit an outcome model on an empty subset");
  switch (kind) {
    case LearnerKind::LogisticInteraction: return fit_logistic(data, idx, true);
    case LearnerKind::LogisticMain: return fit_logistic(data, idx, false);
    case LearnerKind::ArmMean: {
      const auto [mu1, mu0] = arm_means(data, idx);
      return std::make_unique<ArmMeanModel>(mu1, mu0);
    }
    case LearnerKind::LocalAverage: return std::make_unique<LocalAverageModel>(data, idx);
  }
  throw ConfigError("invalid learner kind");
}

std::unique_ptr<OutcomeModel> fit_outcome_model(const Dataset& data, LearnerKind kind) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return fit_outcome_model(data, idx, kind);
}

}  // namespace pnb
