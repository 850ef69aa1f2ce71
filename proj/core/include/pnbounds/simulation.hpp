#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnbounds/bounds.hpp"
#include "pnbounds/dataset.hpp"
#include "pnbounds/rng.hpp"

namespace pnb {

/// Configuration for one coverage/width study cell.
struct SimConfig {
  std::size_t n = 500;
  double lambda = 0.0;  // mixing weight in [0,1] between the extreme joint laws
  int reps = 500;
  int k_folds = 5;
  LearnerKind learner = LearnerKind::LogisticInteraction;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

/// Conditional outcome probability of the synthetic experiment:
/// expit(x - v1 + 2 v2 + 5 x v1 - 5 x v2).
double dgp_pi(int x, double v1, double v2);

/// Joint potential-outcome cell probabilities given the marginals and the
/// mixing weight. Cell {ab} is pr{Y(1)=a, Y(0)=b}; the law is completed
/// from pr{Y(1)=1, Y(0)=0} = lambda*min(pi1, 1-pi0) +
/// (1-lambda)*max(0, pi1-pi0) by marginal consistency.
struct JointCells {
  double p10 = 0.0;
  double p11 = 0.0;
  double p01 = 0.0;
  double p00 = 0.0;
};
JointCells dgp_joint_cells(double pi1, double pi0, double lambda);

/// Draws an observed-data sample (X, Y, V1, V2) of size n.
Dataset dgp_sample(std::size_t n, double lambda, Rng& rng);

/// Population bounds and the attribution probability they bracket.
struct OracleTruth {
  double l_true = 0.0;
  double u_true = 0.0;
  double pn_true = 0.0;
};

/// Population moments of the synthetic experiment.
struct DgpMoments {
  double mu11 = 0.0;
  double mu10 = 0.0;
  double delta_l = 0.0;
  double delta_u = 0.0;
};

/// Moments by tensor Gauss-Legendre quadrature (nodes per axis >= 2).
DgpMoments dgp_moments_quadrature(int nodes_per_axis = 201);
/// Moments by plain Monte Carlo integration.
DgpMoments dgp_moments_monte_carlo(std::size_t draws, std::uint64_t seed);

OracleTruth oracle_truth(double lambda);  // quadrature-based
OracleTruth oracle_truth_monte_carlo(double lambda, std::size_t draws, std::uint64_t seed);

/// Quadrature truth cross-checked against an independent Monte Carlo
/// evaluation; throws if the two disagree beyond `tolerance`.
OracleTruth verified_oracle_truth(double lambda, std::size_t mc_draws = 10'000'000,
                                  std::uint64_t mc_seed = 99, double tolerance = 1e-3);

/// Aggregated study output for one method in one (lambda, n) cell.
struct StudyRow {
  std::string method;
  double average_width = 0.0;
  double coverage_rate = 0.0;
  int reps = 0;  // replications actually aggregated
  std::size_t n = 0;
  double lambda = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;  // CI1..CI4 order
  OracleTruth truth;
  std::size_t n = 0;
  double lambda = 0.0;
  int reps_requested = 0;
  int reps_failed = 0;
  int inverted_bounds = 0;  // replications where lower > upper before collapse
};

/// Runs one study cell: per replication, draws a sample (seed + rep),
/// builds CI1-CI4, and aggregates widths and coverage of the true
/// attribution probability in replication order. Replication failures are
/// excluded; more than 1% of them aborts the study.
StudyReport run_study(const SimConfig& config);

/// Serializers for a batch of cells: a wide CSV (one row per cell) and a
/// JSON document with per-method rows.
std::string study_csv(const std::vector<StudyReport>& reports);
std::string study_json(const std::vector<StudyReport>& reports);

}  // namespace pnb
