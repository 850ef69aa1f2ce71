#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnbounds/bounds.hpp"
#include "pnbounds/intervals.hpp"
#include "pnbounds/nuisance.hpp"

namespace pnb {

inline constexpr int kReportSchemaVersion = 1;

struct AnalyzeOptions {
  double alpha = 0.05;
  int k_folds = 4;
  LearnerKind learner = LearnerKind::LogisticInteraction;
  std::uint64_t seed = 1;
  bool no_covariates = false;
};

/// Full analysis of one dataset: marginals, no-covariate bounds, the
/// cross-fitted covariate-assisted bounds (unless disabled), and every
/// confidence interval. The metadata reproduces the run exactly.
struct AnalysisReport {
  std::size_t n = 0;
  int covariate_dim = 0;
  std::vector<std::string> covariate_names;
  AnalyzeOptions options;
  Marginals marginals;
  PtBounds pt;
  std::optional<CrossfitBounds> crossfit;
  std::vector<IntervalResult> intervals;  // CI1, CI4, then CI2/CI3/one-sided

  std::string to_json() const;
  std::string to_table_csv() const;
  /// Human-readable summary, bounds first then the intervals.
  std::string to_text() const;
};

AnalysisReport run_analysis(const Dataset& data, const AnalyzeOptions& options);

}  // namespace pnb
