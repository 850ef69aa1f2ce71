#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pnbounds/common.hpp"

namespace pnb {

/// One experimental unit: binary treatment, binary outcome, covariates.
struct Record {
  int x = 0;
  int y = 0;
  std::vector<double> v;
};

/// Immutable sample of records sharing one covariate dimension.
/// Safe to share across concurrent readers after construction.
class Dataset {
 public:
  /// Validates x,y in {0,1}, finite covariates, consistent dimension, N >= 1.
  explicit Dataset(std::vector<Record> records,
                   std::vector<std::string> covariate_names = {});

  std::size_t size() const { return records_.size(); }
  int covariate_dim() const { return covariate_dim_; }
  const Record& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<Record>& records() const { return records_; }
  const std::vector<std::string>& covariate_names() const { return names_; }

  std::size_t arm_count(int x) const { return x ? n_treated_ : size() - n_treated_; }

  /// Checks the in-sample analogue of the randomized-experiment assumption:
  /// both arms nonempty and at least one treated success. Throws otherwise.
  void require_inference_ready() const;

 private:
  std::vector<Record> records_;
  std::vector<std::string> names_;
  int covariate_dim_ = 0;
  std::size_t n_treated_ = 0;
  std::size_t n_treated_success_ = 0;
};

/// Reads a UTF-8 comma-separated file with header `x,y[,name...]`.
/// Rows must be complete (no missing values) with binary x and y.
Dataset load_csv(const std::filesystem::path& path);

/// Parses CSV content from a string (same contract as load_csv).
Dataset parse_csv(const std::string& content, const std::string& origin = "<string>");

/// Writes the dataset back out; numeric values round-trip exactly.
void write_csv(const Dataset& data, std::ostream& out);

/// Assignment of every record to one of k folds.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // per record, fold ids 0..k-1

  /// Record indices per fold, in increasing index order.
  std::vector<std::vector<std::size_t>> folds() const;
};

/// Near-equal random partition of {0..n-1} into k folds; fold sizes differ
/// by at most one, the remainder goes one-per-fold to the lowest fold ids.
/// Deterministic in (n, k, seed).
FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);

/// Fold plan stratified by treatment arm: each arm is split near-equally
/// across folds, and total fold sizes still differ by at most one.
/// Deterministic in (arm labels, k, seed).
FoldPlan make_stratified_folds(const Dataset& data, int k, std::uint64_t seed);

}  // namespace pnb
