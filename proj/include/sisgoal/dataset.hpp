#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sisgoal/common.hpp"

namespace sisgoal {

enum class OutcomeKind { continuous, binary };

std::string to_string(OutcomeKind kind);

/// Covariates X (n x p), binary treatment A, outcome Y and feature names.
///
/// Values are never mutated after construction; every transformation below
/// returns a new Dataset.
struct Dataset {
  MatrixXd X;
  VectorXd A;
  VectorXd Y;
  std::vector<std::string> feature_names;
  OutcomeKind outcome_kind = OutcomeKind::continuous;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  Index n_treated() const;
  Index n_control() const { return n() - n_treated(); }

  /// Throws DataError if A is not 0/1, a group is empty, X/Y are not finite,
  /// names are not unique or shapes disagree.
  void validate() const;

  Dataset select_rows(std::span<const Index> rows) const;
  Dataset select_features(std::span<const Index> columns) const;
};

enum class RemovalReason { none, constant, redundant_correlation };

std::string to_string(RemovalReason reason);

struct FeatureMeta {
  Index index = 0;
  std::string name;
  bool kept = true;
  RemovalReason removal_reason = RemovalReason::none;
};

/// Which CSV columns play which role. An empty feature list means every
/// column that is neither treatment nor outcome.
struct ColumnRoles {
  std::string treatment = "A";
  std::string outcome = "Y";
  std::vector<std::string> features;
  std::optional<OutcomeKind> outcome_kind;

  bool operator==(const ColumnRoles&) const = default;
};

Dataset load_csv(const std::filesystem::path& path, const ColumnRoles& roles);

/// Writes treatment, outcome, then features, with round-trip precision.
void write_csv(const Dataset& d, const std::filesystem::path& path,
               const std::string& treatment_name = "A",
               const std::string& outcome_name = "Y");

/// Centers each feature to mean 0 and scales to sample sd 1 (n - 1).
/// Throws DataError naming the first constant column.
Dataset standardize(const Dataset& d);

struct FeatureFilterResult {
  Dataset data;
  std::vector<FeatureMeta> features;  // one entry per input feature
};

FeatureFilterResult drop_constant_features(const Dataset& d);

/// Greedy removal of redundant features: while some pair has
/// |corr| > cutoff, drop the member of the most correlated pair with the
/// larger mean |corr| against the remaining features (ties drop the higher
/// index). Expects standardized features.
FeatureFilterResult correlation_filter(const Dataset& d, double cutoff);

}  // namespace sisgoal
