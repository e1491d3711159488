#pragma once

#include <optional>
#include <vector>

#include "sisgoal/dataset.hpp"
#include "sisgoal/estimators.hpp"
#include "sisgoal/screening.hpp"
#include "sisgoal/selection.hpp"

namespace sisgoal {

/// Full-data feature preparation for real datasets:
/// drop constant columns -> screen to q (default floor(n/ln n), capped at p)
/// -> optional correlation filter on the standardized screened features.
struct PreparedFeatures {
  Dataset data;                      // kept features, original scale
  ScreeningResult screening;         // over the non-constant features
  std::vector<FeatureMeta> features; // one per input feature
};

struct PrepareOptions {
  std::optional<Index> q;
  std::optional<double> cutoff;
  Execution exec = Execution::parallel;
};

PreparedFeatures prepare_features(const Dataset& raw, const PrepareOptions& options);

struct PipelineEstimate {
  TunedSelection tuning;
  OutcomeFit outcome;
  WeightedSample sample;
  PositivityReport positivity;
};

/// standardize -> outcome fit -> wAMD-tuned propensity fit -> IPTW ATE on a
/// fixed feature set.
PipelineEstimate estimate_ate(const Dataset& d, Method method, const TuningGrid& grid,
                              const PropensityOptions& options = {},
                              Execution exec = Execution::parallel);

}  // namespace sisgoal
