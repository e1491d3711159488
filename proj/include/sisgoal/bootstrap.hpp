#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sisgoal/pipeline.hpp"

namespace sisgoal {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double length() const { return upper - lower; }
};

/// point -/+ z * se. At level 0.95 z is the conventional 1.96; other levels
/// use the exact normal quantile.
Interval normal_ci(double point, double se, double level = 0.95);

struct TrimmedSummary {
  Index retained = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Sorts the values and drops floor(N * lower_pct / 100) from the bottom and
/// floor(N * (100 - upper_pct) / 100) from the top, then summarizes the rest.
/// 10 000 values at 10/90 keep exactly 8 000.
TrimmedSummary trimmed_summary(std::span<const double> values, double lower_pct,
                               double upper_pct);

/// Column means of equal-length boolean masks.
std::vector<double> feature_inclusion(const std::vector<std::vector<bool>>& masks);

/// Row indices for resample b of a dataset with n rows.
using Resampler = std::function<std::vector<Index>(Index b, Index n)>;

/// n draws with replacement from a generator seeded with derive_seed(seed, b).
Resampler multinomial_resampler(std::uint64_t seed);

struct BootstrapOptions {
  Method method = Method::goal;
  Index B = 1000;
  std::uint64_t seed = 1;
  TuningGrid grid = TuningGrid::defaults();
  PropensityOptions fit;
  Execution exec = Execution::parallel;
};

struct BootstrapResult {
  Method method = Method::goal;
  double point = 0.0;
  Index B = 0;
  std::vector<double> resample_ates;  // successful resamples, index order
  double boot_mean = 0.0;
  double bias = 0.0;
  double se = 0.0;
  double mse = 0.0;
  Interval ci;
  double ci_length = 0.0;
  std::vector<double> inclusion_freq;  // per feature of the fixed set
  std::vector<std::vector<bool>> masks;
  Index excluded = 0;
  std::vector<std::string> feature_names;
};

/// Nonparametric bootstrap of estimate_ate on a fixed feature set. Every
/// resample refits standardization, the outcome model and the tuned
/// propensity model. Resamples that fail (single treatment level, constant
/// column, no convergence) are skipped and counted in `excluded`.
BootstrapResult bootstrap_ate(const Dataset& d, const BootstrapOptions& options,
                              const Resampler& resampler = {});

}  // namespace sisgoal
