#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sisgoal/dataset.hpp"
#include "sisgoal/selection.hpp"

namespace sisgoal {

using Rng = std::mt19937_64;

/// Data-generating design: X1-X2 confounders, X3-X4 outcome-only
/// predictors, X5-X6 treatment-only predictors, the rest spurious.
struct ScenarioConfig {
  int scenario_id = 1;
  Index n = 300;
  Index p = 100;
  double rho = 0.0;
  double beta_A = 0.0;
  std::uint64_t seed = 1;
  std::optional<Index> q;  // screening size override
};

struct ScenarioCoefs {
  VectorXd beta;   // outcome model
  VectorXd alpha;  // treatment model
};

ScenarioCoefs scenario_coefs(int scenario_id, Index p);

/// Equicorrelated standard normals: X_j = sqrt(rho) Z_0 + sqrt(1 - rho) Z_j.
MatrixXd gen_covariates(Index n, Index p, double rho, Rng& rng);

/// Bernoulli draws with logit P(A = 1) = X * alpha (no intercept).
VectorXd gen_treatment(const MatrixXd& X, const VectorXd& alpha, Rng& rng);

/// Y = beta_A * A + X * beta + noise_sd * N(0, 1).
VectorXd gen_outcome(const MatrixXd& X, const VectorXd& A, const VectorXd& beta,
                     double beta_A, Rng& rng, double noise_sd = 1.0);

/// One simulated dataset, drawn X then A then Y from a generator seeded
/// with `seed`. Feature names are X1..Xp.
Dataset simulate_dataset(const ScenarioConfig& config, std::uint64_t seed);

struct MethodReplication {
  Method method = Method::oal;
  bool ok = false;
  std::string error;
  double ate = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<bool> selected_mask;  // over all p features
  Index n_selected = 0;
};

struct ReplicationResult {
  Index replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;  // data generation and screening succeeded
  std::string error;
  std::vector<bool> screened_mask;  // over all p features
  std::vector<MethodReplication> methods;
};

struct MetricSummary {
  double bias = 0.0;
  double se = 0.0;
  double mse = 0.0;
};

/// bias = mean - truth, se = sample sd, mse = bias^2 + se^2.
/// Needs at least two estimates.
MetricSummary summarize_metrics(std::span<const double> ates, double truth);

struct SimulationMetrics {
  Method method = Method::oal;
  MetricSummary summary;
  std::vector<double> inclusion;  // per feature, over successful replications
  std::vector<Index> selected_count;  // per feature
  std::vector<Index> screened_count;  // per feature, replications where it passed screening
  Index n_reps = 0;
  Index n_failed = 0;
};

struct SimulationRun {
  ScenarioConfig config;
  Index q = 0;
  std::vector<ReplicationResult> replications;
  std::vector<SimulationMetrics> metrics;  // methods order
};

/// One replication: generate -> screen (q = floor(n/ln n) when p exceeds it,
/// otherwise p) -> standardize -> outcome fit -> wAMD-tuned fit per method
/// -> IPTW ATE.
ReplicationResult run_replication(const ScenarioConfig& config, std::span<const Method> methods,
                                  Index replication, const TuningGrid& grid,
                                  const PropensityOptions& options = {});

/// Replication r uses derive_seed(config.seed, r), so results do not depend
/// on scheduling. Failed replications are excluded from the metrics and
/// counted in n_failed.
SimulationRun run_replications(const ScenarioConfig& config, std::span<const Method> methods,
                               Index reps, const TuningGrid& grid = TuningGrid::defaults(),
                               const PropensityOptions& options = {},
                               Execution exec = Execution::parallel);

/// Mean inclusion over features with 0-based indices in [first, last).
double mean_inclusion(const std::vector<double>& inclusion, Index first, Index last);

/// Selection rate among features in [first, last) that reached the
/// propensity model: total selections / total times screened in.
double screened_inclusion(const SimulationMetrics& metrics, Index first, Index last);

}  // namespace sisgoal
