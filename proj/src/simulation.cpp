#include "sisgoal/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sisgoal/estimators.hpp"
#include "sisgoal/screening.hpp"

namespace sisgoal {

ScenarioCoefs scenario_coefs(int scenario_id, Index p) {
  if (p < 6) throw std::invalid_argument("scenarios need at least 6 features");
  ScenarioCoefs c{VectorXd::Zero(p), VectorXd::Zero(p)};
  c.beta.head(4) << 0.6, 0.6, 0.6, 0.6;
  c.alpha.head(6) << 1, 1, 0, 0, 1, 1;
  switch (scenario_id) {
    case 1: break;
    case 2: c.alpha(0) = c.alpha(1) = 0.4; break;
    case 3: c.beta(0) = c.beta(1) = 0.2; break;
    case 4: c.alpha(4) = c.alpha(5) = 1.8; break;
    default: throw std::invalid_argument("scenario id must be 1, 2, 3 or 4");
  }
  return c;
}

MatrixXd gen_covariates(Index n, Index p, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shared = std::sqrt(rho);
  const double own = std::sqrt(1.0 - rho);
  MatrixXd X(n, p);
  for (Index i = 0; i < n; ++i) {
    const double z0 = normal(rng);
    for (Index j = 0; j < p; ++j) X(i, j) = shared * z0 + own * normal(rng);
  }
  return X;
}

VectorXd gen_treatment(const MatrixXd& X, const VectorXd& alpha, Rng& rng) {
  if (X.cols() != alpha.size()) throw std::invalid_argument("alpha length must match X columns");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const VectorXd eta = X * alpha;
  VectorXd A(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-eta(i)));
    A(i) = unif(rng) < prob ? 1.0 : 0.0;
  }
  return A;
}

VectorXd gen_outcome(const MatrixXd& X, const VectorXd& A, const VectorXd& beta,
                     double beta_A, Rng& rng, double noise_sd) {
  if (X.cols() != beta.size() || X.rows() != A.size()) {
    throw std::invalid_argument("gen_outcome: dimension mismatch");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd Y = beta_A * A + X * beta;
  for (Index i = 0; i < Y.size(); ++i) Y(i) += noise_sd * normal(rng);
  return Y;
}

Dataset simulate_dataset(const ScenarioConfig& config, std::uint64_t seed) {
  const ScenarioCoefs coefs = scenario_coefs(config.scenario_id, config.p);
  Rng rng(seed);
  Dataset d;
  d.X = gen_covariates(config.n, config.p, config.rho, rng);
  d.A = gen_treatment(d.X, coefs.alpha, rng);
  d.Y = gen_outcome(d.X, d.A, coefs.beta, config.beta_A, rng);
  d.outcome_kind = OutcomeKind::continuous;
  for (Index j = 0; j < config.p; ++j) d.feature_names.push_back("X" + std::to_string(j + 1));
  return d;
}

MetricSummary summarize_metrics(std::span<const double> ates, double truth) {
  if (ates.size() < 2) throw std::invalid_argument("summarize_metrics needs at least two estimates");
  const double count = static_cast<double>(ates.size());
  const double mean = std::accumulate(ates.begin(), ates.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : ates) ss += (v - mean) * (v - mean);
  MetricSummary m;
  m.bias = mean - truth;
  m.se = std::sqrt(ss / (count - 1.0));
  m.mse = m.bias * m.bias + m.se * m.se;
  return m;
}

ReplicationResult run_replication(const ScenarioConfig& config, std::span<const Method> methods,
                                  Index replication, const TuningGrid& grid,
                                  const PropensityOptions& options) {
  ReplicationResult rep;
  rep.replication = replication;
  rep.seed = derive_seed(config.seed, static_cast<std::uint64_t>(replication));
  const Index p = config.p;
  rep.screened_mask.assign(static_cast<std::size_t>(p), false);
  for (Method m : methods) {
    MethodReplication mr;
    mr.method = m;
    mr.selected_mask.assign(static_cast<std::size_t>(p), false);
    rep.methods.push_back(std::move(mr));
  }

  Dataset screened;
  std::vector<Index> kept;
  OutcomeFit outcome;
  try {
    const Dataset d = simulate_dataset(config, rep.seed);
    d.validate();
    const Index dn = screening_size(config.n);
    const Index q = std::min(config.q.value_or(p > dn ? dn : p), p);
    if (q < p) {
      kept = sis_screen(d, q).selected;
    } else {
      kept.resize(static_cast<std::size_t>(p));
      std::iota(kept.begin(), kept.end(), Index{0});
    }
    for (Index j : kept) rep.screened_mask[j] = true;
    screened = standardize(d.select_features(kept));
    outcome = fit_outcome(screened);
    rep.ok = true;
  } catch (const std::exception& e) {
    rep.error = e.what();
    return rep;
  }

  for (auto& mr : rep.methods) {
    try {
      const TunedSelection tuned =
          select_by_wamd(screened.X, screened.A, outcome, grid, mr.method, options);
      const VectorXd pi = propensity(tuned.best.alpha, tuned.best.intercept, screened.X, options.clip);
      mr.ate = ate_iptw(screened.Y, screened.A, iptw_weights(screened.A, pi));
      mr.lambda1 = tuned.best.lambda1;
      mr.lambda2 = tuned.best.lambda2;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        mr.selected_mask[kept[k]] = tuned.best.selected_mask[k];
      }
      mr.n_selected = tuned.best.n_selected();
      mr.ok = std::isfinite(mr.ate);
      if (!mr.ok) mr.error = "non-finite ATE";
    } catch (const std::exception& e) {
      mr.error = e.what();
    }
  }
  return rep;
}

SimulationRun run_replications(const ScenarioConfig& config, std::span<const Method> methods,
                               Index reps, const TuningGrid& grid,
                               const PropensityOptions& options, Execution exec) {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  grid.validate();
  SimulationRun run;
  run.config = config;
  const Index dn = screening_size(config.n);
  run.q = std::min(config.q.value_or(config.p > dn ? dn : config.p), config.p);
  run.replications.resize(static_cast<std::size_t>(reps));

  const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count()) if (parallel)
  for (Index r = 0; r < reps; ++r) {
    run.replications[r] = run_replication(config, methods, r, grid, options);
  }

  for (std::size_t k = 0; k < methods.size(); ++k) {
    SimulationMetrics metrics;
    metrics.method = methods[k];
    metrics.inclusion.assign(static_cast<std::size_t>(config.p), 0.0);
    metrics.selected_count.assign(static_cast<std::size_t>(config.p), 0);
    metrics.screened_count.assign(static_cast<std::size_t>(config.p), 0);
    std::vector<double> ates;
    for (const auto& rep : run.replications) {
      const MethodReplication& mr = rep.methods[k];
      if (!rep.ok || !mr.ok) {
        ++metrics.n_failed;
        continue;
      }
      ates.push_back(mr.ate);
      for (Index j = 0; j < config.p; ++j) {
        metrics.selected_count[j] += mr.selected_mask[j] ? 1 : 0;
        metrics.screened_count[j] += rep.screened_mask[j] ? 1 : 0;
      }
    }
    metrics.n_reps = static_cast<Index>(ates.size());
    if (metrics.n_reps > 0) {
      for (Index j = 0; j < config.p; ++j) {
        metrics.inclusion[j] = static_cast<double>(metrics.selected_count[j]) /
                               static_cast<double>(metrics.n_reps);
      }
    }
    if (ates.size() >= 2) metrics.summary = summarize_metrics(ates, config.beta_A);
    run.metrics.push_back(std::move(metrics));
  }
  return run;
}

double mean_inclusion(const std::vector<double>& inclusion, Index first, Index last) {
  if (first < 0 || last > static_cast<Index>(inclusion.size()) || first >= last) {
    throw std::invalid_argument("mean_inclusion: bad feature range");
  }
  double s = 0.0;
  for (Index j = first; j < last; ++j) s += inclusion[j];
  return s / static_cast<double>(last - first);
}

double screened_inclusion(const SimulationMetrics& metrics, Index first, Index last) {
  if (first < 0 || last > static_cast<Index>(metrics.screened_count.size()) || first >= last) {
    throw std::invalid_argument("screened_inclusion: bad feature range");
  }
  Index selected = 0, screened = 0;
  for (Index j = first; j < last; ++j) {
    selected += metrics.selected_count[j];
    screened += metrics.screened_count[j];
  }
  return screened > 0 ? static_cast<double>(selected) / static_cast<double>(screened) : 0.0;
}

}  // namespace sisgoal
