#include "sisgoal/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sisgoal/estimators.hpp"

namespace sisgoal {

namespace {

enum class Penalty { lasso, elastic_net };

// IRLS on the naive coefficients; each step is one weighted_lasso_cd solve.
SelectionResult irls_fit(const MatrixXd& X, const VectorXd& A, const AdaptiveWeights& weights,
                         double lambda1, double lambda2, Penalty penalty,
                         const PropensityOptions& options) {
  const Index n = X.rows();
  const Index q = X.cols();
  if (weights.w.size() != q) throw std::invalid_argument("adaptive weights must have one entry per feature");
  if (A.size() != n) throw std::invalid_argument("treatment length must match design rows");
  if (lambda2 < 0.0) throw std::invalid_argument("lambda2 must be non-negative");

  LassoOptions cd = options.cd;
  cd.intercept = options.intercept;

  LassoFit state;
  state.alpha = VectorXd::Zero(q);
  state.intercept = 0.0;

  SelectionResult out;
  bool converged = false;
  for (int iter = 1; iter <= options.max_irls; ++iter) {
    const WorkingResponse working = irls_working(state.alpha, state.intercept, X, A, options.clip);
    LassoFit next;
    if (penalty == Penalty::elastic_net) {
      const AugmentedProblem aug = augment_for_goal(X, working, lambda2);
      next = weighted_lasso_cd(aug.X, aug.z, aug.t, weights.w, lambda1, cd, &state, n);
    } else {
      next = weighted_lasso_cd(X, working.z, working.t, weights.w, lambda1, cd, &state);
    }
    out.n_irls = iter;
    if (!next.alpha.allFinite() || !std::isfinite(next.intercept)) {
      state = next;
      break;
    }
    const double change = std::max((next.alpha - state.alpha).cwiseAbs().maxCoeff(),
                                   std::abs(next.intercept - state.intercept));
    state = std::move(next);
    if (change < options.irls_tol) {
      converged = state.converged;
      break;
    }
  }

  out.alpha = penalty == Penalty::elastic_net ? VectorXd((1.0 + lambda2) * state.alpha) : state.alpha;
  out.intercept = state.intercept;
  out.lambda1 = lambda1;
  out.lambda2 = penalty == Penalty::elastic_net ? lambda2 : 0.0;
  out.gamma = weights.gamma;
  out.method = penalty == Penalty::elastic_net ? Method::goal : Method::oal;
  out.converged = converged && out.alpha.allFinite();
  out.selected_mask = selection_mask(out.alpha);
  return out;
}

struct Candidate {
  double lambda1;
  double lambda2;
  double gamma;
};

}  // namespace

std::string to_string(Method method) { return method == Method::goal ? "SIS+GOAL" : "SIS+OAL"; }

Method parse_method(const std::string& name) {
  if (name == "oal" || name == "OAL" || name == "SIS+OAL") return Method::oal;
  if (name == "goal" || name == "GOAL" || name == "SIS+GOAL") return Method::goal;
  throw std::invalid_argument("unknown method '" + name + "' (expected oal or goal)");
}

AdaptiveWeights adaptive_weights(const VectorXd& beta, double gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("adaptive weight exponent gamma must exceed 1");
  AdaptiveWeights out;
  out.gamma = gamma;
  out.w = beta.unaryExpr([gamma](double b) {
    return b == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(std::abs(b), -gamma);
  });
  return out;
}

AdaptiveWeights adaptive_weights(const OutcomeFit& fit, double gamma) {
  return adaptive_weights(fit.beta, gamma);
}

double gamma_for_lambda(double exponent, double gcf) {
  if (!(exponent < gcf + 0.5)) {
    throw std::invalid_argument("lambda1 exponent must be below gamma_convergence_factor + 0.5");
  }
  return 2.0 * (gcf + 1.0 - exponent);
}

TuningGrid TuningGrid::defaults() {
  TuningGrid g;
  g.lambda1_exponents = {-10, -5, -2, -1, -0.75, -0.5, -0.25, 0.25, 0.49};
  g.lambda2_values = {0.0};
  for (double e : {-2.0, -1.5, -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0}) {
    g.lambda2_values.push_back(std::pow(10.0, e));
  }
  g.gamma_convergence_factor = 2.0;
  return g;
}

void TuningGrid::validate() const {
  if (lambda1_exponents.empty() || lambda2_values.empty()) {
    throw std::invalid_argument("tuning grids must be non-empty");
  }
  bool has_zero = false;
  for (double l2 : lambda2_values) {
    if (!(l2 >= 0.0)) throw std::invalid_argument("lambda2 values must be non-negative");
    has_zero = has_zero || l2 == 0.0;
  }
  if (!has_zero) throw std::invalid_argument("lambda2 grid must contain 0");
  for (double c : lambda1_exponents) gamma_for_lambda(c, gamma_convergence_factor);
}

Index SelectionResult::n_selected() const {
  return static_cast<Index>(std::count(selected_mask.begin(), selected_mask.end(), true));
}

std::vector<bool> selection_mask(const VectorXd& alpha, double tol) {
  std::vector<bool> mask(static_cast<std::size_t>(alpha.size()));
  for (Index j = 0; j < alpha.size(); ++j) mask[j] = std::abs(alpha(j)) > tol;
  return mask;
}

SelectionResult fit_oal(const MatrixXd& X, const VectorXd& A, const AdaptiveWeights& weights,
                        double lambda1, const PropensityOptions& options) {
  return irls_fit(X, A, weights, lambda1, 0.0, Penalty::lasso, options);
}

AugmentedProblem augment_for_goal(const MatrixXd& X, const WorkingResponse& working,
                                  double lambda2) {
  if (lambda2 < 0.0) throw std::invalid_argument("lambda2 must be non-negative");
  const Index n = X.rows();
  const Index q = X.cols();
  AugmentedProblem aug;
  aug.X.resize(n + q, q);
  aug.X.topRows(n) = X;
  aug.X.bottomRows(q) = std::sqrt(lambda2) * MatrixXd::Identity(q, q);
  aug.z.resize(n + q);
  aug.z << working.z, VectorXd::Zero(q);
  aug.t.resize(n + q);
  aug.t << working.t, VectorXd::Ones(q);
  return aug;
}

SelectionResult fit_goal(const MatrixXd& X, const VectorXd& A, const AdaptiveWeights& weights,
                         double lambda1, double lambda2, const PropensityOptions& options) {
  return irls_fit(X, A, weights, lambda1, lambda2, Penalty::elastic_net, options);
}

Index best_record(std::span<const TuningRecord> records) {
  Index best = -1;
  for (Index k = 0; k < static_cast<Index>(records.size()); ++k) {
    const auto& r = records[k];
    if (!r.converged || std::isnan(r.wamd)) continue;
    if (best < 0) {
      best = k;
      continue;
    }
    const auto& b = records[best];
    if (r.wamd < b.wamd ||
        (r.wamd == b.wamd &&
         (r.lambda1 > b.lambda1 || (r.lambda1 == b.lambda1 && r.lambda2 > b.lambda2)))) {
      best = k;
    }
  }
  return best;
}

TunedSelection select_by_wamd(const MatrixXd& X, const VectorXd& A, const OutcomeFit& outcome,
                              const TuningGrid& grid, Method method,
                              const PropensityOptions& options, Execution exec) {
  grid.validate();
  if (outcome.beta.size() != X.cols()) {
    throw std::invalid_argument("outcome fit does not match the retained features");
  }
  const double n = static_cast<double>(X.rows());
  std::vector<Candidate> candidates;
  const std::vector<double> l2_values =
      method == Method::goal ? grid.lambda2_values : std::vector<double>{0.0};
  for (double l2 : l2_values) {
    for (double c : grid.lambda1_exponents) {
      candidates.push_back({std::pow(n, c), l2, gamma_for_lambda(c, grid.gamma_convergence_factor)});
    }
  }

  const VectorXd beta_abs = outcome.beta.cwiseAbs();
  const Index count = static_cast<Index>(candidates.size());
  std::vector<SelectionResult> fits(static_cast<std::size_t>(count));
  std::vector<TuningRecord> report(static_cast<std::size_t>(count));
  const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count()) if (parallel)
  for (Index k = 0; k < count; ++k) {
    const Candidate& cand = candidates[k];
    const AdaptiveWeights weights = adaptive_weights(outcome.beta, cand.gamma);
    SelectionResult fit = method == Method::goal
                              ? fit_goal(X, A, weights, cand.lambda1, cand.lambda2, options)
                              : fit_oal(X, A, weights, cand.lambda1, options);
    fit.wamd = std::numeric_limits<double>::quiet_NaN();
    if (fit.converged) {
      const VectorXd pi = propensity(fit.alpha, fit.intercept, X, options.clip);
      fit.wamd = wamd(X, A, iptw_weights(A, pi), beta_abs);
    }
    report[k] = {method, cand.lambda1, cand.lambda2, cand.gamma, fit.wamd, fit.n_selected(),
                 fit.converged};
    fits[k] = std::move(fit);
  }

  const Index best = best_record(report);
  if (best < 0) {
    std::ostringstream msg;
    msg << "no tuning candidate converged for " << to_string(method) << ":";
    for (const auto& r : report) msg << " (lambda1=" << r.lambda1 << ", lambda2=" << r.lambda2 << ")";
    throw ConvergenceError(msg.str());
  }
  return {std::move(fits[best]), std::move(report)};
}

}  // namespace sisgoal
