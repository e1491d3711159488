#pragma once

#include <span>
#include <string>
#include <vector>

#include "sisgoal/dataset.hpp"
#include "sisgoal/glm.hpp"

namespace sisgoal {

enum class Method { oal, goal };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct AdaptiveWeights {
  VectorXd w;  // |beta_j|^-gamma, +inf where beta_j == 0
  double gamma = 2.0;
};

/// Throws std::invalid_argument unless gamma > 1.
AdaptiveWeights adaptive_weights(const VectorXd& beta, double gamma);
AdaptiveWeights adaptive_weights(const OutcomeFit& fit, double gamma);

/// gamma = 2 * (gcf + 1 - c) for lambda1 = n^c, so that
/// lambda1 * n^(gamma/2 - 1) = n^gcf. Requires c < gcf + 1/2.
double gamma_for_lambda(double exponent, double gcf = 2.0);

struct TuningGrid {
  std::vector<double> lambda1_exponents;  // lambda1 = n^c
  std::vector<double> lambda2_values;
  double gamma_convergence_factor = 2.0;

  static TuningGrid defaults();
  void validate() const;
};

struct PropensityOptions {
  bool intercept = true;
  double clip = kDefaultClip;
  double irls_tol = 1e-8;
  int max_irls = 100;
  LassoOptions cd;
};

struct SelectionResult {
  VectorXd alpha;
  double intercept = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gamma = 0.0;
  double wamd = 0.0;
  Method method = Method::oal;
  bool converged = false;
  int n_irls = 0;
  std::vector<bool> selected_mask;  // |alpha_j| > kSelectionTolerance

  Index n_selected() const;
};

std::vector<bool> selection_mask(const VectorXd& alpha,
                                 double tol = kSelectionTolerance);

/// Adaptive-lasso logistic propensity fit: IRLS from zero, each step solved
/// by weighted_lasso_cd on the unaugmented working problem.
SelectionResult fit_oal(const MatrixXd& X, const VectorXd& A,
                        const AdaptiveWeights& weights, double lambda1,
                        const PropensityOptions& options = {});

struct AugmentedProblem {
  MatrixXd X;  // [X; sqrt(lambda2) I_q]
  VectorXd z;  // [z; 0_q]
  VectorXd t;  // [t; 1_q]
};

AugmentedProblem augment_for_goal(const MatrixXd& X, const WorkingResponse& working,
                                  double lambda2);

/// Adaptive elastic-net propensity fit. Each IRLS step solves the naive
/// problem on the augmented data; the returned coefficients are the
/// converged naive coefficients scaled by (1 + lambda2). The intercept is
/// not rescaled.
SelectionResult fit_goal(const MatrixXd& X, const VectorXd& A,
                         const AdaptiveWeights& weights, double lambda1, double lambda2,
                         const PropensityOptions& options = {});

struct TuningRecord {
  Method method = Method::oal;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gamma = 0.0;
  double wamd = 0.0;
  Index n_selected = 0;
  bool converged = false;
};

/// Index of the converged record with the smallest wAMD; ties go to the
/// larger lambda1, then the larger lambda2. Returns -1 if none converged.
Index best_record(std::span<const TuningRecord> records);

struct TunedSelection {
  SelectionResult best;
  std::vector<TuningRecord> report;  // grid order
};

/// Scans the tuning grid (lambda1 only for OAL, lambda2 x lambda1 for GOAL)
/// and keeps the candidate with minimal wAMD. X must hold the standardized
/// retained features. Throws ConvergenceError if no candidate converged.
TunedSelection select_by_wamd(const MatrixXd& X, const VectorXd& A,
                              const OutcomeFit& outcome, const TuningGrid& grid,
                              Method method, const PropensityOptions& options = {},
                              Execution exec = Execution::parallel);

}  // namespace sisgoal
