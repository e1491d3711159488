#pragma once

#include <vector>

#include "sisgoal/dataset.hpp"

namespace sisgoal {

enum class Family { gaussian, binomial };

struct OutcomeFit {
  double beta_A = 0.0;
  VectorXd beta;  // one per retained feature
  double intercept = 0.0;
  Family family = Family::gaussian;
  int n_iter = 0;
};

/// Regresses Y on (1, A, X). Gaussian: least squares via column-pivoted QR.
/// Binomial: logistic maximum likelihood by Newton's method.
/// Throws DataError on a rank-deficient design and ConvergenceError when the
/// logistic fit does not converge (e.g. separation).
OutcomeFit fit_outcome(const Dataset& d);

/// sign(z) * max(|z| - g, 0).
double soft_threshold(double z, double g);

struct WorkingResponse {
  VectorXd z;  // working response
  VectorXd t;  // IRLS weights p(1 - p)
};

/// IRLS quantities at the linear predictor intercept + X * alpha, with the
/// fitted probabilities clipped to [clip, 1 - clip].
WorkingResponse irls_working(const VectorXd& alpha, double intercept,
                             const MatrixXd& X, const VectorXd& A,
                             double clip = kDefaultClip);

struct LassoOptions {
  double tol = 1e-8;        // max coefficient change between sweeps
  int max_sweeps = 10000;
  double kkt_tol = 1e-6;
  bool intercept = true;
  bool trace_objective = false;
};

struct LassoFit {
  VectorXd alpha;
  double intercept = 0.0;
  int n_iter = 0;  // sweeps
  bool converged = false;
  double kkt_residual = 0.0;
  std::vector<double> objective_trace;  // per sweep, when requested
};

/// Minimizes 0.5 * sum_i t_i (z_i - b0 - x_i' alpha)^2 + lambda1 * sum_j w_j |alpha_j|
/// by cyclic coordinate descent on the weighted Gram matrix. The intercept
/// b0 is unpenalized and only enters the first `intercept_rows` rows (all
/// rows when negative); w_j = +inf pins alpha_j to zero.
///
/// `start`, when non-null, supplies the initial coefficients.
LassoFit weighted_lasso_cd(const MatrixXd& X, const VectorXd& z, const VectorXd& t,
                           const VectorXd& w, double lambda1,
                           const LassoOptions& options = {},
                           const LassoFit* start = nullptr,
                           Index intercept_rows = -1);

/// Largest violation of the lasso stationarity conditions, computed from
/// residuals directly (independent of the solver's Gram bookkeeping).
double lasso_kkt_residual(const MatrixXd& X, const VectorXd& z, const VectorXd& t,
                          const VectorXd& w, double lambda1, const VectorXd& alpha,
                          double intercept, Index intercept_rows = -1);

}  // namespace sisgoal
