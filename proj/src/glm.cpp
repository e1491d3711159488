#include "sisgoal/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sisgoal {

namespace {

MatrixXd outcome_design(const Dataset& d) {
  MatrixXd D(d.n(), d.p() + 2);
  D.col(0).setOnes();
  D.col(1) = d.A;
  D.rightCols(d.p()) = d.X;
  return D;
}

double expit(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

}  // namespace

OutcomeFit fit_outcome(const Dataset& d) {
  const MatrixXd D = outcome_design(d);
  if (D.cols() > d.n()) {
    throw DataError("outcome model has more coefficients than observations");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(D);
  qr.setThreshold(1e-10);
  if (qr.rank() < D.cols()) throw DataError("outcome design matrix is rank deficient");

  OutcomeFit fit;
  VectorXd coef;
  if (d.outcome_kind == OutcomeKind::continuous) {
    fit.family = Family::gaussian;
    coef = qr.solve(d.Y);
    fit.n_iter = 1;
  } else {
    fit.family = Family::binomial;
    coef = VectorXd::Zero(D.cols());
    bool converged = false;
    for (int iter = 1; iter <= 100 && !converged; ++iter) {
      const VectorXd eta = D * coef;
      VectorXd prob = eta.unaryExpr(&expit);
      const VectorXd weight = prob.array() * (1.0 - prob.array());
      const MatrixXd H = D.transpose() * weight.asDiagonal() * D;
      const VectorXd step = H.ldlt().solve(D.transpose() * (d.Y - prob));
      coef += step;
      fit.n_iter = iter;
      if (!coef.allFinite()) break;
      converged = step.cwiseAbs().maxCoeff() < 1e-10 * (1.0 + coef.cwiseAbs().maxCoeff());
    }
    if (!converged || coef.cwiseAbs().maxCoeff() > 1e6) {
      throw ConvergenceError("logistic outcome model did not converge (possible separation)");
    }
  }
  fit.intercept = coef(0);
  fit.beta_A = coef(1);
  fit.beta = coef.tail(d.p());
  return fit;
}

double soft_threshold(double z, double g) {
  if (z > g) return z - g;
  if (z < -g) return z + g;
  return 0.0;
}

WorkingResponse irls_working(const VectorXd& alpha, double intercept,
                             const MatrixXd& X, const VectorXd& A, double clip) {
  const VectorXd eta = (X * alpha).array() + intercept;
  WorkingResponse w;
  w.z.resize(eta.size());
  w.t.resize(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    const double prob = std::clamp(expit(eta(i)), clip, 1.0 - clip);
    w.t(i) = prob * (1.0 - prob);
    w.z(i) = eta(i) + (A(i) - prob) / w.t(i);
  }
  return w;
}

double lasso_kkt_residual(const MatrixXd& X, const VectorXd& z, const VectorXd& t,
                          const VectorXd& w, double lambda1, const VectorXd& alpha,
                          double intercept, Index intercept_rows) {
  const Index mi = intercept_rows < 0 ? X.rows() : intercept_rows;
  VectorXd r = z - X * alpha;
  r.head(mi).array() -= intercept;
  const VectorXd grad = -(X.transpose() * t.cwiseProduct(r));
  double worst = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    if (std::isinf(w(j))) continue;
    const double pen = lambda1 * w(j);
    const double v = alpha(j) != 0.0
                         ? std::abs(grad(j) + pen * (alpha(j) > 0 ? 1.0 : -1.0))
                         : std::max(0.0, std::abs(grad(j)) - pen);
    worst = std::max(worst, v);
  }
  return worst;
}

LassoFit weighted_lasso_cd(const MatrixXd& X, const VectorXd& z, const VectorXd& t,
                           const VectorXd& w, double lambda1,
                           const LassoOptions& options, const LassoFit* start,
                           Index intercept_rows) {
  const Index m = X.rows();
  const Index q = X.cols();
  if (z.size() != m || t.size() != m || w.size() != q) {
    throw std::invalid_argument("weighted_lasso_cd: dimension mismatch");
  }
  if (lambda1 < 0.0) throw std::invalid_argument("lambda1 must be non-negative");
  const Index mi = options.intercept ? (intercept_rows < 0 ? m : intercept_rows) : 0;

  VectorXd xbar = VectorXd::Zero(q);
  double zbar = 0.0;
  if (mi > 0) {
    const auto t_head = t.head(mi);
    const double sw = t_head.sum();
    xbar = X.topRows(mi).transpose() * t_head / sw;
    zbar = t_head.dot(z.head(mi)) / sw;
  }
  const VectorXd sqrt_t = t.cwiseSqrt();
  MatrixXd Xw = X;
  VectorXd zw = z;
  if (mi > 0) {
    Xw.topRows(mi).rowwise() -= xbar.transpose();
    zw.head(mi).array() -= zbar;
  }
  Xw = sqrt_t.asDiagonal() * Xw;
  zw = zw.cwiseProduct(sqrt_t);
  const MatrixXd G = Xw.transpose() * Xw;
  const VectorXd c = Xw.transpose() * zw;

  std::vector<char> excluded(static_cast<std::size_t>(q));
  VectorXd pen(q);
  for (Index j = 0; j < q; ++j) {
    if (w(j) < 0.0 || std::isnan(w(j))) throw std::invalid_argument("penalty weights must be >= 0");
    excluded[j] = std::isinf(w(j)) || G(j, j) <= 0.0;
    pen(j) = excluded[j] ? 0.0 : lambda1 * w(j);
  }

  LassoFit fit;
  fit.alpha = (start && start->alpha.size() == q) ? start->alpha : VectorXd::Zero(q);
  for (Index j = 0; j < q; ++j) {
    if (excluded[j]) fit.alpha(j) = 0.0;
  }
  VectorXd g_alpha = G * fit.alpha;
  const double half_zz = 0.5 * zw.squaredNorm();
  auto objective = [&] {
    double penalty = 0.0;
    for (Index j = 0; j < q; ++j) {
      if (fit.alpha(j) != 0.0) penalty += pen(j) * std::abs(fit.alpha(j));
    }
    return half_zz - c.dot(fit.alpha) + 0.5 * fit.alpha.dot(g_alpha) + penalty;
  };
  if (options.trace_objective) fit.objective_trace.push_back(objective());

  auto finish_intercept = [&] { fit.intercept = mi > 0 ? zbar - xbar.dot(fit.alpha) : 0.0; };

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < q; ++j) {
      if (excluded[j]) continue;
      const double gjj = G(j, j);
      const double rho = c(j) - g_alpha(j) + gjj * fit.alpha(j);
      const double updated = soft_threshold(rho, pen(j)) / gjj;
      const double delta = updated - fit.alpha(j);
      if (delta != 0.0) {
        g_alpha += delta * G.col(j);
        fit.alpha(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    fit.n_iter = sweep;
    if (options.trace_objective) fit.objective_trace.push_back(objective());
    if (max_change < options.tol) {
      finish_intercept();
      fit.kkt_residual =
          lasso_kkt_residual(X, z, t, w, lambda1, fit.alpha, fit.intercept, mi);
      if (fit.kkt_residual <= options.kkt_tol) {
        fit.converged = true;
        return fit;
      }
      if (max_change == 0.0) break;  // no coordinate moves any more
    }
  }
  finish_intercept();
  fit.kkt_residual = lasso_kkt_residual(X, z, t, w, lambda1, fit.alpha, fit.intercept, mi);
  fit.converged = false;
  return fit;
}

}  // namespace sisgoal
