#include "sisgoal/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sisgoal {

namespace {

struct GroupSums {
  double treated = 0.0;
  double control = 0.0;
};

GroupSums weight_sums(const VectorXd& A, const VectorXd& tau) {
  GroupSums s;
  for (Index i = 0; i < A.size(); ++i) (A(i) == 1.0 ? s.treated : s.control) += tau(i);
  if (!(s.treated > 0.0) || !(s.control > 0.0)) {
    throw DataError("weighted estimator needs both treatment groups");
  }
  return s;
}

}  // namespace

VectorXd propensity(const VectorXd& alpha, double intercept, const MatrixXd& X,
                    double clip) {
  VectorXd eta = (X * alpha).array() + intercept;
  return eta.unaryExpr([clip](double v) {
    return std::clamp(1.0 / (1.0 + std::exp(-v)), clip, 1.0 - clip);
  });
}

VectorXd iptw_weights(const VectorXd& A, const VectorXd& pi) {
  VectorXd tau(A.size());
  for (Index i = 0; i < A.size(); ++i) {
    tau(i) = A(i) == 1.0 ? 1.0 / pi(i) : 1.0 / (1.0 - pi(i));
  }
  return tau;
}

double ate_iptw(const VectorXd& Y, const VectorXd& A, const VectorXd& tau) {
  const GroupSums s = weight_sums(A, tau);
  double treated = 0.0, control = 0.0;
  for (Index i = 0; i < Y.size(); ++i) {
    (A(i) == 1.0 ? treated : control) += tau(i) * Y(i);
  }
  return treated / s.treated - control / s.control;
}

double wamd(const MatrixXd& X, const VectorXd& A, const VectorXd& tau,
            const VectorXd& beta_abs) {
  if (X.cols() != beta_abs.size() || X.rows() != A.size() || A.size() != tau.size()) {
    throw std::invalid_argument("wamd: dimension mismatch");
  }
  const GroupSums s = weight_sums(A, tau);
  VectorXd treated_w(A.size()), control_w(A.size());
  for (Index i = 0; i < A.size(); ++i) {
    treated_w(i) = A(i) == 1.0 ? tau(i) / s.treated : 0.0;
    control_w(i) = A(i) == 1.0 ? 0.0 : tau(i) / s.control;
  }
  const VectorXd diff = X.transpose() * (treated_w - control_w);
  return beta_abs.cwiseAbs().dot(diff.cwiseAbs());
}

PositivityReport positivity_report(const VectorXd& pi, const VectorXd& A, double clip) {
  PositivityReport r;
  constexpr double inf = std::numeric_limits<double>::infinity();
  r.min_pi_treated = r.min_pi_control = inf;
  r.max_pi_treated = r.max_pi_control = -inf;
  for (Index i = 0; i < pi.size(); ++i) {
    const bool treated = A(i) == 1.0;
    double& lo = treated ? r.min_pi_treated : r.min_pi_control;
    double& hi = treated ? r.max_pi_treated : r.max_pi_control;
    lo = std::min(lo, pi(i));
    hi = std::max(hi, pi(i));
    if (pi(i) <= clip || pi(i) >= 1.0 - clip) ++r.n_clipped;
    r.max_tau = std::max(r.max_tau, treated ? 1.0 / pi(i) : 1.0 / (1.0 - pi(i)));
  }
  return r;
}

}  // namespace sisgoal
