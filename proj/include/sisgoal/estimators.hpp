#pragma once

#include "sisgoal/common.hpp"

namespace sisgoal {

/// expit(intercept + X * alpha), clipped to [clip, 1 - clip].
VectorXd propensity(const VectorXd& alpha, double intercept, const MatrixXd& X,
                    double clip = kDefaultClip);

/// Unstabilized inverse probability weights: 1/pi for treated units,
/// 1/(1 - pi) for controls.
VectorXd iptw_weights(const VectorXd& A, const VectorXd& pi);

/// Hajek estimator: difference of the tau-weighted treated and control means
/// of Y. Throws DataError when a group is empty.
double ate_iptw(const VectorXd& Y, const VectorXd& A, const VectorXd& tau);

/// Weighted absolute mean difference:
///   sum_j |beta_j| * |weighted treated mean of X_j - weighted control mean of X_j|.
double wamd(const MatrixXd& X, const VectorXd& A, const VectorXd& tau,
            const VectorXd& beta_abs);

struct PositivityReport {
  double min_pi_treated = 0.0;
  double max_pi_treated = 0.0;
  double min_pi_control = 0.0;
  double max_pi_control = 0.0;
  Index n_clipped = 0;  // propensities sitting on a clip bound
  double max_tau = 0.0;
};

PositivityReport positivity_report(const VectorXd& pi, const VectorXd& A,
                                   double clip = kDefaultClip);

struct WeightedSample {
  VectorXd pi;
  VectorXd tau;
  double ate = 0.0;
  double wamd = 0.0;
};

}  // namespace sisgoal
