#pragma once

// Generators and independent oracles shared by the test suites. Nothing here
// calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sisgoal/dataset.hpp"

namespace testing_support {

using sisgoal::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Rng = std::mt19937_64;

inline MatrixXd normal_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  MatrixXd M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = normal(rng);
  return M;
}

inline VectorXd normal_vector(Index n, Rng& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Bernoulli treatment from a logistic model with a forced minimum of two
// units per group.
inline VectorXd logistic_treatment(const VectorXd& eta, Rng& rng) {
  std::uniform_real_distribution<double> unif;
  VectorXd A(eta.size());
  for (Index i = 0; i < eta.size(); ++i) A(i) = unif(rng) < expit(eta(i)) ? 1.0 : 0.0;
  A(0) = A(1) = 1.0;
  A(2) = A(3) = 0.0;
  return A;
}

// Values on a coarse lattice so ties are common, or continuous.
inline std::vector<double> draw_values(Index n, Rng& rng, bool with_ties) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (with_ties) {
    std::uniform_int_distribution<int> pick(0, 4);
    for (auto& x : v) x = pick(rng);
  } else {
    std::normal_distribution<double> normal;
    for (auto& x : v) x = normal(rng);
  }
  return v;
}

// Treatment vector with exactly n1 treated, shuffled.
inline std::vector<double> draw_groups(Index n1, Index n0, Rng& rng) {
  std::vector<double> a(static_cast<std::size_t>(n1), 1.0);
  a.resize(static_cast<std::size_t>(n1 + n0), 0.0);
  std::shuffle(a.begin(), a.end(), rng);
  return a;
}

inline sisgoal::Dataset random_dataset(Index n, Index p, Rng& rng) {
  sisgoal::Dataset d;
  d.X = normal_matrix(n, p, rng);
  VectorXd eta = 0.8 * d.X.col(0);
  if (p > 1) eta += 0.8 * d.X.col(1);
  d.A = logistic_treatment(eta, rng);
  d.Y = 0.5 * d.A + normal_vector(n, rng);
  if (p > 2) d.Y += 0.6 * d.X.col(0) + 0.6 * d.X.col(2);
  for (Index j = 0; j < p; ++j) d.feature_names.push_back("V" + std::to_string(j + 1));
  return d;
}

// Minimizes sum_i [log(1 + exp(eta_i)) - a_i eta_i] + (ridge / 2) * |alpha|^2
// with eta = b0 + X alpha by undamped Newton steps. The intercept is never
// penalized. Returns (b0, alpha) stacked; b0 = 0 when intercept is false.
inline VectorXd newton_logistic(const MatrixXd& X, const VectorXd& A, bool intercept,
                                double ridge = 0.0) {
  const Index n = X.rows(), q = X.cols();
  const Index off = intercept ? 1 : 0;
  MatrixXd D(n, q + off);
  if (intercept) D.col(0).setOnes();
  D.rightCols(q) = X;
  VectorXd theta = VectorXd::Zero(q + off);
  for (int iter = 0; iter < 200; ++iter) {
    const VectorXd eta = D * theta;
    VectorXd p(n), w(n);
    for (Index i = 0; i < n; ++i) {
      p(i) = expit(eta(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    VectorXd grad = D.transpose() * (p - A);
    MatrixXd H = D.transpose() * w.asDiagonal() * D;
    for (Index j = off; j < q + off; ++j) {
      grad(j) += ridge * theta(j);
      H(j, j) += ridge;
    }
    const VectorXd step = H.ldlt().solve(grad);
    theta -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-13) break;
  }
  VectorXd out(q + 1);
  out(0) = intercept ? theta(0) : 0.0;
  out.tail(q) = theta.tail(q);
  return out;
}

// Weighted least squares of z on (1, X) with row weights t via the normal
// equations. Returns (b0, alpha) stacked.
inline VectorXd wls_normal_equations(const MatrixXd& X, const VectorXd& z, const VectorXd& t) {
  const Index n = X.rows(), q = X.cols();
  MatrixXd D(n, q + 1);
  D.col(0).setOnes();
  D.rightCols(q) = X;
  const MatrixXd G = D.transpose() * t.asDiagonal() * D;
  const VectorXd r = D.transpose() * (t.array() * z.array()).matrix();
  return G.llt().solve(r);
}

// Pearson correlation of two columns.
inline double correlation(const VectorXd& a, const VectorXd& b) {
  const VectorXd ac = a.array() - a.mean();
  const VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace testing_support
