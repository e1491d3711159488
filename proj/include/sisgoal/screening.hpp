#pragma once

#include <span>
#include <vector>

#include "sisgoal/dataset.hpp"

namespace sisgoal {

/// 1 iff `candidate` lies in the closed ball centered at `center` whose
/// radius is |radius_point - center|.
int ball_membership(double center, double radius_point, double candidate);

/// Empirical conditional ball covariance BCov^2_n(x, y | a).
///
/// Each treatment group with m members contributes
///   (1/m^2) * sum_{i,j} (D_xy(i,j) - D_x(i,j) * D_y(i,j))^2,
/// where D_x(i,j) is the share of group members inside the closed x-ball
/// centered at x_i through x_j, D_y the same for y, and D_xy the share inside
/// both. Groups are combined with weights n1/n and n0/n.
///
/// For each center i the three counts are obtained from one sort by x
/// distance plus a Fenwick tree over y-distance ranks, so the cost is
/// O(m^2 log m) per group. Requires at least two members per group.
double cond_ball_cov2(std::span<const double> x, std::span<const double> y,
                      std::span<const double> a);

/// Same statistic evaluated by the direct O(m^3) triple loop over (i, j, k).
/// Serial reference for cond_ball_cov2.
double cond_ball_cov2_cubic(std::span<const double> x, std::span<const double> y,
                            std::span<const double> a);

/// Literal six-index sum with normalizers n1^6 and n0^6, the control-group
/// term running over A = 0. O(m^6), so groups larger than 12 are rejected.
double cond_ball_cov2_oracle(std::span<const double> x, std::span<const double> y,
                             std::span<const double> a);

/// floor(n / ln n), the default screening size. Requires n >= 3.
Index screening_size(Index n);

struct ScreeningResult {
  std::vector<double> scores;   // one per feature, >= 0
  std::vector<Index> order;     // descending score, ties by lower index
  std::vector<Index> selected;  // first q entries of order
  Index q = 0;
  double w_hat = 0.0;           // n1 / n
};

/// Per-feature scores, one OpenMP task per feature column.
std::vector<double> screening_scores(const Dataset& d,
                                     Execution exec = Execution::parallel);

/// Ranks precomputed scores and keeps the top q.
ScreeningResult rank_scores(std::vector<double> scores, Index q, double w_hat);

ScreeningResult sis_screen(const Dataset& d, Index q,
                           Execution exec = Execution::parallel);

}  // namespace sisgoal
