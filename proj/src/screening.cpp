#include "sisgoal/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sisgoal {

namespace {

struct Groups {
  std::vector<Index> treated;
  std::vector<Index> control;
  double w_hat = 0.0;
};

Groups split_groups(std::span<const double> a) {
  Groups g;
  for (Index i = 0; i < static_cast<Index>(a.size()); ++i) {
    (a[i] == 1.0 ? g.treated : g.control).push_back(i);
  }
  if (g.treated.size() < 2 || g.control.size() < 2) {
    throw DataError("ball covariance needs at least two members per treatment group");
  }
  g.w_hat = static_cast<double>(g.treated.size()) / static_cast<double>(a.size());
  return g;
}

std::vector<double> gather(std::span<const double> v, const std::vector<Index>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

void check_lengths(std::span<const double> x, std::span<const double> y,
                   std::span<const double> a) {
  if (x.size() != y.size() || x.size() != a.size()) {
    throw std::invalid_argument("x, y and a must have equal length");
  }
}

std::vector<int> argsort(const std::vector<double>& u) {
  std::vector<int> idx(u.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int l, int r) { return u[l] < u[r]; });
  return idx;
}

// Writes group members ordered by |u_k - u_i| where i = sorted[pos], by
// merging outward from pos in the value-sorted order.
void order_by_distance(const std::vector<double>& u, const std::vector<int>& sorted,
                       int pos, std::vector<int>& out) {
  const int m = static_cast<int>(u.size());
  const double c = u[sorted[pos]];
  int left = pos - 1, right = pos + 1, k = 0;
  out[k++] = sorted[pos];
  while (left >= 0 || right < m) {
    if (right >= m || (left >= 0 && c - u[sorted[left]] <= u[sorted[right]] - c)) {
      out[k++] = sorted[left--];
    } else {
      out[k++] = sorted[right++];
    }
  }
}

// rank[i * m + k] = #{l : |v_l - v_i| <= |v_k - v_i|}.
std::vector<int> distance_ranks(const std::vector<double>& v) {
  const int m = static_cast<int>(v.size());
  const auto sorted = argsort(v);
  std::vector<int> rank(static_cast<std::size_t>(m) * m);
  std::vector<int> ord(m);
  for (int pos = 0; pos < m; ++pos) {
    const int i = sorted[pos];
    order_by_distance(v, sorted, pos, ord);
    int* row = rank.data() + static_cast<std::size_t>(i) * m;
    for (int b = 0; b < m;) {
      const double d = std::abs(v[ord[b]] - v[i]);
      int e = b + 1;
      while (e < m && std::abs(v[ord[e]] - v[i]) == d) ++e;
      for (int k = b; k < e; ++k) row[ord[k]] = e;
      b = e;
    }
  }
  return rank;
}

// Group term (1/m^6) sum_{i,j} (m * c_xy - c_x * c_y)^2 with integer counts.
double group_term(const std::vector<double>& u, const std::vector<int>& y_rank) {
  const int m = static_cast<int>(u.size());
  const auto sorted = argsort(u);
  std::vector<int> ord(m);
  std::vector<int> tree(m + 1);
  long double total = 0.0L;
  for (int pos = 0; pos < m; ++pos) {
    const int i = sorted[pos];
    const double c = u[i];
    order_by_distance(u, sorted, pos, ord);
    std::fill(tree.begin(), tree.end(), 0);
    const int* ry = y_rank.data() + static_cast<std::size_t>(i) * m;
    for (int b = 0; b < m;) {
      const double d = std::abs(u[ord[b]] - c);
      int e = b + 1;
      while (e < m && std::abs(u[ord[e]] - c) == d) ++e;
      for (int k = b; k < e; ++k) {
        for (int t = ry[ord[k]]; t <= m; t += t & -t) ++tree[t];
      }
      for (int k = b; k < e; ++k) {
        const int cy = ry[ord[k]];
        std::int64_t cxy = 0;
        for (int t = cy; t > 0; t -= t & -t) cxy += tree[t];
        const std::int64_t diff = cxy * m - static_cast<std::int64_t>(e) * cy;
        total += static_cast<long double>(diff) * static_cast<long double>(diff);
      }
      b = e;
    }
  }
  const long double m2 = static_cast<long double>(m) * m;
  return static_cast<double>(total / (m2 * m2 * m2));
}

double group_term_cubic(const std::vector<double>& u, const std::vector<double>& v) {
  const int m = static_cast<int>(u.size());
  long double total = 0.0L;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      std::int64_t cx = 0, cy = 0, cxy = 0;
      for (int k = 0; k < m; ++k) {
        const int bx = ball_membership(u[i], u[j], u[k]);
        const int by = ball_membership(v[i], v[j], v[k]);
        cx += bx;
        cy += by;
        cxy += bx * by;
      }
      const std::int64_t diff = cxy * m - cx * cy;
      total += static_cast<long double>(diff) * static_cast<long double>(diff);
    }
  }
  const long double m2 = static_cast<long double>(m) * m;
  return static_cast<double>(total / (m2 * m2 * m2));
}

double group_term_sextuple(const std::vector<double>& u, const std::vector<double>& v) {
  const int m = static_cast<int>(u.size());
  std::vector<int> dx(m), dy(m);
  std::int64_t total = 0;  // sum of (2 xi^X)(2 xi^Y)
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        dx[k] = ball_membership(u[i], u[j], u[k]);
        dy[k] = ball_membership(v[i], v[j], v[k]);
      }
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t) {
              const int xi_x = dx[k] * dx[l] + dx[s] * dx[t] - dx[k] * dx[s] - dx[l] * dx[t];
              if (xi_x == 0) continue;
              const int xi_y = dy[k] * dy[l] + dy[s] * dy[t] - dy[k] * dy[s] - dy[l] * dy[t];
              total += xi_x * xi_y;
            }
    }
  }
  const long double m2 = static_cast<long double>(m) * m;
  return static_cast<double>(static_cast<long double>(total) / (4.0L * m2 * m2 * m2));
}

}  // namespace

int ball_membership(double center, double radius_point, double candidate) {
  return std::abs(candidate - center) <= std::abs(radius_point - center) ? 1 : 0;
}

double cond_ball_cov2(std::span<const double> x, std::span<const double> y,
                      std::span<const double> a) {
  check_lengths(x, y, a);
  const Groups g = split_groups(a);
  const double t1 = group_term(gather(x, g.treated), distance_ranks(gather(y, g.treated)));
  const double t0 = group_term(gather(x, g.control), distance_ranks(gather(y, g.control)));
  return g.w_hat * t1 + (1.0 - g.w_hat) * t0;
}

double cond_ball_cov2_cubic(std::span<const double> x, std::span<const double> y,
                            std::span<const double> a) {
  check_lengths(x, y, a);
  const Groups g = split_groups(a);
  const double t1 = group_term_cubic(gather(x, g.treated), gather(y, g.treated));
  const double t0 = group_term_cubic(gather(x, g.control), gather(y, g.control));
  return g.w_hat * t1 + (1.0 - g.w_hat) * t0;
}

double cond_ball_cov2_oracle(std::span<const double> x, std::span<const double> y,
                             std::span<const double> a) {
  check_lengths(x, y, a);
  const Groups g = split_groups(a);
  if (g.treated.size() > 12 || g.control.size() > 12) {
    throw std::invalid_argument("brute-force ball covariance limited to 12 members per group");
  }
  const double t1 = group_term_sextuple(gather(x, g.treated), gather(y, g.treated));
  const double t0 = group_term_sextuple(gather(x, g.control), gather(y, g.control));
  return g.w_hat * t1 + (1.0 - g.w_hat) * t0;
}

Index screening_size(Index n) {
  if (n < 3) throw std::invalid_argument("screening size needs n >= 3");
  return static_cast<Index>(std::floor(static_cast<double>(n) / std::log(static_cast<double>(n))));
}

std::vector<double> screening_scores(const Dataset& d, Execution exec) {
  const std::span<const double> a(d.A.data(), static_cast<std::size_t>(d.n()));
  const std::span<const double> y(d.Y.data(), static_cast<std::size_t>(d.n()));
  const Groups g = split_groups(a);
  const auto rank1 = distance_ranks(gather(y, g.treated));
  const auto rank0 = distance_ranks(gather(y, g.control));

  const Index p = d.p();
  std::vector<double> scores(static_cast<std::size_t>(p));
  const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_count()) if (parallel)
  for (Index j = 0; j < p; ++j) {
    const std::span<const double> x(d.X.col(j).data(), static_cast<std::size_t>(d.n()));
    scores[j] = g.w_hat * group_term(gather(x, g.treated), rank1) +
                (1.0 - g.w_hat) * group_term(gather(x, g.control), rank0);
  }
  return scores;
}

ScreeningResult rank_scores(std::vector<double> scores, Index q, double w_hat) {
  const Index p = static_cast<Index>(scores.size());
  if (q < 0 || q > p) throw std::invalid_argument("screening size q must lie in [0, p]");
  ScreeningResult r;
  r.order.resize(static_cast<std::size_t>(p));
  std::iota(r.order.begin(), r.order.end(), Index{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](Index l, Index rr) { return scores[l] > scores[rr]; });
  r.selected.assign(r.order.begin(), r.order.begin() + q);
  r.scores = std::move(scores);
  r.q = q;
  r.w_hat = w_hat;
  return r;
}

ScreeningResult sis_screen(const Dataset& d, Index q, Execution exec) {
  if (q > d.p()) throw std::invalid_argument("screening size q exceeds feature count");
  const double w_hat = static_cast<double>(d.n_treated()) / static_cast<double>(d.n());
  return rank_scores(screening_scores(d, exec), q, w_hat);
}

}  // namespace sisgoal
