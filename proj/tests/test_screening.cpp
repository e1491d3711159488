#include <numeric>

#include "doctest.h"
#include "support.hpp"

#include "sisgoal/screening.hpp"
#include "sisgoal/simulation.hpp"

using namespace sisgoal;
using testing_support::Rng;

TEST_SUITE("screening") {

TEST_CASE("ball_membership uses a closed ball") {
  CHECK(ball_membership(0.0, 1.0, 2.0) == 0);
  CHECK(ball_membership(0.0, 1.0, -1.0) == 1);
  CHECK(ball_membership(0.3, 0.3, 0.3) == 1);
  CHECK(ball_membership(0.3, -5.0, 0.3) == 1);
}

TEST_CASE("constant feature within groups scores exactly zero") {
  const std::vector<double> x = {1, 1, 1, 1, 2, 2, 2, 2};
  const std::vector<double> y = {0.3, -1.2, 2.2, 0.1, 1.5, 0.7, -0.4, 0.9};
  const std::vector<double> a = {1, 1, 1, 1, 0, 0, 0, 0};
  CHECK(cond_ball_cov2(x, y, a) == 0.0);
  CHECK(cond_ball_cov2_cubic(x, y, a) == 0.0);
  CHECK(cond_ball_cov2_oracle(x, y, a) == 0.0);
}

TEST_CASE("x equal to y within groups gives the maximal value") {
  const std::vector<double> x = {0.4, -1.3, 2.1, 0.9, 1.7, -0.2, 0.5, -2.4};
  const std::vector<double> a = {1, 1, 1, 1, 0, 0, 0, 0};
  const double self = cond_ball_cov2(x, x, a);
  CHECK(std::abs(self - cond_ball_cov2_oracle(x, x, a)) <= 1e-12);
  // Golden value from an independent brute-force evaluation of the
  // six-index sum.
  CHECK(std::abs(self - 0.0321044921875) <= 1e-15);
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto y = testing_support::draw_values(8, rng, false);
    CHECK(cond_ball_cov2(x, y, a) <= self + 1e-12);
  }
}

TEST_CASE("seeded n = 10 instance matches the six-index sum") {
  Rng rng(10);
  const auto x = testing_support::draw_values(10, rng, false);
  const auto y = testing_support::draw_values(10, rng, false);
  const auto a = testing_support::draw_groups(5, 5, rng);
  CHECK(std::abs(cond_ball_cov2(x, y, a) - cond_ball_cov2_oracle(x, y, a)) <= 1e-12);
}

TEST_CASE("property: fast, cubic and six-index forms agree") {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n1 = 2 + static_cast<Index>(rng() % 11);
    const Index n0 = 2 + static_cast<Index>(rng() % 11);
    const bool ties = rep % 3 == 0;
    const auto x = testing_support::draw_values(n1 + n0, rng, ties);
    const auto y = testing_support::draw_values(n1 + n0, rng, ties);
    const auto a = testing_support::draw_groups(n1, n0, rng);
    const double oracle = cond_ball_cov2_oracle(x, y, a);
    CHECK(oracle >= 0.0);
    CHECK(std::abs(cond_ball_cov2(x, y, a) - oracle) <= 1e-12);
    CHECK(std::abs(cond_ball_cov2_cubic(x, y, a) - oracle) <= 1e-12);
  }
}

TEST_CASE("property: fast and cubic forms agree on larger groups with ties") {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const Index n1 = 20 + static_cast<Index>(rng() % 60);
    const Index n0 = 20 + static_cast<Index>(rng() % 60);
    const auto x = testing_support::draw_values(n1 + n0, rng, rep % 2 == 0);
    const auto y = testing_support::draw_values(n1 + n0, rng, rep % 4 == 0);
    const auto a = testing_support::draw_groups(n1, n0, rng);
    const double cubic = cond_ball_cov2_cubic(x, y, a);
    CHECK(std::abs(cond_ball_cov2(x, y, a) - cubic) <= 1e-12);
  }
}

TEST_CASE("property: exchangeability under row permutation") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Index n1 = 2 + static_cast<Index>(rng() % 10);
    const Index n0 = 2 + static_cast<Index>(rng() % 10);
    auto x = testing_support::draw_values(n1 + n0, rng, rep % 2 == 0);
    auto y = testing_support::draw_values(n1 + n0, rng, false);
    auto a = testing_support::draw_groups(n1, n0, rng);
    const double before = cond_ball_cov2(x, y, a);
    const double oracle_before = cond_ball_cov2_oracle(x, y, a);
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> px, py, pa;
    for (auto k : perm) {
      px.push_back(x[k]);
      py.push_back(y[k]);
      pa.push_back(a[k]);
    }
    CHECK(std::abs(cond_ball_cov2(px, py, pa) - before) <= 1e-12);
    CHECK(std::abs(cond_ball_cov2_oracle(px, py, pa) - oracle_before) <= 1e-12);
  }
}

TEST_CASE("group size preconditions") {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> a = {1, 0, 0, 0};
  CHECK_THROWS_AS(cond_ball_cov2(x, x, a), DataError);
  CHECK_THROWS_AS(cond_ball_cov2_cubic(x, x, a), DataError);
  std::vector<double> big(30);
  std::iota(big.begin(), big.end(), 0.0);
  std::vector<double> groups(30, 0.0);
  for (int i = 0; i < 15; ++i) groups[i] = 1.0;
  CHECK_THROWS_AS(cond_ball_cov2_oracle(big, big, groups), std::invalid_argument);
}

TEST_CASE("screening size floor(n / ln n)") {
  CHECK(screening_size(300) == 52);
  CHECK(screening_size(102) == 22);
  CHECK(screening_size(183) == 35);
  CHECK(screening_size(3) == 2);
  CHECK_THROWS_AS(screening_size(2), std::invalid_argument);
}

TEST_CASE("q = p selects every feature") {
  Rng rng(4);
  const Dataset d = testing_support::random_dataset(40, 7, rng);
  const ScreeningResult r = sis_screen(d, 7);
  std::vector<Index> sorted = r.selected;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{0, 1, 2, 3, 4, 5, 6});
  CHECK(r.w_hat == doctest::Approx(static_cast<double>(d.n_treated()) / 40.0));
}

TEST_CASE("duplicated feature ties break toward the lower index") {
  Rng rng(5);
  Dataset d = testing_support::random_dataset(60, 10, rng);
  d.X.col(8) = d.X.col(7);
  d.X.col(7) = d.X.col(2) * 3.0;  // strong signal, ranks near the top
  d.X.col(8) = d.X.col(7);
  const ScreeningResult r = sis_screen(d, 10);
  CHECK(r.scores[7] == r.scores[8]);
  const auto pos7 = std::find(r.order.begin(), r.order.end(), 7) - r.order.begin();
  const auto pos8 = std::find(r.order.begin(), r.order.end(), 8) - r.order.begin();
  CHECK(pos8 == pos7 + 1);
}

TEST_CASE("property: scores non-negative, selection monotone in q, serial equals parallel") {
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = testing_support::random_dataset(50 + rep * 5, 20, rng);
    const ScreeningResult serial = sis_screen(d, 5, Execution::serial);
    const ScreeningResult parallel = sis_screen(d, 5, Execution::parallel);
    CHECK(serial.scores == parallel.scores);
    CHECK(serial.order == parallel.order);
    for (double s : serial.scores) CHECK(s >= 0.0);
    for (Index q = 1; q < 20; ++q) {
      const auto small = sis_screen(d, q).selected;
      const auto large = sis_screen(d, q + 1).selected;
      CHECK(std::equal(small.begin(), small.end(), large.begin()));
    }
  }
}

TEST_CASE("monte carlo: SIS keeps X1-X4 at (300, 1000)") {
  ScenarioConfig config;
  config.n = 300;
  config.p = 1000;
  int hits = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Dataset d = simulate_dataset(config, derive_seed(2023, rep));
    const auto sel = sis_screen(d, 52).selected;
    bool all = true;
    for (Index j = 0; j < 4; ++j) all = all && std::find(sel.begin(), sel.end(), j) != sel.end();
    hits += all ? 1 : 0;
  }
  MESSAGE("replicates with X1-X4 retained: " << hits << "/100");
  CHECK(hits >= 95);
}

}  // TEST_SUITE
