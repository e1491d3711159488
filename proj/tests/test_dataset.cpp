#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#include "sisgoal/dataset.hpp"

using namespace sisgoal;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "sisgoal_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("data-model") {

TEST_CASE("load_csv parses a small file") {
  const auto path = write_temp("small.csv", "A,Y,X1,X2\n1,0.5,1,2\n1,1.5,2,3\n0,2.5,3,5\n0,3.5,4,4\n");
  const Dataset d = load_csv(path, {});
  CHECK(d.n() == 4);
  CHECK(d.p() == 2);
  CHECK(d.n_treated() == 2);
  CHECK(d.n_control() == 2);
  CHECK(d.feature_names == std::vector<std::string>{"X1", "X2"});
  CHECK(d.outcome_kind == OutcomeKind::continuous);
  CHECK(d.X(2, 1) == 5.0);
}

TEST_CASE("load_csv infers binary outcomes and honors an override") {
  const auto path = write_temp("binary.csv", "A,Y,X1\n1,1,0.3\n0,0,0.1\n1,0,0.2\n0,1,0.9\n");
  CHECK(load_csv(path, {}).outcome_kind == OutcomeKind::binary);
  ColumnRoles roles;
  roles.outcome_kind = OutcomeKind::continuous;
  CHECK(load_csv(path, roles).outcome_kind == OutcomeKind::continuous);
}

TEST_CASE("load_csv honors custom roles and feature lists") {
  const auto path = write_temp("roles.csv", "id,trt,out,a,b,c\n1,1,2,3,4,5\n2,0,3,4,5,7\n3,1,1,1,1,1\n4,0,0,2,2,9\n");
  ColumnRoles roles;
  roles.treatment = "trt";
  roles.outcome = "out";
  roles.features = {"c", "a"};
  const Dataset d = load_csv(path, roles);
  CHECK(d.feature_names == std::vector<std::string>{"c", "a"});
  CHECK(d.X(1, 0) == 7.0);
  CHECK(d.X(1, 1) == 4.0);
  CHECK(d.Y(0) == 2.0);
}

TEST_CASE("load_csv rejects a single treatment level") {
  const auto path = write_temp("single.csv", "A,Y,X1\n1,1,1\n1,2,2\n1,3,3\n1,4,4\n");
  CHECK(error_of([&] { load_csv(path, {}); }).find("treatment has a single level") != std::string::npos);
}

TEST_CASE("load_csv names the row and column of a missing value") {
  const auto path = write_temp("missing.csv", "A,Y,X1,X2\n1,1,1,2\n0,2,NA,3\n1,3,3,1\n0,4,4,2\n");
  const std::string msg = error_of([&] { load_csv(path, {}); });
  CHECK(msg.find("row 2") != std::string::npos);
  CHECK(msg.find("X1") != std::string::npos);
}

TEST_CASE("load_csv error cases") {
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {}), DataError);
  const auto text = write_temp("text.csv", "A,Y,X1\n1,1,abc\n0,2,1\n");
  CHECK(error_of([&] { load_csv(text, {}); }).find("non-numeric") != std::string::npos);
  const auto badtrt = write_temp("badtrt.csv", "A,Y,X1\n2,1,1\n0,2,1\n1,2,3\n");
  CHECK_THROWS_AS(load_csv(badtrt, {}), DataError);
  const auto ragged = write_temp("ragged.csv", "A,Y,X1\n1,1\n0,2,1\n");
  CHECK_THROWS_AS(load_csv(ragged, {}), DataError);
  ColumnRoles roles;
  roles.treatment = "T";
  const auto ok = write_temp("ok.csv", "A,Y,X1\n1,1,1\n0,2,2\n");
  CHECK_THROWS_AS(load_csv(ok, roles), DataError);
}

TEST_CASE("standardize produces mean 0 and sd 1") {
  Dataset d;
  d.X.resize(3, 1);
  d.X << 1, 2, 3;
  d.A = VectorXd::Zero(3);
  d.Y = VectorXd::Zero(3);
  d.feature_names = {"X1"};
  const Dataset z = standardize(d);
  CHECK(z.X(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(z.X(1, 0) == doctest::Approx(0.0));
  CHECK(z.X(2, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("standardize is idempotent and leaves A and Y alone") {
  testing_support::Rng rng(5);
  const Dataset d = testing_support::random_dataset(40, 6, rng);
  const Dataset z1 = standardize(d);
  const Dataset z2 = standardize(z1);
  CHECK((z1.X - z2.X).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(z1.A == d.A);
  CHECK(z1.Y == d.Y);
  for (Index j = 0; j < z1.p(); ++j) {
    CHECK(std::abs(z1.X.col(j).mean()) < 1e-12);
    const double var = (z1.X.col(j).array() - z1.X.col(j).mean()).square().sum() / 39.0;
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("standardize names a constant column") {
  Dataset d;
  d.X.resize(3, 3);
  d.X << 1, 2, 5, 2, 3, 5, 3, 1, 5;
  d.A = VectorXd::Zero(3);
  d.Y = VectorXd::Zero(3);
  d.feature_names = {"X1", "X2", "X3"};
  CHECK(error_of([&] { standardize(d); }) == "constant column X3");
}

TEST_CASE("drop_constant_features records the reason") {
  Dataset d;
  d.X.resize(4, 3);
  d.X << 1, 7, 2, 2, 7, 3, 3, 7, 1, 4, 7, 0;
  d.A = (VectorXd(4) << 1, 0, 1, 0).finished();
  d.Y = VectorXd::Zero(4);
  d.feature_names = {"a", "b", "c"};
  const FeatureFilterResult r = drop_constant_features(d);
  CHECK(r.data.feature_names == std::vector<std::string>{"a", "c"});
  CHECK_FALSE(r.features[1].kept);
  CHECK(r.features[1].removal_reason == RemovalReason::constant);
  CHECK(r.features[0].removal_reason == RemovalReason::none);
}

TEST_CASE("correlation_filter removes exactly one of two duplicates") {
  testing_support::Rng rng(11);
  Dataset d = testing_support::random_dataset(50, 4, rng);
  d.X.col(3) = d.X.col(1);
  const FeatureFilterResult r = correlation_filter(standardize(d), 0.95);
  CHECK(r.data.p() == 3);
  CHECK_FALSE(r.features[3].kept);
  CHECK(r.features[3].removal_reason == RemovalReason::redundant_correlation);
  CHECK(r.features[1].kept);
}

TEST_CASE("correlation_filter is a no-op below the cutoff") {
  testing_support::Rng rng(12);
  const Dataset d = standardize(testing_support::random_dataset(200, 5, rng));
  const FeatureFilterResult r = correlation_filter(d, 0.95);
  CHECK(r.data.X == d.X);
  CHECK(r.data.feature_names == d.feature_names);
  for (const auto& m : r.features) CHECK(m.kept);
}

TEST_CASE("correlation_filter rejects cutoffs outside (0, 1]") {
  testing_support::Rng rng(1);
  const Dataset d = standardize(testing_support::random_dataset(20, 3, rng));
  CHECK_THROWS_AS(correlation_filter(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(correlation_filter(d, 1.5), std::invalid_argument);
}

TEST_CASE("property: correlation_filter leaves no pair above the cutoff and is deterministic") {
  testing_support::Rng rng(2024);
  for (int rep = 0; rep < 30; ++rep) {
    const Index n = 30 + static_cast<Index>(rng() % 40);
    const Index p = 3 + static_cast<Index>(rng() % 10);
    Dataset d = testing_support::random_dataset(n, p, rng);
    // Inject near-duplicates built from a shared factor.
    const VectorXd shared = testing_support::normal_vector(n, rng);
    for (Index j = 0; j < p; j += 2) {
      d.X.col(j) = shared + 0.1 * testing_support::normal_vector(n, rng);
    }
    const double cutoff = 0.8 + 0.15 * std::uniform_real_distribution<double>()(rng);
    const Dataset z = standardize(d);
    const FeatureFilterResult r = correlation_filter(z, cutoff);
    for (Index a = 0; a < r.data.p(); ++a)
      for (Index b = a + 1; b < r.data.p(); ++b)
        CHECK(std::abs(testing_support::correlation(r.data.X.col(a), r.data.X.col(b))) <= cutoff);
    const FeatureFilterResult again = correlation_filter(z, cutoff);
    CHECK(again.data.feature_names == r.data.feature_names);
    for (const auto& m : r.features) CHECK((!m.kept || m.removal_reason == RemovalReason::none));
  }
}

TEST_CASE("property: write_csv then load_csv round-trips exactly") {
  testing_support::Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    Dataset d = testing_support::random_dataset(25, 4, rng);
    d.X(3, 2) = 1e-300;
    d.X(4, 1) = -123456789.123456789;
    const fs::path path = fs::temp_directory_path() / "sisgoal_tests" / "roundtrip.csv";
    fs::create_directories(path.parent_path());
    write_csv(d, path);
    const Dataset back = load_csv(path, {});
    CHECK(back.X == d.X);
    CHECK(back.A == d.A);
    CHECK(back.Y == d.Y);
    CHECK(back.feature_names == d.feature_names);
  }
}

TEST_CASE("select_rows and select_features") {
  testing_support::Rng rng(3);
  const Dataset d = testing_support::random_dataset(10, 4, rng);
  const std::vector<Index> rows = {0, 0, 9};
  const Dataset r = d.select_rows(rows);
  CHECK(r.n() == 3);
  CHECK(r.X.row(1) == d.X.row(0));
  CHECK(r.Y(2) == d.Y(9));
  const std::vector<Index> cols = {3, 1};
  const Dataset c = d.select_features(cols);
  CHECK(c.feature_names == std::vector<std::string>{"V4", "V2"});
  CHECK(c.X.col(0) == d.X.col(3));
}

}  // TEST_SUITE
