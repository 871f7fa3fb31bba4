#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "doptrack/error.hpp"
#include "doptrack/rls.hpp"
#include "test_support.hpp"

using doptrack::testing::solve_direct;

using namespace doptrack;
using doptrack::testing::close_rel;

TEST_CASE("init") {
  const auto s = rls_init<double>(3, 1e-4);
  CHECK(s.inv_gram.isApprox(1e4 * Eigen::Matrix3d::Identity()));
  CHECK(s.estimate.isZero(0.0));
  CHECK(s.lse == 0.0);
  CHECK(s.count == 0);
  CHECK_THROWS_AS(rls_init<double>(0, 1e-4), ConfigError);
  CHECK_THROWS_AS(rls_init<double>(2, 0.0), ConfigError);
}

TEST_CASE("exact linear data is fit with zero error") {
  auto s = rls_init<double>(1, 1e-12);
  for (double x : {1.0, 2.0, 3.0}) rls_update(s, Eigen::VectorXd::Constant(1, x), 2.0 * x);
  CHECK(s.estimate[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.lse <= 1e-8);
  CHECK(s.count == 3);
}

TEST_CASE("zero row leaves the state unchanged") {
  auto s = rls_init<double>(2, 1e-3);
  rls_update(s, Eigen::Vector2d(1.0, -2.0), 0.5);
  const auto before = s;
  rls_update(s, Eigen::Vector2d::Zero(), 42.0);
  CHECK(s.estimate == before.estimate);
  CHECK(s.lse == before.lse);
}

TEST_CASE("solve_direct small cases") {
  Eigen::MatrixXd rows(2, 1);
  rows << 1.0, 1.0;
  const auto [x, lse] = solve_direct(rows, Eigen::Vector2d(1.0, 3.0), 1e-12);
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(lse == doctest::Approx(2.0));

  Eigen::MatrixXd single(1, 3);
  single << 1.0, 0.0, 0.0;
  const auto [y, e] = solve_direct(single, Eigen::VectorXd::Constant(1, 5.0), 1e-12);
  CHECK(y[0] == doctest::Approx(5.0));
  CHECK(y.tail(2).norm() < 1e-9);
  CHECK(e < 1e-9);
}

TEST_CASE("recursion matches the direct solve on random instances") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim_dist(1, 5), row_dist(1, 200);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double ridge = 1e-8;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = dim_dist(rng);
    const int count = std::max(dim_dist(rng), row_dist(rng));
    Eigen::MatrixXd rows(count, dim);
    Eigen::VectorXd truth(dim), targets(count);
    for (int j = 0; j < dim; ++j) truth[j] = gauss(rng);
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < dim; ++j) rows(i, j) = gauss(rng);
      targets[i] = rows.row(i).dot(truth) + 0.3 * gauss(rng);
    }
    auto s = rls_init<double>(dim, ridge);
    double last_lse = 0.0;
    for (int i = 0; i < count; ++i) {
      rls_update(s, rows.row(i).transpose(), targets[i]);
      CHECK(s.lse >= last_lse);
      last_lse = s.lse;
    }
    const auto [x, lse] = solve_direct(rows, targets, ridge);
    CHECK((s.estimate - x).norm() <= 1e-8 * x.norm());
    CHECK(close_rel(s.lse, lse, 1e-8, 1e-12));
  }
}

TEST_CASE("Riccati matrix stays symmetric over long runs") {
  std::mt19937 rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto s = rls_init<double>(4, 1e-4);
  for (int i = 0; i < 10000; ++i) {
    Eigen::Vector4d g;
    for (int j = 0; j < 4; ++j) g[j] = gauss(rng);
    rls_update(s, g, gauss(rng));
  }
  CHECK((s.inv_gram - s.inv_gram.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.inv_gram);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("clone_for_reset is an independent exact copy") {
  auto src = rls_init<double>(3, 1e-4);
  CHECK(clone_for_reset(src) == rls_init<double>(3, 1e-4));
  rls_update(src, Eigen::Vector3d(1.0, 2.0, 3.0), 1.0);
  auto copy = clone_for_reset(src);
  CHECK(copy == src);
  const double lse = src.lse;
  rls_update(copy, Eigen::Vector3d(-1.0, 0.5, 2.0), 7.0);
  CHECK(src.lse == lse);
  CHECK(copy.lse != lse);
}

TEST_CASE("non-finite input is rejected") {
  auto s = rls_init<double>(2, 1e-4);
  CHECK_THROWS_AS(rls_update(s, Eigen::Vector2d(NAN, 1.0), 1.0), NumericalError);
  CHECK_THROWS_AS(rls_update(s, Eigen::Vector2d(1.0, 1.0), INFINITY), NumericalError);
}

TEST_CASE("the scalar type is a template parameter") {
  auto s = rls_init<long double>(1, 1e-12L);
  for (long double x : {1.0L, 2.0L, 3.0L})
    rls_update(s, Eigen::Matrix<long double, 1, 1>(x), 2.0L * x);
  CHECK(static_cast<double>(s.estimate[0]) == doctest::Approx(2.0));
}
