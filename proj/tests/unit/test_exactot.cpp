#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_util.hpp"

namespace dbtsw {
namespace {

using testing::normal_cloud;

double brute_force_assignment(const Matrix& cost) {
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) total += cost(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(Assignment, HandExamples) {
  const Matrix X = normal_cloud(5, 2, 0.0, {1, 0});
  EXPECT_EQ(exact_wp_assignment(X, X, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(exact_wp_assignment(Matrix{{0.0, 0.0}}, Matrix{{3.0, 4.0}}, 2.0), 5.0);
  EXPECT_EQ(exact_wp_assignment(Matrix{{0.0, 0.0}, {1.0, 0.0}}, Matrix{{1.0, 0.0}, {0.0, 0.0}}, 2.0), 0.0);
}

TEST(Assignment, MatchesBruteForce) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(s % 7);
    Engine rng = SeedSpec{s, 0}.engine();
    Matrix cost(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = uniform(rng, 0.0, 10.0);
    }
    const auto sigma = solve_assignment(cost);
    double total = 0.0;
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      total += cost(i, sigma[static_cast<std::size_t>(i)]);
      ++seen[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    EXPECT_NEAR(total, brute_force_assignment(cost), 1e-12);
  }
}

TEST(Assignment, InvariantUnderRigidMotions) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix X = normal_cloud(20, 5, 0.0, {s, 1});
    const Matrix Y = normal_cloud(20, 5, 1.0, {s, 2});
    const auto g = random_euclidean_transform(5, {s, 3});
    EXPECT_NEAR(exact_wp_assignment(g.apply_rows(X), g.apply_rows(Y), 2.0), exact_wp_assignment(X, Y, 2.0), 1e-9);
  }
}

TEST(Assignment, SizeMismatch) {
  EXPECT_THROW(exact_wp_assignment(Matrix::Zero(3, 2), Matrix::Zero(2, 2), 2.0), SizeError);
  EXPECT_THROW(exact_wp_assignment(Matrix::Zero(2, 3), Matrix::Zero(2, 2), 2.0), DimensionError);
}

TEST(LinearProgram, HandExamples) {
  const Vector a{{0.25, 0.75}};
  const Vector b{{0.5, 0.2, 0.3}};
  EXPECT_EQ(exact_w1_lp(a, b, Matrix::Zero(2, 3)), 0.0);
  EXPECT_DOUBLE_EQ(exact_w1_lp(Vector::Ones(1), Vector::Ones(1), Matrix{{3.5}}), 3.5);
  EXPECT_NEAR(exact_w1_lp(Vector{{1.0}}, b, Matrix{{1.0, 2.0, 3.0}}), 0.5 + 0.4 + 0.9, 1e-12);
}

TEST(LinearProgram, MatchesAssignmentOnUniformMeasures) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix X = normal_cloud(8, 3, 0.0, {s, 4});
    const Matrix Y = normal_cloud(8, 3, 0.5, {s, 5});
    const Vector u = Vector::Constant(8, 1.0 / 8.0);
    EXPECT_NEAR(exact_w1_lp(u, u, euclidean_cost(X, Y)), exact_wp_assignment(X, Y, 1.0), 1e-12);
  }
}

TEST(LinearProgram, Errors) {
  EXPECT_THROW(exact_w1_lp(Vector{{0.5}}, Vector{{1.0}}, Matrix{{1.0}}), MassError);
  EXPECT_THROW(exact_w1_lp(Vector::Ones(1), Vector::Ones(1), Matrix{{-1.0}}), DataError);
  EXPECT_THROW(exact_w1_lp(Vector::Ones(1), Vector::Ones(1), Matrix{{std::nan("")}}), DataError);
  const Vector big = Vector::Constant(101, 1.0 / 101.0);
  EXPECT_THROW(exact_w1_lp(big, big, Matrix::Zero(101, 101)), ScaleError);
}

TEST(EuclideanCost, Entries) {
  const Matrix c = euclidean_cost(Matrix{{0.0, 0.0}, {1.0, 1.0}}, Matrix{{3.0, 4.0}});
  EXPECT_DOUBLE_EQ(c(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(c(1, 0), std::sqrt(13.0));
}

}  // namespace
}  // namespace dbtsw
