#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"

namespace dbtsw {
namespace {

using testing::normal_cloud;

TEST(MakeMeasure, DefaultsToUniformWeights) {
  const auto m = make_measure(Matrix{{0.0, 0.0}, {1.0, 2.0}});
  EXPECT_DOUBLE_EQ(m.weights()(0), 0.5);
  EXPECT_DOUBLE_EQ(m.weights()(1), 0.5);
}

TEST(MakeMeasure, NormalizesWeights) {
  const auto m = make_measure(Matrix{{0.0, 0.0}, {1.0, 2.0}}, Vector{{2.0, 2.0}});
  EXPECT_DOUBLE_EQ(m.weights()(0), 0.5);
  EXPECT_DOUBLE_EQ(m.weights()(1), 0.5);
}

TEST(MakeMeasure, RejectsBadInput) {
  EXPECT_THROW(make_measure(Matrix{{0.0}, {1.0}}, Vector{{1.0, -1.0}}), InvalidMeasure);
  EXPECT_THROW(make_measure(Matrix(0, 2)), InvalidMeasure);
  EXPECT_THROW(make_measure(Matrix{{0.0}, {1.0}}, Vector{{0.0, 0.0}}), InvalidMeasure);
  EXPECT_THROW(make_measure(Matrix{{std::nan("")}}), InvalidMeasure);
  EXPECT_THROW(make_measure(Matrix{{0.0}, {1.0}}, Vector{{1.0}}), DataError);
}

TEST(MakeMeasure, Idempotent) {
  const auto m = make_measure(normal_cloud(7, 3, 0.0, {1, 0}), Vector::LinSpaced(7, 1.0, 7.0));
  const auto again = make_measure(m.supports(), m.weights());
  EXPECT_EQ(again.supports(), m.supports());
  EXPECT_EQ(again.weights(), m.weights());
}

TEST(MeasureCsv, RoundTripsWithWeights) {
  testing::TempDir dir;
  const auto m = make_measure(normal_cloud(5, 3, 0.0, {2, 0}), Vector::LinSpaced(5, 1.0, 5.0));
  write_measure_csv(m, dir / "m.csv");
  const auto back = read_measure_csv(dir / "m.csv");
  EXPECT_EQ(back.supports(), m.supports());
  EXPECT_TRUE(back.weights().isApprox(m.weights(), 1e-15));
}

TEST(MeasureCsv, MissingFileIsDataError) {
  EXPECT_THROW(read_measure_csv("/nonexistent/measure.csv"), DataError);
}

TEST(MeasureCsv, RejectsRaggedRows) {
  testing::TempDir dir;
  std::ofstream(dir / "bad.csv") << "x1,x2\n1,2\n3\n";
  EXPECT_THROW(read_measure_csv(dir / "bad.csv"), DataError);
}

TEST(RandomTransform, OneDimensionalIsPlusMinusOne) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = random_euclidean_transform(1, {s, 0});
    EXPECT_DOUBLE_EQ(std::abs(g.rotation()(0, 0)), 1.0);
  }
}

TEST(RandomTransform, PreservesNormsAndInverts) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(s % 9);
    const auto g = random_euclidean_transform(d, {s, 1});
    Engine rng = SeedSpec{s, 2}.engine();
    Vector y(d);
    for (Eigen::Index c = 0; c < d; ++c) y(c) = standard_normal(rng);
    EXPECT_NEAR((g.rotation() * y).norm(), y.norm(), 1e-10);
    EXPECT_LE((g.inverse().apply_point(g.apply_point(y)) - y).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((g.compose(g.inverse()).apply_point(y) - y).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RandomTransform, RejectsNonOrthogonal) {
  EXPECT_THROW(EuclideanTransform(Matrix{{1.0, 0.1}, {0.0, 1.0}}, Vector::Zero(2)), ConfigError);
  EXPECT_THROW(EuclideanTransform(Matrix::Identity(2, 2), Vector::Zero(3)), DimensionError);
}

TEST(ApplyTransform, IdentityLeavesMeasureUnchanged) {
  const auto m = testing::normal_measure(6, 4, 0.0, {3, 0});
  const auto out = apply_transform(EuclideanTransform::identity(4), m);
  EXPECT_EQ(out.supports(), m.supports());
  EXPECT_EQ(out.weights(), m.weights());
}

TEST(ApplyTransform, Reflection) {
  const auto m = uniform_measure(Matrix{{1.0, 0.0}});
  const EuclideanTransform g(-Matrix::Identity(2, 2), Vector::Zero(2));
  const auto out = apply_transform(g, m);
  EXPECT_DOUBLE_EQ(out.supports()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(out.supports()(0, 1), 0.0);
}

TEST(ApplyTransform, PreservesPairwiseDistances) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = testing::normal_measure(9, 5, 0.0, {s, 4});
    const auto g = random_euclidean_transform(5, {s, 5});
    const auto out = apply_transform(g, m);
    EXPECT_LE((pairwise_distances(out.supports()) - pairwise_distances(m.supports()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
    EXPECT_EQ(out.weights(), m.weights());
  }
  const EuclideanTransform shift(Matrix::Identity(3, 3), Vector{{1.0, -2.0, 3.0}});
  const auto m = testing::normal_measure(5, 3, 0.0, {9, 9});
  EXPECT_LE((pairwise_distances(apply_transform(shift, m).supports()) -
             pairwise_distances(m.supports()))
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

TEST(Seeds, ReproducibleAndDistinct) {
  const SeedSpec s{42, 7};
  EXPECT_EQ(normal_cloud(4, 3, 0.0, s), normal_cloud(4, 3, 0.0, s));
  EXPECT_NE(normal_cloud(4, 3, 0.0, s), normal_cloud(4, 3, 0.0, s.child(0)));
  EXPECT_NE(s.child(0), s.child(1));
  EXPECT_NE(SeedSpec({1, 0}).child(0), SeedSpec({0, 1}).child(0));
  Engine rng = s.engine();
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform(rng, -1.0, 2.0);
    EXPECT_GE(u, -1.0);
    EXPECT_LT(u, 2.0);
  }
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  const auto mu = testing::normal_measure(40, 6, 0.0, {5, 0});
  const auto nu = testing::normal_measure(30, 6, 1.0, {5, 1});
  EstimatorConfig cfg;
  cfg.L = 64;
  cfg.seed = {5, 2};
  set_num_threads(1);
  const auto one = dbtsw(mu, nu, cfg);
  set_num_threads(4);
  const auto four = dbtsw(mu, nu, cfg);
  set_num_threads(0);
  EXPECT_EQ(one.value, four.value);
  EXPECT_EQ(one.per_system, four.per_system);
}

}  // namespace
}  // namespace dbtsw
