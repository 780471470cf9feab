#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace dbtsw {
namespace {

using testing::concurrent_at_origin;

TEST(PointLineDistances, HandExamples) {
  EXPECT_DOUBLE_EQ(point_line_distances(Vector{{1.0, 1.0}}, concurrent_at_origin(Matrix{{1.0, 0.0}}))(0), 1.0);
  EXPECT_DOUBLE_EQ(point_line_distances(Vector{{3.0, 4.0}}, concurrent_at_origin(Matrix{{0.0, 1.0}}))(0), 3.0);
  EXPECT_DOUBLE_EQ(point_line_distances(Vector{{-2.5, 0.0}}, concurrent_at_origin(Matrix{{1.0, 0.0}}))(0), 0.0);
}

TEST(SplittingWeights, HandExamples) {
  const auto t3 = concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)}});
  const Vector y{{0.3, -1.7}};
  const Vector uniform = splitting_weights(y, t3, {0.0, SplitMode::DistanceSoftmax});
  for (Eigen::Index l = 0; l < 3; ++l) EXPECT_NEAR(uniform(l), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(splitting_weights(y, t3, {10.0, SplitMode::UniformSplit}), uniform);

  EXPECT_DOUBLE_EQ(splitting_weights(y, concurrent_at_origin(Matrix{{1.0, 0.0}}), {})(0), 1.0);

  // distances 0 and ln 2 from a point on the first line
  const auto t2 = concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  const Vector on_first{{std::log(2.0), 0.0}};
  const Vector w = splitting_weights(on_first, t2, {1.0, SplitMode::DistanceSoftmax});
  EXPECT_NEAR(w(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w(1), 2.0 / 3.0, 1e-15);
}

TEST(SplittingWeights, InvariantUnderEuclideanMaps) {
  TreeSamplerConfig sc;
  sc.k = 5;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 7);
    const auto t = sample_concurrent(sc, d, 1, {s, 0}).front();
    const auto g = random_euclidean_transform(d, {s, 1});
    const Vector y = testing::normal_cloud(1, d, 0.0, {s, 2}).row(0).transpose();
    const SplittingConfig cfg{10.0, SplitMode::DistanceSoftmax};
    const Vector a = splitting_weights(y, t, cfg);
    const Vector b = splitting_weights(g.apply_point(y), transform_tree(g, t), cfg);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SplittingWeights, Homogeneity) {
  TreeSamplerConfig sc;
  sc.k = 4;
  const double c = 3.7;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto t = sample_concurrent(sc, 3, 1, {s, 3}).front();
    const auto m = testing::normal_measure(5, 3, 0.0, {s, 4});
    const SplittingConfig cfg{10.0, SplitMode::DistanceSoftmax};
    const auto base = projection_terms(m.supports(), t, cfg);
    t.roots *= c;
    const auto scaled =
        projection_terms(m.supports() * c, t, {cfg.delta / c, SplitMode::DistanceSoftmax});
    EXPECT_LE((scaled.split - base.split).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((scaled.coords - c * base.coords).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Project, SingleLine) {
  const auto p = project(uniform_measure(Matrix{{2.0, 0.0}}), concurrent_at_origin(Matrix{{1.0, 0.0}}), {});
  ASSERT_EQ(p.num_lines(), 1U);
  ASSERT_EQ(p.lines[0].size(), 1U);
  EXPECT_DOUBLE_EQ(p.lines[0].coords[0], 2.0);
  EXPECT_DOUBLE_EQ(p.lines[0].masses[0], 1.0);
}

TEST(Project, UniformSplitHalvesMass) {
  const auto m = make_measure(Matrix{{1.0, 2.0}, {-1.0, 0.5}}, Vector{{0.25, 0.75}});
  const auto p = project(m, concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}}), {0.0, SplitMode::DistanceSoftmax});
  for (const auto& line : p.lines) {
    EXPECT_DOUBLE_EQ(line.masses[0], 0.125);
    EXPECT_DOUBLE_EQ(line.masses[1], 0.375);
  }
  EXPECT_EQ(p.lines[0].coords, (std::vector<double>{1.0, -1.0}));
  EXPECT_EQ(p.lines[1].coords, (std::vector<double>{2.0, 0.5}));
}

TEST(Project, MassIsConserved) {
  TreeSamplerConfig sc;
  sc.k = 6;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = make_measure(testing::normal_cloud(30, 4, 0.0, {s, 0}),
                                Vector::LinSpaced(30, 0.1, 3.0));
    const auto t = sample_concurrent(sc, 4, 1, {s, 1}).front();
    EXPECT_NEAR(project(m, t, {}).total_mass(), 1.0, 1e-10);
  }
}

TEST(Project, EquivariantUnderEuclideanMaps) {
  TreeSamplerConfig sc;
  sc.k = 3;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 5);
    sc.structure = s % 2 == 0 ? TreeKind::Concurrent : TreeKind::Chain;
    const auto t = sample_trees(sc, d, 1, {s, 0}).front();
    const auto m = testing::normal_measure(8, d, 0.0, {s, 1});
    const auto g = random_euclidean_transform(d, {s, 2});
    const auto a = project(m, t, {});
    const auto b = project(apply_transform(g, m), transform_tree(g, t), {});
    for (std::size_t l = 0; l < a.num_lines(); ++l) {
      for (std::size_t i = 0; i < a.lines[l].size(); ++i) {
        EXPECT_NEAR(a.lines[l].coords[i], b.lines[l].coords[i], 1e-9);
        EXPECT_NEAR(a.lines[l].masses[i], b.lines[l].masses[i], 1e-12);
      }
    }
  }
}

TEST(Project, DimensionMismatch) {
  EXPECT_THROW(project(uniform_measure(Matrix{{1.0, 2.0, 3.0}}), concurrent_at_origin(Matrix{{1.0, 0.0}}), {}),
               DimensionError);
}

}  // namespace
}  // namespace dbtsw
