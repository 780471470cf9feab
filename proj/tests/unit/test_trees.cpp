#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace dbtsw {
namespace {

TEST(SampleConcurrent, ShapesAndSharedRoot) {
  TreeSamplerConfig cfg;
  cfg.k = 2;
  const auto trees = sample_concurrent(cfg, 3, 5, {1, 0});
  ASSERT_EQ(trees.size(), 5U);
  for (const auto& t : trees) {
    EXPECT_EQ(t.kind, TreeKind::Concurrent);
    ASSERT_EQ(t.directions.rows(), 2);
    ASSERT_EQ(t.directions.cols(), 3);
    for (Eigen::Index l = 0; l < 2; ++l) EXPECT_NEAR(t.directions.row(l).norm(), 1.0, 1e-12);
    EXPECT_EQ(t.roots.row(0), t.roots.row(1));
    EXPECT_LE(t.roots.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_NO_THROW(validate_tree(t));
  }
}

TEST(SampleConcurrent, FixedOriginRoot) {
  TreeSamplerConfig cfg;
  cfg.root = FixedRoot{};
  for (const auto& t : sample_concurrent(cfg, 4, 3, {2, 0})) {
    EXPECT_EQ(t.roots, Matrix::Zero(4, 4));
  }
}

TEST(SampleConcurrent, CentredCube) {
  TreeSamplerConfig cfg;
  cfg.root = UniformCube{0.5, Vector::Constant(3, 10.0)};
  for (const auto& t : sample_concurrent(cfg, 3, 20, {2, 1})) {
    EXPECT_LE((t.roots.row(0).array() - 10.0).abs().maxCoeff(), 0.5);
  }
  cfg.root = UniformCube{0.5, Vector::Constant(2, 10.0)};
  EXPECT_THROW(sample_concurrent(cfg, 3, 1, {2, 1}), ConfigError);
}

TEST(SampleConcurrent, DirectionsAreIsotropic) {
  constexpr std::size_t draws = 100000;
  Vector sum = Vector::Zero(3);
  for (std::size_t i = 0; i < draws; ++i) sum += sample_directions({3, 0}, i, 1, 3).row(0).transpose();
  EXPECT_LE((sum / static_cast<double>(draws)).norm(), 0.02);
}

TEST(SampleConcurrent, Reproducible) {
  TreeSamplerConfig cfg;
  const auto a = sample_concurrent(cfg, 5, 4, {4, 4});
  const auto b = sample_concurrent(cfg, 5, 4, {4, 4});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].roots, b[i].roots);
    EXPECT_EQ(a[i].directions, b[i].directions);
  }
}

TEST(SamplerValidation, RejectsBadConfigs) {
  TreeSamplerConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(validate_sampler(cfg, 3), ConfigError);
  cfg.k = 4;
  cfg.orthogonalize = true;
  EXPECT_THROW(validate_sampler(cfg, 3), ConfigError);
  cfg.orthogonalize = false;
  cfg.root = GaussianRoot{{}, 0.0};
  EXPECT_THROW(validate_sampler(cfg, 3), ConfigError);
  cfg.root = UniformCube{-1.0, {}};
  EXPECT_THROW(validate_sampler(cfg, 3), ConfigError);
}

TEST(Orthogonalize, FixedPointOnOrthonormalInput) {
  const Matrix q = random_euclidean_transform(5, {5, 0}).rotation().topRows(3);
  EXPECT_LE((orthogonalize_directions(q) - q).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Orthogonalize, HandWorkedTwoByTwo) {
  const double r = std::sqrt(2.0) / 2.0;
  const Matrix out = orthogonalize_directions(Matrix{{1.0, 0.0}, {r, r}});
  EXPECT_NEAR(out(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(out(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(out(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(out(1, 1), 1.0, 1e-15);
}

TEST(Orthogonalize, SampledSystemsAreOrthonormal) {
  TreeSamplerConfig cfg;
  cfg.k = 6;
  cfg.orthogonalize = true;
  for (const auto& t : sample_concurrent(cfg, 8, 50, {6, 0})) {
    const Matrix gram = t.directions * t.directions.transpose();
    EXPECT_LE((gram - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Orthogonalize, Errors) {
  EXPECT_THROW(orthogonalize_directions(Matrix{{1.0, 0.0}, {2.0, 0.0}}), DegenerateDirections);
  EXPECT_THROW(orthogonalize_directions(Matrix::Identity(3, 2)), ConfigError);
}

TEST(SampleChain, SingleLine) {
  TreeSamplerConfig cfg;
  cfg.k = 1;
  cfg.structure = TreeKind::Chain;
  const auto t = sample_chain(cfg, 3, 1, {7, 0}).front();
  EXPECT_EQ(t.num_lines(), 1);
  EXPECT_TRUE(t.attachments.empty());
}

TEST(SampleChain, ConstructionIdentityAndStepRange) {
  TreeSamplerConfig cfg;
  cfg.k = 3;
  cfg.structure = TreeKind::Chain;
  for (const auto& t : sample_chain(cfg, 4, 200, {7, 1})) {
    ASSERT_EQ(t.attachments.size(), 2U);
    for (std::size_t i = 1; i < 3; ++i) {
      const double step = t.attachments[i - 1];
      EXPECT_GE(step, -1.0);
      EXPECT_LE(step, 1.0);
      const auto li = static_cast<Eigen::Index>(i);
      const RowVector expected = t.roots.row(li - 1) + step * t.directions.row(li - 1);
      EXPECT_LE((t.roots.row(li) - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_NO_THROW(validate_tree(t));
  }
}

TEST(ValidateTree, RejectsBrokenInvariants) {
  TreeSystem t = testing::concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_NO_THROW(validate_tree(t));
  t.directions(1, 1) = 2.0;
  EXPECT_THROW(validate_tree(t), StructureError);
  t = testing::concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  t.roots(1, 0) = 0.5;
  EXPECT_THROW(validate_tree(t), StructureError);
  t.kind = TreeKind::Chain;
  t.attachments = {0.0};
  EXPECT_THROW(validate_tree(t), StructureError);
}

TEST(TransformTree, IdentityAndInvariants) {
  TreeSamplerConfig cfg;
  cfg.k = 3;
  cfg.structure = TreeKind::Chain;
  for (const auto& t : sample_chain(cfg, 5, 20, {8, 0})) {
    const auto same = transform_tree(EuclideanTransform::identity(5), t);
    EXPECT_EQ(same.roots, t.roots);
    EXPECT_EQ(same.directions, t.directions);
    const auto moved = transform_tree(random_euclidean_transform(5, {8, 1}), t);
    for (Eigen::Index l = 0; l < 3; ++l) EXPECT_NEAR(moved.directions.row(l).norm(), 1.0, 1e-12);
    EXPECT_EQ(moved.attachments, t.attachments);
    EXPECT_NO_THROW(validate_tree(moved));
  }
}

}  // namespace
}  // namespace dbtsw
