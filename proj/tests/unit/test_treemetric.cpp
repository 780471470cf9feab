#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"

namespace dbtsw {
namespace {

using testing::atoms;
using testing::concurrent_at_origin;

TreeSystem two_line_chain(double attachment) {
  TreeSystem t;
  t.kind = TreeKind::Chain;
  t.directions = Matrix{{1.0, 0.0}, {0.0, 1.0}};
  t.roots = Matrix{{0.0, 0.0}, {attachment, 0.0}};
  t.attachments = {attachment};
  return t;
}

// Exact W1 over the flattened atoms with tree-path ground costs.
double lp_oracle(const ProjectedMeasure& p, const ProjectedMeasure& q, const TreeSystem& t) {
  std::vector<TreePoint> pa;
  std::vector<TreePoint> qa;
  std::vector<double> ma;
  std::vector<double> mb;
  for (std::size_t l = 0; l < p.num_lines(); ++l) {
    for (std::size_t i = 0; i < p.lines[l].size(); ++i) {
      pa.push_back({l, p.lines[l].coords[i]});
      ma.push_back(p.lines[l].masses[i]);
    }
    for (std::size_t i = 0; i < q.lines[l].size(); ++i) {
      qa.push_back({l, q.lines[l].coords[i]});
      mb.push_back(q.lines[l].masses[i]);
    }
  }
  Matrix cost(static_cast<Eigen::Index>(pa.size()), static_cast<Eigen::Index>(qa.size()));
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < qa.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          pairwise_tree_distance(pa[i], qa[j], t);
    }
  }
  Vector a = Eigen::Map<Vector>(ma.data(), static_cast<Eigen::Index>(ma.size()));
  Vector b = Eigen::Map<Vector>(mb.data(), static_cast<Eigen::Index>(mb.size()));
  return exact_w1_lp(a / a.sum(), b / b.sum(), cost);
}

TEST(Wasserstein1d, HandExamples) {
  EXPECT_DOUBLE_EQ(wasserstein_1d(atoms({0.0}, {1.0}), atoms({1.0}, {1.0})), 1.0);
  const auto a = atoms({0.3, -2.0, 5.0}, {0.2, 0.3, 0.5});
  EXPECT_DOUBLE_EQ(wasserstein_1d(a, a), 0.0);
  EXPECT_DOUBLE_EQ(wasserstein_1d(atoms({0.0, 2.0}, {0.5, 0.5}), atoms({1.0}, {1.0})), 1.0);
}

TEST(Wasserstein1d, PowerMatchesQuantileCoupling) {
  EXPECT_DOUBLE_EQ(wasserstein_1d_pow(atoms({0.0, 2.0}, {0.5, 0.5}), atoms({1.0, 3.0}, {0.5, 0.5}), 2.0), 1.0);
  const auto a = atoms({0.1, 0.7, -0.4}, {0.5, 0.25, 0.25});
  const auto b = atoms({1.0, 0.2}, {0.4, 0.6});
  EXPECT_NEAR(wasserstein_1d_pow(a, b, 1.0), wasserstein_1d(a, b), 1e-15);
}

TEST(Wasserstein1d, MassMismatch) {
  EXPECT_THROW(wasserstein_1d(atoms({0.0}, {1.0}), atoms({0.0}, {0.5})), MassError);
}

TEST(TreeConcurrent, HandExamples) {
  const auto t = concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  ProjectedMeasure p{{atoms({1.0}, {1.0}), atoms({}, {})}};
  ProjectedMeasure q{{atoms({}, {}), atoms({1.0}, {1.0})}};
  EXPECT_DOUBLE_EQ(tree_wasserstein_concurrent(p, q, t), 2.0);
  EXPECT_DOUBLE_EQ(tree_wasserstein_concurrent(p, p, t), 0.0);

  const auto single = concurrent_at_origin(Matrix{{1.0, 0.0}});
  ProjectedMeasure split{{atoms({1.0, -1.0}, {0.5, 0.5})}};
  ProjectedMeasure centre{{atoms({0.0}, {1.0})}};
  EXPECT_DOUBLE_EQ(tree_wasserstein_concurrent(split, centre, single), 1.0);
}

TEST(TreeConcurrent, RejectsChains) {
  const auto t = two_line_chain(0.5);
  ProjectedMeasure p{{atoms({1.0}, {1.0}), atoms({}, {})}};
  EXPECT_THROW(tree_wasserstein_concurrent(p, p, t), StructureError);
}

TEST(TreeConcurrent, SingleLineIsWasserstein1dForAnyRoot) {
  TreeSamplerConfig sc;
  sc.k = 1;
  sc.root = UniformCube{5.0, {}};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto mu = testing::normal_measure(9, 3, 0.0, {s, 0});
    const auto nu = testing::normal_measure(7, 3, 1.0, {s, 1});
    const auto t = sample_concurrent(sc, 3, 1, {s, 2}).front();
    const auto p = project(mu, t, {});
    const auto q = project(nu, t, {});
    EXPECT_NEAR(tree_wasserstein_concurrent(p, q, t), wasserstein_1d(p.lines[0], q.lines[0]), 1e-12);
  }
}

TEST(PairwiseTreeDistance, HandExamples) {
  const auto t = concurrent_at_origin(Matrix{{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_DOUBLE_EQ(pairwise_tree_distance({0, 1.0}, {0, 3.0}, t), 2.0);
  EXPECT_DOUBLE_EQ(pairwise_tree_distance({0, 1.0}, {1, 2.0}, t), 3.0);
  EXPECT_DOUBLE_EQ(pairwise_tree_distance({0, 0.0}, {1, 1.0}, two_line_chain(0.5)), 1.5);
  EXPECT_THROW(pairwise_tree_distance({0, 0.0}, {2, 1.0}, t), IndexError);
}

TEST(TreeGeneral, ChainJunctionIsOnePoint) {
  const auto t = two_line_chain(0.5);
  ProjectedMeasure p{{atoms({}, {}), atoms({0.0}, {1.0})}};
  ProjectedMeasure q{{atoms({0.5}, {1.0}), atoms({}, {})}};
  EXPECT_NEAR(tree_wasserstein_general(p, q, t), 0.0, 1e-15);
  EXPECT_NEAR(tree_wasserstein_general(p, p, t), 0.0, 1e-15);
}

TEST(TreeGeneral, MatchesFastPathOnConcurrent) {
  TreeSamplerConfig sc;
  for (std::uint64_t s = 0; s < 30; ++s) {
    sc.k = 1 + s % 8;
    const auto mu = testing::normal_measure(1 + static_cast<Eigen::Index>(s * 7 % 200), 5, 0.0, {s, 0});
    const auto nu = testing::normal_measure(1 + static_cast<Eigen::Index>(s * 13 % 200), 5, 0.5, {s, 1});
    const auto t = sample_concurrent(sc, 5, 1, {s, 2}).front();
    const auto p = project(mu, t, {});
    const auto q = project(nu, t, {});
    EXPECT_NEAR(tree_wasserstein_general(p, q, t), tree_wasserstein_concurrent(p, q, t), 1e-10);
  }
}

TEST(TreeGeneral, MatchesExactLpOnChains) {
  TreeSamplerConfig sc;
  sc.k = 3;
  sc.structure = TreeKind::Chain;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto mu = testing::normal_measure(6, 3, 0.0, {s, 0});
    const auto nu = testing::normal_measure(6, 3, 0.5, {s, 1});
    const auto t = sample_chain(sc, 3, 1, {s, 2}).front();
    const auto p = project(mu, t, {});
    const auto q = project(nu, t, {});
    EXPECT_NEAR(tree_wasserstein_general(p, q, t), lp_oracle(p, q, t), 1e-9);
  }
}

TEST(TreeGeneral, MetricAxiomsOnSharedTree) {
  TreeSamplerConfig sc;
  sc.k = 4;
  for (std::uint64_t s = 0; s < 30; ++s) {
    sc.structure = s % 2 == 0 ? TreeKind::Concurrent : TreeKind::Chain;
    const auto t = sample_trees(sc, 3, 1, {s, 0}).front();
    const auto a = project(testing::normal_measure(10, 3, 0.0, {s, 1}), t, {});
    const auto b = project(testing::normal_measure(12, 3, 0.5, {s, 2}), t, {});
    const auto c = project(testing::normal_measure(8, 3, -0.5, {s, 3}), t, {});
    const double ab = tree_wasserstein(a, b, t);
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(ab, tree_wasserstein(b, a, t));
    EXPECT_EQ(tree_wasserstein(a, a, t), 0.0);
    EXPECT_LE(tree_wasserstein(a, c, t), ab + tree_wasserstein(b, c, t) + 1e-9);
  }
}

TEST(TreeGeneral, PositivelyHomogeneous) {
  TreeSamplerConfig sc;
  sc.k = 3;
  const double c = 2.5;
  for (std::uint64_t s = 0; s < 20; ++s) {
    sc.structure = s % 2 == 0 ? TreeKind::Concurrent : TreeKind::Chain;
    auto t = sample_trees(sc, 3, 1, {s, 4}).front();
    auto p = project(testing::normal_measure(10, 3, 0.0, {s, 5}), t, {});
    auto q = project(testing::normal_measure(10, 3, 0.5, {s, 6}), t, {});
    const double base = tree_wasserstein(p, q, t);
    for (auto* m : {&p, &q}) {
      for (auto& line : m->lines) {
        for (auto& x : line.coords) x *= c;
      }
    }
    t.roots *= c;
    for (auto& a : t.attachments) a *= c;
    EXPECT_NEAR(tree_wasserstein(p, q, t), c * base, 1e-12 * std::max(1.0, base));
  }
}

TEST(SegmentProfile, CostMatchesFastPath) {
  TreeSamplerConfig sc;
  sc.k = 4;
  const auto t = sample_concurrent(sc, 3, 1, {11, 0}).front();
  const auto p = project(testing::normal_measure(15, 3, 0.0, {11, 1}), t, {});
  const auto q = project(testing::normal_measure(11, 3, 0.5, {11, 2}), t, {});
  EXPECT_NEAR(segment_profile(p, q, t).cost(), tree_wasserstein_concurrent(p, q, t), 1e-12);
}

}  // namespace
}  // namespace dbtsw
