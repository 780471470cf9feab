#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"

namespace dbtsw {
namespace {

using testing::normal_measure;

EstimatorConfig config(Variant v, std::size_t L, std::size_t k, const SeedSpec& seed) {
  EstimatorConfig cfg;
  cfg.variant = v;
  cfg.L = L;
  cfg.k = k;
  cfg.seed = seed;
  return cfg;
}

double relative(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

TEST(Dbtsw, ZeroOnIdenticalMeasures) {
  const auto mu = normal_measure(20, 5, 0.0, {1, 0});
  EXPECT_LE(dbtsw(mu, mu, config(Variant::DbTSW, 50, 4, {1, 1})).value, 1e-12);
  EXPECT_LE(dbtsw(mu, mu, config(Variant::DbTSWOrth, 50, 4, {1, 1})).value, 1e-12);
  EXPECT_LE(tswsl_chain(mu, mu, config(Variant::TSWSLChain, 50, 4, {1, 1})).value, 1e-12);
  EXPECT_LE(sw(mu, mu, config(Variant::SW, 50, 1, {1, 1})).value, 1e-12);
}

TEST(Dbtsw, ReportShape) {
  const auto mu = normal_measure(20, 5, 0.0, {2, 0});
  const auto nu = normal_measure(15, 5, 1.0, {2, 1});
  const auto r = dbtsw(mu, nu, config(Variant::DbTSW, 17, 3, {2, 2}));
  ASSERT_EQ(r.per_system.size(), 17U);
  EXPECT_NEAR(r.value, std::accumulate(r.per_system.begin(), r.per_system.end(), 0.0) / 17.0, 1e-12);
  EXPECT_GE(r.wall_seconds, 0.0);
}

TEST(Dbtsw, SingleLineEqualsSlicedWasserstein) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(s % 16);
    const auto mu = normal_measure(1 + static_cast<Eigen::Index>(s * 5 % 64), d, 0.0, {s, 0});
    const auto nu = normal_measure(1 + static_cast<Eigen::Index>(s * 11 % 64), d, 0.7, {s, 1});
    for (double delta : {-5.0, 0.0, 10.0}) {
      auto tree = config(Variant::DbTSW, 32, 1, {s, 2});
      tree.splitting.delta = delta;
      const double sliced = sw(mu, nu, config(Variant::SW, 32, 1, {s, 2})).value;
      EXPECT_LE(relative(dbtsw(mu, nu, tree).value, sliced), 1e-10);
      EXPECT_LE(relative(tswsl_chain(mu, nu, config(Variant::TSWSLChain, 32, 1, {s, 2})).value, sliced), 1e-10);
    }
  }
}

TEST(Dbtsw, SymmetricUnderSharedSeed) {
  const auto mu = normal_measure(20, 4, 0.0, {3, 0});
  const auto nu = normal_measure(25, 4, 1.0, {3, 1});
  for (auto v : {Variant::DbTSW, Variant::DbTSWOrth, Variant::TSWSLChain}) {
    const auto cfg = config(v, 30, 3, {3, 2});
    EXPECT_EQ(estimate(mu, nu, cfg).value, estimate(nu, mu, cfg).value);
  }
}

TEST(Dbtsw, MetricAxiomsOnRandomTriples) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto a = normal_measure(10, 3, 0.0, {s, 0});
    const auto b = normal_measure(12, 3, 0.5, {s, 1});
    const auto c = normal_measure(9, 3, -0.5, {s, 2});
    const auto cfg = config(Variant::DbTSW, 20, 4, {s, 3});
    const double ab = dbtsw(a, b, cfg).value;
    EXPECT_EQ(ab, dbtsw(b, a, cfg).value);
    EXPECT_LE(dbtsw(a, a, cfg).value, 1e-12);
    EXPECT_LE(dbtsw(a, c, cfg).value, ab + dbtsw(b, c, cfg).value + 1e-9);
  }
}

TEST(Dbtsw, VarianceShrinksWithTrees) {
  const auto mu = normal_measure(30, 4, 0.0, {4, 0});
  const auto nu = normal_measure(30, 4, 1.0, {4, 1});
  auto variance_over_l = [&](std::size_t L) {
    const auto r = dbtsw(mu, nu, config(Variant::DbTSW, L, 4, {4, 2}));
    double var = 0.0;
    for (double v : r.per_system) var += (v - r.value) * (v - r.value);
    return var / static_cast<double>(L - 1) / static_cast<double>(L);
  };
  EXPECT_GE(variance_over_l(400) / variance_over_l(1600), 3.0);
}

TEST(Dbtsw, Deterministic) {
  const auto mu = normal_measure(20, 4, 0.0, {5, 0});
  const auto nu = normal_measure(20, 4, 1.0, {5, 1});
  const auto cfg = config(Variant::DbTSWOrth, 40, 3, {5, 2});
  EXPECT_EQ(dbtsw(mu, nu, cfg).per_system, dbtsw(mu, nu, cfg).per_system);
}

TEST(Sw, PointMasses) {
  const auto x = uniform_measure(Matrix{{1.0, 2.0, -1.0}});
  const auto y = uniform_measure(Matrix{{0.5, -1.0, 2.0}});
  const auto cfg = config(Variant::SW, 25, 1, {6, 0});
  const Vector diff = x.supports().row(0).transpose() - y.supports().row(0).transpose();
  double expected = 0.0;
  for (std::size_t l = 0; l < 25; ++l) {
    expected += std::abs(diff.dot(sample_directions(cfg.seed, l, 1, 3).row(0).transpose()));
  }
  EXPECT_NEAR(sw(x, y, cfg).value, expected / 25.0, 1e-12);
}

TEST(Sw, QuantileCouplingP2) {
  auto cfg = config(Variant::SW, 10, 1, {7, 0});
  cfg.p = 2.0;
  const auto mu = uniform_measure(Matrix{{0.0}, {2.0}});
  const auto nu = uniform_measure(Matrix{{1.0}, {3.0}});
  EXPECT_NEAR(sw(mu, nu, cfg).value, 1.0, 1e-12);
}

TEST(EstimatorValidation, RejectsBadConfigs) {
  const auto mu = normal_measure(5, 2, 0.0, {8, 0});
  auto cfg = config(Variant::DbTSW, 0, 4, {8, 1});
  EXPECT_THROW(estimate(mu, mu, cfg), ConfigError);
  cfg = config(Variant::DbTSW, 10, 0, {8, 1});
  EXPECT_THROW(estimate(mu, mu, cfg), ConfigError);
  cfg = config(Variant::DbTSWOrth, 10, 3, {8, 1});
  EXPECT_THROW(estimate(mu, mu, cfg), ConfigError);
  cfg = config(Variant::SW, 10, 1, {8, 1});
  cfg.p = 0.5;
  EXPECT_THROW(estimate(mu, mu, cfg), ConfigError);
  EXPECT_THROW(estimate(mu, normal_measure(5, 3, 0.0, {8, 2}), config(Variant::DbTSW, 4, 2, {})),
               DimensionError);
  EXPECT_THROW(parse_variant("maxsw"), ConfigError);
  for (auto v : {Variant::DbTSW, Variant::DbTSWOrth, Variant::TSWSLChain, Variant::SW}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
}

TEST(Invariance, IdentityAndTranslation) {
  const auto mu = normal_measure(10, 4, 0.0, {9, 0});
  const auto nu = normal_measure(10, 4, 1.0, {9, 1});
  TreeSamplerConfig sc;
  const auto t = sample_concurrent(sc, 4, 1, {9, 2}).front();
  EXPECT_EQ(invariance_deviation(mu, nu, t, EuclideanTransform::identity(4), {}), 0.0);
  const EuclideanTransform shift(Matrix::Identity(4, 4), Vector{{3.0, -1.0, 0.5, 2.0}});
  EXPECT_LE(invariance_deviation(mu, nu, t, shift, {}), 1e-10);
}

TEST(Invariance, AuditAcrossDimensions) {
  for (Eigen::Index d : {2, 8, 32}) {
    const auto mu = normal_measure(16, d, 0.0, {10, static_cast<std::uint64_t>(d)});
    const auto nu = normal_measure(16, d, 1.0, {11, static_cast<std::uint64_t>(d)});
    for (auto v : {Variant::DbTSW, Variant::TSWSLChain}) {
      auto cfg = config(v, 1, 3, {12, 0});
      EXPECT_LE(invariance_audit(mu, nu, cfg, 40, {13, 0}), 1e-8);
    }
  }
}

}  // namespace
}  // namespace dbtsw
