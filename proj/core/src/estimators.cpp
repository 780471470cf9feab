#include "dbtsw/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "dbtsw/error.hpp"
#include "dbtsw/parallel.hpp"
#include "dbtsw/treemetric.hpp"

namespace dbtsw {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::DbTSW:
      return "dbtsw";
    case Variant::DbTSWOrth:
      return "dbtsw-orth";
    case Variant::TSWSLChain:
      return "tswsl";
    case Variant::SW:
      return "sw";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "dbtsw") return Variant::DbTSW;
  if (name == "dbtsw-orth" || name == "dbtsw-perp") return Variant::DbTSWOrth;
  if (name == "tswsl" || name == "tsw-sl") return Variant::TSWSLChain;
  if (name == "sw") return Variant::SW;
  throw ConfigError("unknown variant '" + name + "' (expected dbtsw, dbtsw-orth, tswsl, sw)");
}

TreeSamplerConfig effective_sampler(const EstimatorConfig& cfg) {
  TreeSamplerConfig s = cfg.sampler;
  s.k = cfg.variant == Variant::SW ? 1 : cfg.k;
  s.orthogonalize = cfg.variant == Variant::DbTSWOrth;
  s.structure = cfg.variant == Variant::TSWSLChain ? TreeKind::Chain : TreeKind::Concurrent;
  return s;
}

void validate_estimator(const EstimatorConfig& cfg, Eigen::Index d) {
  if (cfg.L < 1) throw ConfigError("L (number of trees) must be >= 1");
  if (cfg.k < 1) throw ConfigError("k (lines per tree) must be >= 1");
  if (cfg.variant == Variant::SW && !(cfg.p >= 1.0)) throw ConfigError("SW order p must be >= 1");
  if (!std::isfinite(cfg.splitting.delta)) throw ConfigError("splitting delta must be finite");
  validate_sampler(effective_sampler(cfg), d);
}

std::vector<TreeSystem> sample_estimator_trees(const EstimatorConfig& cfg, Eigen::Index d) {
  validate_estimator(cfg, d);
  return sample_trees(effective_sampler(cfg), d, cfg.L, cfg.seed);
}

namespace {

void check_dims(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw DimensionError("measures have different dimensions (" + std::to_string(mu.dim()) +
                         " vs " + std::to_string(nu.dim()) + ")");
  }
}

double mean_in_order(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

DistanceReport tree_sliced(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           const EstimatorConfig& cfg) {
  const auto start = Clock::now();
  check_dims(mu, nu);
  const auto trees = sample_estimator_trees(cfg, mu.dim());
  DistanceReport r;
  r.config = cfg;
  r.per_system = tree_sliced_terms(mu, nu, trees, cfg.splitting);
  r.value = mean_in_order(r.per_system);
  r.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace

double tree_sliced_term(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const TreeSystem& t, const SplittingConfig& split) {
  const ProjectedMeasure p = project(mu, t, split);
  const ProjectedMeasure q = project(nu, t, split);
  return tree_wasserstein(p, q, t);
}

std::vector<double> tree_sliced_terms(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                      const std::vector<TreeSystem>& trees,
                                      const SplittingConfig& split) {
  check_dims(mu, nu);
  std::vector<double> out(trees.size());
  parallel_for(trees.size(),
               [&](std::size_t i) { out[i] = tree_sliced_term(mu, nu, trees[i], split); });
  return out;
}

DistanceReport dbtsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     const EstimatorConfig& cfg) {
  if (cfg.variant != Variant::DbTSW && cfg.variant != Variant::DbTSWOrth) {
    throw ConfigError("dbtsw() needs variant dbtsw or dbtsw-orth");
  }
  return tree_sliced(mu, nu, cfg);
}

DistanceReport tswsl_chain(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           const EstimatorConfig& cfg) {
  if (cfg.variant != Variant::TSWSLChain) throw ConfigError("tswsl_chain() needs variant tswsl");
  return tree_sliced(mu, nu, cfg);
}

DistanceReport sw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                  const EstimatorConfig& cfg) {
  if (cfg.variant != Variant::SW) throw ConfigError("sw() needs variant sw");
  const auto start = Clock::now();
  check_dims(mu, nu);
  validate_estimator(cfg, mu.dim());
  const Eigen::Index d = mu.dim();

  DistanceReport r;
  r.config = cfg;
  r.per_system.resize(cfg.L);
  parallel_for(cfg.L, [&](std::size_t i) {
    const Vector theta = sample_directions(cfg.seed, i, 1, d).row(0).transpose();
    LineAtoms a;
    LineAtoms b;
    const Vector pa = mu.supports() * theta;
    const Vector pb = nu.supports() * theta;
    a.coords.assign(pa.data(), pa.data() + pa.size());
    a.masses.assign(mu.weights().data(), mu.weights().data() + mu.size());
    b.coords.assign(pb.data(), pb.data() + pb.size());
    b.masses.assign(nu.weights().data(), nu.weights().data() + nu.size());
    r.per_system[i] = wasserstein_1d_pow(a, b, cfg.p);
  });
  // Root of the mean of p-th powers; per_system holds W_p^p.
  const double mean_pow = mean_in_order(r.per_system);
  r.value = cfg.p == 1.0 ? mean_pow : std::pow(mean_pow, 1.0 / cfg.p);
  r.wall_seconds = seconds_since(start);
  return r;
}

DistanceReport estimate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const EstimatorConfig& cfg) {
  switch (cfg.variant) {
    case Variant::DbTSW:
    case Variant::DbTSWOrth:
      return dbtsw(mu, nu, cfg);
    case Variant::TSWSLChain:
      return tswsl_chain(mu, nu, cfg);
    case Variant::SW:
      return sw(mu, nu, cfg);
  }
  throw ConfigError("unknown variant");
}

double invariance_deviation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            const TreeSystem& t, const EuclideanTransform& g,
                            const SplittingConfig& split) {
  const double before = tree_sliced_term(mu, nu, t, split);
  const double after =
      tree_sliced_term(apply_transform(g, mu), apply_transform(g, nu), transform_tree(g, t), split);
  const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
  return std::abs(before - after) / scale;
}

double invariance_audit(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const EstimatorConfig& cfg, std::size_t trials, const SeedSpec& seed) {
  if (trials < 1) throw ConfigError("invariance audit needs at least one trial");
  check_dims(mu, nu);
  EstimatorConfig tree_cfg = cfg;
  tree_cfg.L = trials;
  if (tree_cfg.variant == Variant::SW) {
    tree_cfg.variant = Variant::DbTSW;
    tree_cfg.k = 1;
  }
  const auto trees = sample_estimator_trees(tree_cfg, mu.dim());
  std::vector<double> dev(trials);
  parallel_for(trials, [&](std::size_t i) {
    const auto g = random_euclidean_transform(mu.dim(), seed.child(i));
    dev[i] = invariance_deviation(mu, nu, trees[i], g, cfg.splitting);
  });
  return *std::max_element(dev.begin(), dev.end());
}

}  // namespace dbtsw
