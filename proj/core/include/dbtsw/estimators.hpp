#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dbtsw/measure.hpp"
#include "dbtsw/projection.hpp"
#include "dbtsw/rng.hpp"
#include "dbtsw/trees.hpp"

namespace dbtsw {

enum class Variant { DbTSW, DbTSWOrth, TSWSLChain, SW };

std::string to_string(Variant v);
/// Accepts dbtsw, dbtsw-orth, tswsl, sw. Throws ConfigError otherwise.
Variant parse_variant(const std::string& name);

/// Monte-Carlo estimator settings. Defaults follow the diffusion setup
/// (L = 2500, k = 4, delta = 10).
///
/// `sampler` supplies the root distribution and chain step widths; its k,
/// structure and orthogonalize fields are overridden by `k` and `variant`.
/// SW forces k = 1, uses `p`, and ignores the splitting map.
struct EstimatorConfig {
  Variant variant = Variant::DbTSW;
  std::size_t L = 2500;
  std::size_t k = 4;
  double p = 1.0;
  SplittingConfig splitting{};
  TreeSamplerConfig sampler{};
  SeedSpec seed{};
};

/// Throws ConfigError for L == 0, k == 0, p < 1, or orthogonalization with
/// k > d.
void validate_estimator(const EstimatorConfig& cfg, Eigen::Index d);

/// The tree sampler actually used by `cfg`.
TreeSamplerConfig effective_sampler(const EstimatorConfig& cfg);

/// The L systems an estimator with `cfg` evaluates on d-dimensional data.
std::vector<TreeSystem> sample_estimator_trees(const EstimatorConfig& cfg, Eigen::Index d);

struct DistanceReport {
  double value = 0.0;
  std::vector<double> per_system;
  double wall_seconds = 0.0;
  EstimatorConfig config;
};

/// W1 between the projections of mu and nu on one tree.
double tree_sliced_term(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const TreeSystem& t, const SplittingConfig& split);

/// Per-system values on explicitly given trees (shared randomness).
std::vector<double> tree_sliced_terms(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                      const std::vector<TreeSystem>& trees,
                                      const SplittingConfig& split);

/// Db-TSW / Db-TSW-orth: mean of per-tree W1 over L sampled concurrent
/// systems. Deterministic given cfg.seed.
DistanceReport dbtsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     const EstimatorConfig& cfg);

/// TSW-SL with chain systems and the distance-based splitting map.
DistanceReport tswsl_chain(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           const EstimatorConfig& cfg);

/// Sliced Wasserstein: (mean_l W_p^p)^(1/p) over L uniform directions. The
/// directions are the ones tree samplers would draw for k = 1.
DistanceReport sw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                  const EstimatorConfig& cfg);

/// Dispatch on cfg.variant.
DistanceReport estimate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const EstimatorConfig& cfg);

/// |W(t) - W(g t)| / max(W(t), tiny) for one tree and one transform, where
/// W(t) is the tree-sliced term of (mu, nu) on t and W(g t) that of
/// (g#mu, g#nu) on g t.
double invariance_deviation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            const TreeSystem& t, const EuclideanTransform& g,
                            const SplittingConfig& split);

/// Max invariance_deviation over `trials` (tree, g) pairs. Trees follow cfg,
/// transforms are random_euclidean_transform draws from `seed`.
double invariance_audit(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                        const EstimatorConfig& cfg, std::size_t trials, const SeedSpec& seed);

}  // namespace dbtsw
