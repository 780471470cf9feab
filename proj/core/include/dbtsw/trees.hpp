#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "dbtsw/rng.hpp"
#include "dbtsw/transform.hpp"
#include "dbtsw/types.hpp"

namespace dbtsw {

enum class TreeKind { Concurrent, Chain };

/// k lines in R^d glued into a tree.
///
/// Line l is parameterized as roots.row(l) + t * directions.row(l). For a
/// Concurrent system all roots coincide and the lines meet at t = 0. For a
/// Chain, line i >= 1 is attached to line i-1 at coordinate attachments[i-1]
/// of line i-1 (measured from that line's source), and line i's own source is
/// the junction, so every line meets its parent at its own t = 0.
struct TreeSystem {
  TreeKind kind = TreeKind::Concurrent;
  Matrix roots;        // k x d
  Matrix directions;   // k x d, unit rows
  std::vector<double> attachments;  // k-1 entries for Chain, empty otherwise

  [[nodiscard]] Eigen::Index num_lines() const noexcept { return directions.rows(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return directions.cols(); }
};

/// Throws StructureError (or DimensionError for shape problems) if any
/// TreeSystem invariant is broken: unit directions within 1e-12, equal
/// roots for Concurrent, connectivity within 1e-10 for Chain.
void validate_tree(const TreeSystem& t);

struct UniformCube {
  double half_width = 1.0;
  Vector center;  // empty means the origin
};
struct GaussianRoot {
  Vector mean;  // empty means the origin
  double stddev = 1.0;
};
struct FixedRoot {
  Vector point;  // empty means the origin
};
using RootDistribution = std::variant<UniformCube, GaussianRoot, FixedRoot>;

struct TreeSamplerConfig {
  std::size_t k = 4;
  RootDistribution root = UniformCube{1.0, {}};
  bool orthogonalize = false;
  TreeKind structure = TreeKind::Concurrent;
  /// Chain steps t_i ~ U[-h, h]. `step_half_widths[i-1]`, when present,
  /// overrides the default for step i.
  double step_half_width = 1.0;
  std::vector<double> step_half_widths;
};

/// Throws ConfigError on k == 0, non-positive widths/stddevs, mismatched root
/// dimension, or orthogonalize with k > d.
void validate_sampler(const TreeSamplerConfig& cfg, Eigen::Index d);

/// Unit vector uniform on S^{d-1} (normalized Gaussian).
Vector sample_unit_direction(Engine& rng, Eigen::Index d);

/// Draws `count` directions for slot `index` of a sampling run. Every
/// sampler (trees and plain slicing) pulls directions through this so that
/// equal seeds give equal directions across estimators.
Matrix sample_directions(const SeedSpec& seed, std::size_t index, std::size_t count,
                         Eigen::Index d);

/// Gram-Schmidt in row order with one reorthogonalization pass. Row 0 is
/// returned unchanged. Throws DegenerateDirections when a residual norm drops
/// below 1e-8, ConfigError when k > d.
Matrix orthogonalize_directions(const Matrix& dirs);

/// L independent concurrent systems; system i depends only on seed.child(i).
std::vector<TreeSystem> sample_concurrent(const TreeSamplerConfig& cfg, Eigen::Index d,
                                          std::size_t count, const SeedSpec& seed);

/// L independent chain systems (x_i = x_{i-1} + t_i * theta_{i-1}).
std::vector<TreeSystem> sample_chain(const TreeSamplerConfig& cfg, Eigen::Index d,
                                     std::size_t count, const SeedSpec& seed);

/// Dispatches on cfg.structure.
std::vector<TreeSystem> sample_trees(const TreeSamplerConfig& cfg, Eigen::Index d,
                                     std::size_t count, const SeedSpec& seed);

/// g applied to every line: roots mapped affinely, directions rotated.
/// Attachment coordinates are unchanged.
TreeSystem transform_tree(const EuclideanTransform& g, const TreeSystem& t);

}  // namespace dbtsw
