#include "dbtsw/trees.hpp"

#include <cmath>
#include <string>

#include "dbtsw/error.hpp"
#include "dbtsw/parallel.hpp"

namespace dbtsw {

namespace {

// Sub-streams of one sampling slot.
constexpr std::uint64_t kDirectionStream = 0;
constexpr std::uint64_t kRootStream = 1;
constexpr std::uint64_t kStepStream = 2;

Vector sample_root(const RootDistribution& dist, Engine& rng, Eigen::Index d) {
  Vector x(d);
  if (const auto* cube = std::get_if<UniformCube>(&dist)) {
    for (Eigen::Index i = 0; i < d; ++i) x(i) = uniform(rng, -cube->half_width, cube->half_width);
    if (cube->center.size() != 0) x += cube->center;
  } else if (const auto* g = std::get_if<GaussianRoot>(&dist)) {
    for (Eigen::Index i = 0; i < d; ++i) x(i) = g->stddev * standard_normal(rng);
    if (g->mean.size() != 0) x += g->mean;
  } else {
    const auto& fixed = std::get<FixedRoot>(dist);
    x = fixed.point.size() != 0 ? fixed.point : Vector::Zero(d);
  }
  return x;
}

Matrix draw_directions(Engine& rng, std::size_t count, Eigen::Index d) {
  Matrix dirs(static_cast<Eigen::Index>(count), d);
  for (Eigen::Index r = 0; r < dirs.rows(); ++r) dirs.row(r) = sample_unit_direction(rng, d);
  return dirs;
}

// Directions for one system, orthogonalized (with redraws) when asked.
Matrix system_directions(const TreeSamplerConfig& cfg, Engine& rng, Eigen::Index d) {
  Matrix dirs = draw_directions(rng, cfg.k, d);
  if (!cfg.orthogonalize) return dirs;
  for (;;) {
    try {
      return orthogonalize_directions(dirs);
    } catch (const DegenerateDirections&) {
      dirs = draw_directions(rng, cfg.k, d);
    }
  }
}

double step_width(const TreeSamplerConfig& cfg, std::size_t step) {
  if (step - 1 < cfg.step_half_widths.size()) return cfg.step_half_widths[step - 1];
  return cfg.step_half_width;
}

}  // namespace

void validate_tree(const TreeSystem& t) {
  const Eigen::Index k = t.num_lines();
  const Eigen::Index d = t.dim();
  if (k < 1 || d < 1) throw DimensionError("tree system has no lines");
  if (t.roots.rows() != k || t.roots.cols() != d) {
    throw DimensionError("tree roots must be k x d");
  }
  if (!t.roots.allFinite() || !t.directions.allFinite()) {
    throw StructureError("tree system has non-finite entries");
  }
  for (Eigen::Index l = 0; l < k; ++l) {
    if (std::abs(t.directions.row(l).norm() - 1.0) > 1e-12) {
      throw StructureError("direction " + std::to_string(l) + " is not unit-norm");
    }
  }
  if (t.kind == TreeKind::Concurrent) {
    if (!t.attachments.empty()) throw StructureError("concurrent system has attachments");
    for (Eigen::Index l = 1; l < k; ++l) {
      if (t.roots.row(l) != t.roots.row(0)) {
        throw StructureError("concurrent system roots differ");
      }
    }
    return;
  }
  if (static_cast<Eigen::Index>(t.attachments.size()) != k - 1) {
    throw StructureError("chain needs k - 1 attachment coordinates");
  }
  for (Eigen::Index l = 1; l < k; ++l) {
    const double s = t.attachments[static_cast<std::size_t>(l - 1)];
    if (!std::isfinite(s)) throw StructureError("chain attachment is not finite");
    const RowVector expected = t.roots.row(l - 1) + s * t.directions.row(l - 1);
    if ((t.roots.row(l) - expected).cwiseAbs().maxCoeff() > 1e-10) {
      throw StructureError("chain line " + std::to_string(l) +
                           " is not attached to its parent");
    }
  }
}

void validate_sampler(const TreeSamplerConfig& cfg, Eigen::Index d) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (cfg.k < 1) throw ConfigError("k (lines per tree) must be >= 1");
  if (cfg.orthogonalize && static_cast<Eigen::Index>(cfg.k) > d) {
    throw ConfigError("orthogonal tree systems need k <= d (k = " + std::to_string(cfg.k) +
                      ", d = " + std::to_string(d) + ")");
  }
  if (const auto* cube = std::get_if<UniformCube>(&cfg.root)) {
    if (!(cube->half_width > 0.0)) throw ConfigError("root cube half-width must be > 0");
    if (cube->center.size() != 0 && cube->center.size() != d) {
      throw ConfigError("root cube center dimension does not match data");
    }
  } else if (const auto* g = std::get_if<GaussianRoot>(&cfg.root)) {
    if (!(g->stddev > 0.0)) throw ConfigError("root stddev must be > 0");
    if (g->mean.size() != 0 && g->mean.size() != d) {
      throw ConfigError("root mean dimension does not match data");
    }
  } else {
    const auto& fixed = std::get<FixedRoot>(cfg.root);
    if (fixed.point.size() != 0 && fixed.point.size() != d) {
      throw ConfigError("fixed root dimension does not match data");
    }
  }
  if (cfg.structure == TreeKind::Chain) {
    if (!(cfg.step_half_width > 0.0)) throw ConfigError("chain step half-width must be > 0");
    for (double h : cfg.step_half_widths) {
      if (!(h > 0.0)) throw ConfigError("chain step half-widths must be > 0");
    }
  }
}

Vector sample_unit_direction(Engine& rng, Eigen::Index d) {
  Vector v(d);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) v(i) = standard_normal(rng);
    norm = v.norm();
  } while (!(norm > 1e-300));
  v /= norm;
  return v;
}

Matrix sample_directions(const SeedSpec& seed, std::size_t index, std::size_t count,
                         Eigen::Index d) {
  Engine rng = seed.child(index).child(kDirectionStream).engine();
  return draw_directions(rng, count, d);
}

Matrix orthogonalize_directions(const Matrix& dirs) {
  const Eigen::Index k = dirs.rows();
  const Eigen::Index d = dirs.cols();
  if (k > d) throw ConfigError("cannot orthogonalize more directions than dimensions");
  Matrix out = dirs;
  for (Eigen::Index i = 1; i < k; ++i) {
    RowVector v = dirs.row(i);
    const double start = v.norm();
    // Two passes of modified Gram-Schmidt keep Theta Theta^T = I tight.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) v -= v.dot(out.row(j)) * out.row(j);
      if (pass == 0 && v.norm() < 1e-8 * std::max(1.0, start)) {
        throw DegenerateDirections("direction " + std::to_string(i) +
                                   " is nearly dependent on earlier ones");
      }
    }
    out.row(i) = v / v.norm();
  }
  return out;
}

std::vector<TreeSystem> sample_concurrent(const TreeSamplerConfig& cfg, Eigen::Index d,
                                          std::size_t count, const SeedSpec& seed) {
  validate_sampler(cfg, d);
  std::vector<TreeSystem> out(count);
  parallel_for(count, [&](std::size_t i) {
    const SeedSpec slot = seed.child(i);
    Engine dir_rng = slot.child(kDirectionStream).engine();
    Engine root_rng = slot.child(kRootStream).engine();
    TreeSystem t;
    t.kind = TreeKind::Concurrent;
    t.directions = system_directions(cfg, dir_rng, d);
    const Vector root = sample_root(cfg.root, root_rng, d);
    t.roots = root.transpose().replicate(static_cast<Eigen::Index>(cfg.k), 1);
    out[i] = std::move(t);
  });
  return out;
}

std::vector<TreeSystem> sample_chain(const TreeSamplerConfig& cfg, Eigen::Index d,
                                     std::size_t count, const SeedSpec& seed) {
  validate_sampler(cfg, d);
  std::vector<TreeSystem> out(count);
  const auto k = static_cast<Eigen::Index>(cfg.k);
  parallel_for(count, [&](std::size_t i) {
    const SeedSpec slot = seed.child(i);
    Engine dir_rng = slot.child(kDirectionStream).engine();
    Engine root_rng = slot.child(kRootStream).engine();
    Engine step_rng = slot.child(kStepStream).engine();
    TreeSystem t;
    t.kind = TreeKind::Chain;
    t.directions = system_directions(cfg, dir_rng, d);
    t.roots.resize(k, d);
    t.roots.row(0) = sample_root(cfg.root, root_rng, d).transpose();
    t.attachments.reserve(cfg.k - 1);
    for (Eigen::Index l = 1; l < k; ++l) {
      const double h = step_width(cfg, static_cast<std::size_t>(l));
      const double s = uniform(step_rng, -h, h);
      t.attachments.push_back(s);
      t.roots.row(l) = t.roots.row(l - 1) + s * t.directions.row(l - 1);
    }
    out[i] = std::move(t);
  });
  return out;
}

std::vector<TreeSystem> sample_trees(const TreeSamplerConfig& cfg, Eigen::Index d,
                                     std::size_t count, const SeedSpec& seed) {
  return cfg.structure == TreeKind::Chain ? sample_chain(cfg, d, count, seed)
                                          : sample_concurrent(cfg, d, count, seed);
}

TreeSystem transform_tree(const EuclideanTransform& g, const TreeSystem& t) {
  if (t.dim() != g.dim()) {
    throw DimensionError("tree dimension " + std::to_string(t.dim()) +
                         " does not match transform dimension " + std::to_string(g.dim()));
  }
  TreeSystem out;
  out.kind = t.kind;
  out.roots = g.apply_rows(t.roots);
  out.directions = g.rotate_rows(t.directions);
  out.attachments = t.attachments;
  return out;
}

}  // namespace dbtsw
