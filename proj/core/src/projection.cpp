#include "dbtsw/projection.hpp"

#include <cmath>
#include <numeric>

#include "dbtsw/error.hpp"

namespace dbtsw {

double LineAtoms::total_mass() const noexcept {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

double ProjectedMeasure::total_mass() const noexcept {
  double total = 0.0;
  for (const auto& line : lines) total += line.total_mass();
  return total;
}

Vector point_line_distances(const Vector& y, const TreeSystem& t) {
  if (y.size() != t.dim()) throw DimensionError("point dimension does not match tree system");
  const Eigen::Index k = t.num_lines();
  Vector out(k);
  for (Eigen::Index l = 0; l < k; ++l) {
    const Vector diff = y - t.roots.row(l).transpose();
    const double along = diff.dot(t.directions.row(l).transpose());
    out(l) = std::sqrt(std::max(0.0, diff.squaredNorm() - along * along));
  }
  return out;
}

void softmax_inplace(Eigen::Ref<Vector> scaled) {
  const double top = scaled.maxCoeff();
  scaled = (scaled.array() - top).exp();
  scaled /= scaled.sum();
}

Vector splitting_weights(const Vector& y, const TreeSystem& t, const SplittingConfig& cfg) {
  const Eigen::Index k = t.num_lines();
  if (cfg.mode == SplitMode::UniformSplit) {
    if (y.size() != t.dim()) throw DimensionError("point dimension does not match tree system");
    return Vector::Constant(k, 1.0 / static_cast<double>(k));
  }
  Vector z = cfg.delta * point_line_distances(y, t);
  softmax_inplace(z);
  return z;
}

ProjectionTerms projection_terms(const Matrix& supports, const TreeSystem& t,
                                 const SplittingConfig& cfg) {
  if (supports.cols() != t.dim()) {
    throw DimensionError("measure dimension " + std::to_string(supports.cols()) +
                         " does not match tree dimension " + std::to_string(t.dim()));
  }
  if (!std::isfinite(cfg.delta)) throw ConfigError("splitting delta must be finite");
  const Eigen::Index n = supports.rows();
  const Eigen::Index k = t.num_lines();

  ProjectionTerms terms;
  terms.coords.resize(n, k);
  terms.distances.resize(n, k);

  if (t.kind == TreeKind::Concurrent) {
    Matrix diff = supports.rowwise() - t.roots.row(0);
    const Vector sq = diff.rowwise().squaredNorm();
    terms.coords.noalias() = diff * t.directions.transpose();
    terms.distances =
        (sq.replicate(1, k).array() - terms.coords.array().square()).max(0.0).sqrt();
  } else {
    for (Eigen::Index l = 0; l < k; ++l) {
      Matrix diff = supports.rowwise() - t.roots.row(l);
      const Vector sq = diff.rowwise().squaredNorm();
      terms.coords.col(l).noalias() = diff * t.directions.row(l).transpose();
      terms.distances.col(l) =
          (sq.array() - terms.coords.col(l).array().square()).max(0.0).sqrt();
    }
  }

  if (cfg.mode == SplitMode::UniformSplit) {
    terms.split = Matrix::Constant(n, k, 1.0 / static_cast<double>(k));
  } else {
    terms.split = cfg.delta * terms.distances;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector row = terms.split.row(i).transpose();
      softmax_inplace(row);
      terms.split.row(i) = row.transpose();
    }
  }
  return terms;
}

ProjectedMeasure project(const EmpiricalMeasure& m, const TreeSystem& t,
                         const SplittingConfig& cfg) {
  const ProjectionTerms terms = projection_terms(m.supports(), t, cfg);
  const Eigen::Index n = m.size();
  const Eigen::Index k = t.num_lines();
  ProjectedMeasure out;
  out.lines.resize(static_cast<std::size_t>(k));
  for (Eigen::Index l = 0; l < k; ++l) {
    auto& line = out.lines[static_cast<std::size_t>(l)];
    line.coords.resize(static_cast<std::size_t>(n));
    line.masses.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      line.coords[static_cast<std::size_t>(i)] = terms.coords(i, l);
      line.masses[static_cast<std::size_t>(i)] = m.weights()(i) * terms.split(i, l);
    }
  }
  return out;
}

}  // namespace dbtsw
