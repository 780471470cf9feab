#pragma once

#include <vector>

#include "dbtsw/measure.hpp"
#include "dbtsw/trees.hpp"
#include "dbtsw/types.hpp"

namespace dbtsw {

enum class SplitMode { DistanceSoftmax, UniformSplit };

/// Splitting map alpha(y, L) = softmax(delta * dist(y, line_l)).
///
/// Sign convention: a positive delta gives MORE mass to lines that are
/// farther from the point. Use a negative delta to favour nearby lines.
/// UniformSplit ignores delta and puts 1/k on every line.
struct SplittingConfig {
  double delta = 10.0;
  SplitMode mode = SplitMode::DistanceSoftmax;
};

/// Weighted atoms on one line, coordinates relative to the line's source.
struct LineAtoms {
  std::vector<double> coords;
  std::vector<double> masses;

  [[nodiscard]] std::size_t size() const noexcept { return coords.size(); }
  [[nodiscard]] double total_mass() const noexcept;
};

/// Image of a measure under the Radon transform on a system of lines: one
/// atom list per line. Atoms are never merged, so line l of a projected
/// n-point measure holds exactly n atoms in support order.
struct ProjectedMeasure {
  std::vector<LineAtoms> lines;

  [[nodiscard]] std::size_t num_lines() const noexcept { return lines.size(); }
  [[nodiscard]] double total_mass() const noexcept;
};

/// Distance from y to every line of t:
/// sqrt(max(0, |y - x_l|^2 - <y - x_l, theta_l>^2)).
Vector point_line_distances(const Vector& y, const TreeSystem& t);

/// In-place max-subtracted softmax of `scaled` (length k).
void softmax_inplace(Eigen::Ref<Vector> scaled);

/// Splitting weights of y on t; a point on the simplex of size k.
Vector splitting_weights(const Vector& y, const TreeSystem& t, const SplittingConfig& cfg);

/// Per-support quantities for one tree: coordinates (n x k), distances
/// (n x k) and splitting weights (n x k). Shared by projection and gradient
/// code so both see bit-identical intermediates.
struct ProjectionTerms {
  Matrix coords;
  Matrix distances;
  Matrix split;
};

ProjectionTerms projection_terms(const Matrix& supports, const TreeSystem& t,
                                 const SplittingConfig& cfg);

/// Mass w_i * alpha(y_i)_l placed at <y_i - x_l, theta_l> on every line l.
ProjectedMeasure project(const EmpiricalMeasure& m, const TreeSystem& t,
                         const SplittingConfig& cfg);

}  // namespace dbtsw
