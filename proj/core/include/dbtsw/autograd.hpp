#pragma once

#include <cstddef>
#include <vector>

#include "dbtsw/measure.hpp"
#include "dbtsw/projection.hpp"
#include "dbtsw/trees.hpp"

namespace dbtsw {

/// Value and gradient of the Db-TSW estimate with respect to the source
/// support positions, conditional on a fixed set of trees.
struct GradientReport {
  Matrix gradient;  // n x d, d value / d X
  double value = 0.0;
  /// Atoms that sat exactly on a non-differentiable configuration: a
  /// coordinate tie with another atom, a coordinate at the root, or a point
  /// lying on a line. The documented subgradient conventions apply there.
  std::size_t nondifferentiable_hits = 0;
};

/// Reverse-mode gradient of mean_t W1(R_t mu(X), R_t nu).
///
/// Conventions at kinks: sign(0) = 0, the distance gradient of a point lying
/// on a line is zero, and the sort order is frozen at the forward pass.
/// Gradients flow through both the projected coordinates and the softmax
/// splitting weights. Throws StructureError for non-concurrent trees and
/// DimensionError on shape mismatch.
GradientReport dbtsw_value_and_grad(const Matrix& X, const Vector& weights,
                                    const EmpiricalMeasure& nu,
                                    const std::vector<TreeSystem>& trees,
                                    const SplittingConfig& cfg);

/// Value only, on the same trees (no gradient bookkeeping).
double dbtsw_value(const Matrix& X, const Vector& weights, const EmpiricalMeasure& nu,
                   const std::vector<TreeSystem>& trees, const SplittingConfig& cfg);

struct FiniteDifferenceResult {
  double max_relative_error = 0.0;
  std::size_t compared = 0;
  /// Coordinates skipped because the combinatorial structure (sort order,
  /// segment signs, root side, on-line status) changes inside [x-h, x+h].
  std::size_t kinked = 0;
};

/// Central differences on every coordinate of X against the analytic
/// gradient. Relative error is |a - fd| / max(|a|, |fd|) over coordinates
/// with |a| > 1e-9 whose stencil is kink-free; a large error at coarse h is
/// reported, never thrown.
FiniteDifferenceResult finite_difference_check(const Matrix& X, const Vector& weights,
                                               const EmpiricalMeasure& nu,
                                               const std::vector<TreeSystem>& trees,
                                               const SplittingConfig& cfg, double h);

}  // namespace dbtsw
