#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "dbtsw/types.hpp"

namespace dbtsw {

class EuclideanTransform;

/// Weighted point cloud in R^d with weights summing to one.
///
/// Instances only come out of make_measure (or transforms of valid
/// measures), so every EmpiricalMeasure satisfies: n >= 1, finite
/// coordinates, non-negative weights, and |sum(weights) - 1| <= 1e-12.
class EmpiricalMeasure {
 public:
  [[nodiscard]] const Matrix& supports() const noexcept { return supports_; }
  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return supports_.rows(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return supports_.cols(); }

 private:
  EmpiricalMeasure(Matrix supports, Vector weights)
      : supports_(std::move(supports)), weights_(std::move(weights)) {}

  friend EmpiricalMeasure make_measure(Matrix, std::optional<Vector>);
  friend EmpiricalMeasure apply_transform(const EuclideanTransform&,
                                          const EmpiricalMeasure&);

  Matrix supports_;
  Vector weights_;
};

/// Builds a validated measure. Omitted weights default to uniform 1/n; given
/// weights are divided by their sum. Throws InvalidMeasure on empty input,
/// non-finite entries, negative weights or a zero total.
EmpiricalMeasure make_measure(Matrix supports, std::optional<Vector> weights = std::nullopt);

/// Uniform measure over the rows of `supports`.
inline EmpiricalMeasure uniform_measure(Matrix supports) {
  return make_measure(std::move(supports));
}

/// CSV layout: header row, columns x_1..x_d, optional final `weight` column.
EmpiricalMeasure read_measure_csv(const std::filesystem::path& path);
void write_measure_csv(const EmpiricalMeasure& m, const std::filesystem::path& path);

/// Pairwise Euclidean distance matrix between supports.
Matrix pairwise_distances(const Matrix& supports);

}  // namespace dbtsw
