#pragma once

#include "dbtsw/measure.hpp"
#include "dbtsw/rng.hpp"
#include "dbtsw/types.hpp"

namespace dbtsw {

/// Element g = (Q, a) of the Euclidean group E(d), acting as y -> Q y + a.
/// Q may be a reflection; the full orthogonal group is allowed.
class EuclideanTransform {
 public:
  /// Throws DimensionError on shape mismatch and ConfigError when Q is not
  /// orthogonal to within 1e-10 entrywise.
  EuclideanTransform(Matrix rotation, Vector translation);

  static EuclideanTransform identity(Eigen::Index d);

  [[nodiscard]] const Matrix& rotation() const noexcept { return rotation_; }
  [[nodiscard]] const Vector& translation() const noexcept { return translation_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return translation_.size(); }

  [[nodiscard]] Vector apply_point(const Vector& y) const;
  /// Rotates a direction; translation does not act on directions.
  [[nodiscard]] Vector apply_direction(const Vector& theta) const;
  /// Maps every row of `points`.
  [[nodiscard]] Matrix apply_rows(const Matrix& points) const;
  /// Rotates every row of `directions`.
  [[nodiscard]] Matrix rotate_rows(const Matrix& directions) const;

  [[nodiscard]] EuclideanTransform inverse() const;
  /// (this * other)(y) = this(other(y)).
  [[nodiscard]] EuclideanTransform compose(const EuclideanTransform& other) const;

 private:
  Matrix rotation_;
  Vector translation_;
};

/// Q from the QR factorization of a d x d standard-normal matrix (Haar up to
/// column signs, reflections included), a uniform on [-5, 5]^d.
EuclideanTransform random_euclidean_transform(Eigen::Index d, const SeedSpec& seed);

/// Pushforward g#m: supports mapped, weights unchanged.
EmpiricalMeasure apply_transform(const EuclideanTransform& g, const EmpiricalMeasure& m);

}  // namespace dbtsw
