#include "dbtsw/transform.hpp"

#include <cmath>

#include "dbtsw/error.hpp"

namespace dbtsw {

EuclideanTransform::EuclideanTransform(Matrix rotation, Vector translation)
    : rotation_(std::move(rotation)), translation_(std::move(translation)) {
  const Eigen::Index d = translation_.size();
  if (d < 1 || rotation_.rows() != d || rotation_.cols() != d) {
    throw DimensionError("rotation must be d x d with d = translation size");
  }
  const Matrix gram = rotation_.transpose() * rotation_;
  const double err = (gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) throw ConfigError("rotation is not orthogonal (max |Q^T Q - I| too large)");
}

EuclideanTransform EuclideanTransform::identity(Eigen::Index d) {
  if (d < 1) throw DimensionError("dimension must be >= 1");
  return EuclideanTransform(Matrix::Identity(d, d), Vector::Zero(d));
}

Vector EuclideanTransform::apply_point(const Vector& y) const {
  if (y.size() != dim()) throw DimensionError("point dimension does not match transform");
  return rotation_ * y + translation_;
}

Vector EuclideanTransform::apply_direction(const Vector& theta) const {
  if (theta.size() != dim()) throw DimensionError("direction dimension does not match transform");
  return rotation_ * theta;
}

Matrix EuclideanTransform::apply_rows(const Matrix& points) const {
  if (points.cols() != dim()) throw DimensionError("point dimension does not match transform");
  Matrix out = points * rotation_.transpose();
  out.rowwise() += translation_.transpose();
  return out;
}

Matrix EuclideanTransform::rotate_rows(const Matrix& directions) const {
  if (directions.cols() != dim()) {
    throw DimensionError("direction dimension does not match transform");
  }
  return directions * rotation_.transpose();
}

EuclideanTransform EuclideanTransform::inverse() const {
  Matrix qt = rotation_.transpose();
  Vector a = -(qt * translation_);
  return EuclideanTransform(std::move(qt), std::move(a));
}

EuclideanTransform EuclideanTransform::compose(const EuclideanTransform& other) const {
  if (other.dim() != dim()) throw DimensionError("cannot compose transforms of different dimension");
  return EuclideanTransform(rotation_ * other.rotation_,
                            rotation_ * other.translation_ + translation_);
}

EuclideanTransform random_euclidean_transform(Eigen::Index d, const SeedSpec& seed) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  Engine rng = seed.engine();
  Matrix gauss(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) gauss(i, j) = standard_normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  Vector a(d);
  for (Eigen::Index i = 0; i < d; ++i) a(i) = uniform(rng, -5.0, 5.0);
  return EuclideanTransform(std::move(q), std::move(a));
}

EmpiricalMeasure apply_transform(const EuclideanTransform& g, const EmpiricalMeasure& m) {
  if (m.dim() != g.dim()) {
    throw DimensionError("measure dimension " + std::to_string(m.dim()) +
                         " does not match transform dimension " + std::to_string(g.dim()));
  }
  return EmpiricalMeasure(g.apply_rows(m.supports()), m.weights());
}

}  // namespace dbtsw
