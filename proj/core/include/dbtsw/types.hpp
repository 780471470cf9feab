#pragma once

#include <Eigen/Dense>

namespace dbtsw {

// Row-major so that one row is one point; matches the CSV layout and keeps
// per-point access contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

}  // namespace dbtsw
