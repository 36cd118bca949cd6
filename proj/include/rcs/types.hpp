#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace rcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major, so a block of columns is contiguous
using Index = Eigen::Index;

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace rcs
