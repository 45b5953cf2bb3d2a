#pragma once

#include <numbers>

#include <Eigen/Core>

namespace viscontact {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;

/// Piecewise-constant symmetric 2x2 tensor field, one column per triangle,
/// packed as (t11, t22, sqrt(2)*t12). The scaling makes the packing an
/// isometry: the Euclidean column norm equals the tensor Frobenius norm,
/// so inner products of fields reduce to plain dot products.
using TensorField = Eigen::Matrix3Xd;

inline Vec3 to_packed(const Mat2& t) {
  return Vec3(t(0, 0), t(1, 1), std::numbers::sqrt2 * t(0, 1));
}

inline Mat2 from_packed(const Vec3& v) {
  Mat2 t;
  const double shear = v(2) / std::numbers::sqrt2;
  t << v(0), shear, shear, v(1);
  return t;
}

inline double packed_trace(const Vec3& v) { return v(0) + v(1); }

inline Vec3 packed_identity() { return Vec3(1.0, 1.0, 0.0); }

}  // namespace viscontact
