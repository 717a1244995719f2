#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace fabricore {

template <typename Scalar> using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Isometry3 = Eigen::Transform<Scalar, 3, Eigen::Isometry>;

// Malformed model, scenario or parameter file; CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical fault inside a fabric step; CLI exit code 3.
class EngineFault : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Threshold below which a vector or matrix norm is treated as zero when normalizing.
template <typename Scalar> inline constexpr Scalar kDegenerate = Scalar(1e-9);

/// Rotation for extrinsic X-Y-Z (roll, pitch, yaw) Euler angles: R = Rz(yaw) Ry(pitch) Rx(roll).
template <typename Scalar>
Matrix3<Scalar> rotation_from_rpy(const Vector3<Scalar>& rpy)
{
  using AngleAxis = Eigen::AngleAxis<Scalar>;
  return (AngleAxis(rpy.z(), Vector3<Scalar>::UnitZ()) *
          AngleAxis(rpy.y(), Vector3<Scalar>::UnitY()) *
          AngleAxis(rpy.x(), Vector3<Scalar>::UnitX()))
      .toRotationMatrix();
}

/// Inverse of rotation_from_rpy; pitch returned in [-pi/2, pi/2].
template <typename Scalar>
Vector3<Scalar> rpy_from_rotation(const Matrix3<Scalar>& R)
{
  using std::atan2;
  using std::sqrt;
  const Scalar pitch = atan2(-R(2, 0), sqrt(R(0, 0) * R(0, 0) + R(1, 0) * R(1, 0)));
  const Scalar roll = atan2(R(2, 1), R(2, 2));
  const Scalar yaw = atan2(R(1, 0), R(0, 0));
  return {roll, pitch, yaw};
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m)
{
  return m.allFinite();
}

}  // namespace fabricore
