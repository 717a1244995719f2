#pragma once

#include "fabricore/io.hpp"
#include "fabricore/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace testing {

using namespace fabricore;

inline std::string source_path(const std::string& rel) { return std::string(FABRICORE_SOURCE_DIR) + "/" + rel; }

/// One revolute joint about z at the origin, with body point "p" at (1,0,0).
inline KinematicModel<double> single_joint()
{
  std::vector<Joint<double>> joints{{"j0", kBaseFrame, Eigen::Vector3d::UnitZ(), Eigen::Isometry3d::Identity()}};
  JointLimits<double> lim{Eigen::VectorXd::Constant(1, -3.0), Eigen::VectorXd::Constant(1, 3.0),
                          Eigen::VectorXd::Constant(1, 10.0), Eigen::VectorXd::Constant(1, 1e4)};
  return {joints, lim, {{"p", 0, Eigen::Vector3d(1, 0, 0)}, {"on_axis", 0, Eigen::Vector3d(0, 0, 0.3)}}};
}

/// Three revolute joints with tilted axes so the chain is fully spatial.
inline KinematicModel<double> spatial3()
{
  auto origin = [](double x, double y, double z, double r, double p, double yaw) {
    Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
    T.translation() = Eigen::Vector3d(x, y, z);
    T.linear() = rotation_from_rpy<double>(Eigen::Vector3d(r, p, yaw));
    return T;
  };
  std::vector<Joint<double>> joints{
      {"a", kBaseFrame, Eigen::Vector3d(0, 0, 1), origin(0, 0, 0.1, 0, 0, 0)},
      {"b", 0, Eigen::Vector3d(0, 1, 0.2), origin(0.3, 0.05, 0, 0.2, 0, 0.1)},
      {"c", 1, Eigen::Vector3d(1, 0.3, 0), origin(0.25, 0, 0.1, 0, 0.3, 0)},
  };
  JointLimits<double> lim{Eigen::Vector3d::Constant(-2.5), Eigen::Vector3d::Constant(2.5),
                          Eigen::Vector3d::Constant(10.0), Eigen::Vector3d::Constant(1e4)};
  std::vector<BodyPoint<double>> pts{{"tip", 2, Eigen::Vector3d(0.2, 0.05, -0.03)},
                                     {"mid", 1, Eigen::Vector3d(0.1, 0, 0.02)}};
  std::vector<CollisionSphere<double>> spheres{{"s_mid", 1, Eigen::Vector3d(0.1, 0, 0.02), 0.05},
                                               {"s_tip", 2, Eigen::Vector3d(0.2, 0.05, -0.03), 0.04}};
  return {joints, lim, pts, spheres};
}

inline Eigen::VectorXd uniform(std::mt19937_64& rng, Eigen::Index n, double lo, double hi)
{
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testing
