#pragma once

#include "fabricore/collision.hpp"
#include "fabricore/env/random.hpp"

#include <optional>

namespace fabricore::env {

struct InitialStateBounds {
  Eigen::Vector3d object_lower{-0.18125, -0.29, 0.05};  // relative to the table centre
  Eigen::Vector3d object_upper{0.18125, 0.29, 0.051};
  Eigen::Vector3d table_center = Eigen::Vector3d::Zero();
  double upright_probability = 0.5;
  double joint_noise_fraction = 0.1;  // of each joint's range
  double joint_speed = 0.1;           // rad/s, uniform in [-v, v]
  Eigen::VectorXd default_q;          // empty: mid-range
  int max_tries = 1000;
};

struct InitialState {
  Eigen::Vector3d object_position;
  Eigen::Quaterniond object_orientation;
  bool upright = false;
  Eigen::VectorXd q, qd;
  int tries = 0;
};

/// Rejection-sample an object pose and a collision-free robot state; SamplingError when tries run out.
InitialState sample_initial_state(Rng& rng, const KinematicModel<double>& model, const CollisionWorld<double>& world,
                                  const InitialStateBounds& bounds);

struct WrenchConfig {
  double force_scale = 50;
  double torque_scale = 100;
  double probability = 0.1;
};

struct Wrench {
  Eigen::Vector3d force;   // N
  Eigen::Vector3d torque;  // N m
};

/// With probability p: f = f_scale m u_f, tau = tau_scale I u_tau for random unit u.
std::optional<Wrench> sample_wrench(Rng& rng, double mass, const Eigen::Matrix3d& inertia, const WrenchConfig& cfg);

struct PoseNoiseConfig {
  double sigma_xyz_uncorrelated = 0.02;
  double sigma_xyz_correlated = 0.02;
  double sigma_rpy_uncorrelated = 0.1;
  double sigma_rpy_correlated = 0.1;
};

struct PoseNoiseDraw {
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
};

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

/// Episode-level draw; redrawn on reset only.
PoseNoiseDraw draw_correlated_noise(Rng& rng, const PoseNoiseConfig& cfg);

/// Adds a fresh uncorrelated draw plus the episode draw. Rotations compose as quaternion products.
Pose apply_pose_noise(const Pose& pose, const PoseNoiseDraw& correlated, Rng& rng, const PoseNoiseConfig& cfg);

}  // namespace fabricore::env
