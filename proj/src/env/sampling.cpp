#include "fabricore/env/sampling.hpp"

namespace fabricore::env {

InitialState sample_initial_state(Rng& rng, const KinematicModel<double>& model, const CollisionWorld<double>& world,
                                  const InitialStateBounds& bounds)
{
  const auto& lim = model.limits();
  const Eigen::Index n = model.dof();
  const Eigen::VectorXd center =
      bounds.default_q.size() == 0 ? Eigen::VectorXd(0.5 * (lim.lower + lim.upper)) : bounds.default_q;
  if (center.size() != n) throw ConfigError("default configuration has the wrong dimension");
  if (bounds.max_tries < 1) throw ConfigError("max_tries must be positive");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  InitialState s;
  for (int attempt = 1; attempt <= bounds.max_tries; ++attempt) {
    for (int a = 0; a < 3; ++a)
      s.object_position[a] = bounds.table_center[a] + bounds.object_lower[a] +
                             unit(rng) * (bounds.object_upper[a] - bounds.object_lower[a]);
    s.upright = unit(rng) < bounds.upright_probability;
    s.object_orientation = s.upright ? Eigen::Quaterniond::Identity() : random_quaternion(rng);
    s.q.resize(n);
    s.qd.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double noise = bounds.joint_noise_fraction * (lim.upper[j] - lim.lower[j]) * sym(rng);
      s.q[j] = std::clamp(center[j] + noise, lim.lower[j], lim.upper[j]);
      s.qd[j] = bounds.joint_speed * sym(rng);
    }
    s.tries = attempt;
    const auto queries = query_all(model, s.q, world);
    if (min_signed_distance(queries) >= 0.0) return s;
  }
  throw SamplingError("no collision-free initial state after " + std::to_string(bounds.max_tries) + " tries");
}

std::optional<Wrench> sample_wrench(Rng& rng, double mass, const Eigen::Matrix3d& inertia, const WrenchConfig& cfg)
{
  std::bernoulli_distribution fire(cfg.probability);
  if (!fire(rng)) return std::nullopt;
  const Eigen::Vector3d uf = random_unit_vector(rng);
  const Eigen::Vector3d ut = random_unit_vector(rng);
  return Wrench{cfg.force_scale * mass * uf, cfg.torque_scale * inertia * ut};
}

namespace {

PoseNoiseDraw draw(Rng& rng, double sigma_xyz, double sigma_rpy)
{
  std::normal_distribution<double> nx(0.0, sigma_xyz);
  std::normal_distribution<double> nr(0.0, sigma_rpy);
  PoseNoiseDraw d;
  if (sigma_xyz > 0) d.xyz = {nx(rng), nx(rng), nx(rng)};
  if (sigma_rpy > 0) d.rpy = {nr(rng), nr(rng), nr(rng)};
  return d;
}

Eigen::Quaterniond quaternion_from_rpy(const Eigen::Vector3d& rpy)
{
  return Eigen::Quaterniond(rotation_from_rpy<double>(rpy));
}

}  // namespace

PoseNoiseDraw draw_correlated_noise(Rng& rng, const PoseNoiseConfig& cfg)
{
  return draw(rng, cfg.sigma_xyz_correlated, cfg.sigma_rpy_correlated);
}

Pose apply_pose_noise(const Pose& pose, const PoseNoiseDraw& correlated, Rng& rng, const PoseNoiseConfig& cfg)
{
  const PoseNoiseDraw fresh = draw(rng, cfg.sigma_xyz_uncorrelated, cfg.sigma_rpy_uncorrelated);
  Pose out;
  out.position = pose.position + fresh.xyz + correlated.xyz;
  out.orientation = (quaternion_from_rpy(correlated.rpy) * quaternion_from_rpy(fresh.rpy) * pose.orientation).normalized();
  return out;
}

}  // namespace fabricore::env
