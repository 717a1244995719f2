#pragma once

#include "fabricore/collision.hpp"

#include <cmath>
#include <span>

namespace fabricore {

/// A task-space priority metric and the acceleration the term asks for.
template <typename Scalar>
struct FabricTermOutput {
  MatrixX<Scalar> metric;
  VectorX<Scalar> accel;

  static FabricTermOutput zero(Eigen::Index k)
  {
    return {MatrixX<Scalar>::Zero(k, k), VectorX<Scalar>::Zero(k)};
  }
};

template <typename Scalar>
struct CollisionTermConfig {
  Scalar k_geometric = Scalar(1);
  Scalar k_forcing = Scalar(5);
  Scalar damping = Scalar(2.5);
  Scalar metric_gain = Scalar(0.02);  // beta
  Scalar gate_sharpness = Scalar(20);  // alpha_1
  Scalar gate_offset = Scalar(0.1);    // alpha_2
  Scalar cutoff = Scalar(0.5);  // queries with lower-bounded distance >= cutoff are ignored

  void validate() const
  {
    if (!(k_geometric > 0 && k_forcing > 0 && damping > 0 && metric_gain > 0 && gate_sharpness > 0 &&
          gate_offset > 0 && cutoff > 0))
      throw ConfigError("collision term parameters must all be positive");
  }
};

template <typename Scalar>
struct AttractionConfig {
  Scalar mass = Scalar(1);
  Scalar gain = Scalar(40);
  Scalar sharpness = Scalar(10);
  Scalar damping = Scalar(0);  // forced variant only

  void validate() const
  {
    if (!(mass > 0 && gain > 0 && sharpness > 0 && damping >= 0))
      throw ConfigError("attraction parameters must be positive");
  }
};

template <typename Scalar>
struct JointLimitConfig {
  Scalar metric_gain = Scalar(1);  // k_b
  VectorX<Scalar> repulsion;       // g, one entry per joint
  Scalar damping = Scalar(20);

  void validate(Eigen::Index n) const
  {
    if (!(metric_gain > 0)) throw ConfigError("joint limit metric gain must be positive");
    if (repulsion.size() != n || !(repulsion.minCoeff() > 0))
      throw ConfigError("joint limit repulsion must be positive with one entry per joint");
    if (!(damping >= 0)) throw ConfigError("joint limit damping must be non-negative");
  }
};

/// s = (tanh(-a1 (v - a2)) + 1) / 2, in [0, 1]; high when the sphere approaches the body (v < 0).
template <typename Scalar>
Scalar velocity_gate(Scalar impact_speed, const CollisionTermConfig<Scalar>& cfg)
{
  using std::tanh;
  return Scalar(0.5) * (tanh(-cfg.gate_sharpness * (impact_speed - cfg.gate_offset)) + Scalar(1));
}

namespace detail {

template <typename Scalar>
struct CollisionBasis {
  Vector3<Scalar> response = Vector3<Scalar>::Zero();  // x_b = -sum n_i / d_i
  Matrix3<Scalar> metric = Matrix3<Scalar>::Zero();     // beta / d~^2 * M_b / ||M_b||
  bool active = false;
};

template <typename Scalar>
CollisionBasis<Scalar> collision_basis(std::span<const DistanceQuery<Scalar>> queries,
                                       const Vector3<Scalar>& xd, const CollisionTermConfig<Scalar>& cfg)
{
  CollisionBasis<Scalar> out;
  Matrix3<Scalar> Mb = Matrix3<Scalar>::Zero();
  Scalar d_tilde = std::numeric_limits<Scalar>::infinity();
  for (const auto& q : queries) {
    if (q.lower_bounded >= cfg.cutoff) continue;
    out.active = true;
    const Scalar inv_d = Scalar(1) / q.lower_bounded;
    out.response -= inv_d * q.direction;
    const Scalar s = velocity_gate(-xd.dot(q.direction), cfg);
    Mb.noalias() += (s * inv_d) * q.direction * q.direction.transpose();
    d_tilde = std::min(d_tilde, q.lower_bounded);
  }
  const Scalar norm = Mb.norm();
  if (out.active && norm >= kDegenerate<Scalar>)
    out.metric = (cfg.metric_gain / (d_tilde * d_tilde)) * (Mb / norm);
  return out;
}

}  // namespace detail

/// HD2 collision term: accel = k_g |xd|^2 * normalized(x_b).
template <typename Scalar>
FabricTermOutput<Scalar> collision_geometric(std::span<const DistanceQuery<Scalar>> queries,
                                             const Vector3<Scalar>& xd, const CollisionTermConfig<Scalar>& cfg)
{
  const auto basis = detail::collision_basis(queries, xd, cfg);
  const Scalar r = basis.response.norm();
  if (!basis.active || r < kDegenerate<Scalar>) return FabricTermOutput<Scalar>::zero(3);
  return {basis.metric, cfg.k_geometric * xd.squaredNorm() * (basis.response / r)};
}

/// Forcing collision term: accel = k_f normalized(x_b) - b xd.
template <typename Scalar>
FabricTermOutput<Scalar> collision_forcing(std::span<const DistanceQuery<Scalar>> queries,
                                           const Vector3<Scalar>& xd, const CollisionTermConfig<Scalar>& cfg)
{
  const auto basis = detail::collision_basis(queries, xd, cfg);
  if (!basis.active) return FabricTermOutput<Scalar>::zero(3);
  const Scalar r = basis.response.norm();
  VectorX<Scalar> accel = -cfg.damping * xd;
  if (r >= kDegenerate<Scalar>) accel += cfg.k_forcing * (basis.response / r);
  return {basis.metric, accel};
}

inline constexpr double kLimitFloor = 1e-6;

/**
 * Joint-limit barrier in x = q_upper - q (or q - q_lower). Priority k_b / x_j
 * switches on only while moving towards the limit (xd_j < 0).
 *
 * Distances at or below kLimitFloor are floored there; `floored` reports how many.
 */
template <typename Scalar>
FabricTermOutput<Scalar> joint_limit_repulsion(const VectorX<Scalar>& x, const VectorX<Scalar>& xd,
                                               const JointLimitConfig<Scalar>& cfg, int* floored = nullptr)
{
  const Eigen::Index n = x.size();
  FabricTermOutput<Scalar> out = FabricTermOutput<Scalar>::zero(n);
  int count = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Scalar dist = x[j];
    if (dist <= Scalar(kLimitFloor)) {
      dist = Scalar(kLimitFloor);
      ++count;
    }
    if (xd[j] < 0) out.metric(j, j) = cfg.metric_gain / dist;
  }
  out.accel = cfg.repulsion - cfg.damping * xd;
  if (floored) *floored = count;
  return out;
}

/// Forced attractor: accel = -k tanh(a |x - t|) (x - t)/|x - t| - b xd, metric m I.
template <typename Scalar>
FabricTermOutput<Scalar> attraction_forced(const VectorX<Scalar>& x, const VectorX<Scalar>& xd,
                                           const VectorX<Scalar>& target, const AttractionConfig<Scalar>& cfg)
{
  if (x.size() != target.size() || xd.size() != x.size())
    throw ConfigError("attraction target dimension mismatch");
  const Eigen::Index k = x.size();
  FabricTermOutput<Scalar> out{cfg.mass * MatrixX<Scalar>::Identity(k, k), -cfg.damping * xd};
  const VectorX<Scalar> delta = x - target;
  const Scalar dist = delta.norm();
  if (dist >= kDegenerate<Scalar>) out.accel -= cfg.gain * std::tanh(cfg.sharpness * dist) * (delta / dist);
  return out;
}

/// HD2 attractor: accel = -k |xd|^2 tanh(a |x - g|) (x - g)/|x - g|, metric m I, no damping.
template <typename Scalar>
FabricTermOutput<Scalar> attraction_geometric_hd2(const VectorX<Scalar>& x, const VectorX<Scalar>& xd,
                                                  const VectorX<Scalar>& goal, const AttractionConfig<Scalar>& cfg)
{
  if (x.size() != goal.size() || xd.size() != x.size())
    throw ConfigError("attraction goal dimension mismatch");
  const Eigen::Index k = x.size();
  FabricTermOutput<Scalar> out{cfg.mass * MatrixX<Scalar>::Identity(k, k), VectorX<Scalar>::Zero(k)};
  const VectorX<Scalar> delta = x - goal;
  const Scalar dist = delta.norm();
  if (dist >= kDegenerate<Scalar>)
    out.accel = -cfg.gain * xd.squaredNorm() * std::tanh(cfg.sharpness * dist) * (delta / dist);
  return out;
}

template <typename Scalar>
FabricTermOutput<Scalar> cspace_damping(const VectorX<Scalar>& qd, Scalar damping)
{
  if (!(damping >= 0)) throw ConfigError("cspace damping must be non-negative");
  const Eigen::Index n = qd.size();
  return {MatrixX<Scalar>::Identity(n, n), -damping * qd};
}

}  // namespace fabricore
