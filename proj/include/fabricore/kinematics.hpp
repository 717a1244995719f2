#pragma once

#include "fabricore/types.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fabricore {

inline constexpr int kBaseFrame = -1;

template <typename Scalar>
struct Joint {
  std::string name;
  int parent = kBaseFrame;  // index of the parent joint frame, or kBaseFrame
  Vector3<Scalar> axis = Vector3<Scalar>::UnitZ();
  Isometry3<Scalar> origin = Isometry3<Scalar>::Identity();  // parent frame -> joint frame at q = 0
};

template <typename Scalar>
struct BodyPoint {
  std::string name;
  int frame = kBaseFrame;
  Vector3<Scalar> offset = Vector3<Scalar>::Zero();
};

template <typename Scalar>
struct CollisionSphere {
  std::string name;
  int frame = kBaseFrame;
  Vector3<Scalar> offset = Vector3<Scalar>::Zero();
  Scalar radius = Scalar(0);
};

template <typename Scalar>
struct JointLimits {
  VectorX<Scalar> lower, upper, accel, jerk;
};

/**
 * Revolute kinematic tree. Joints are stored in topological order: a joint's
 * parent always has a smaller index. Every joint owns one frame; body points
 * and collision spheres are rigidly attached to a frame (or the base).
 *
 * The model is immutable after construction and validated there.
 */
template <typename Scalar>
class KinematicModel {
public:
  KinematicModel(std::vector<Joint<Scalar>> joints, JointLimits<Scalar> limits,
                 std::vector<BodyPoint<Scalar>> body_points = {},
                 std::vector<CollisionSphere<Scalar>> spheres = {})
      : joints_(std::move(joints)), limits_(std::move(limits)),
        points_(std::move(body_points)), spheres_(std::move(spheres))
  {
    const auto n = static_cast<Eigen::Index>(joints_.size());
    if (n < 1) throw ConfigError("kinematic model needs at least one joint");
    if (limits_.lower.size() != n || limits_.upper.size() != n ||
        limits_.accel.size() != n || limits_.jerk.size() != n)
      throw ConfigError("joint limit vectors must have one entry per joint");
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& jt = joints_[j];
      if (jt.parent != kBaseFrame && (jt.parent < 0 || jt.parent >= j))
        throw ConfigError("joint '" + jt.name + "' must reference an earlier parent joint");
      if (!(jt.axis.norm() > Scalar(0)) || !jt.axis.allFinite())
        throw ConfigError("joint '" + jt.name + "' has a degenerate axis");
      joints_[j].axis.normalize();
      if (!std::isfinite(limits_.lower[j]) || !std::isfinite(limits_.upper[j]) ||
          !(limits_.lower[j] < limits_.upper[j]))
        throw ConfigError("joint '" + jt.name + "' needs finite lower < upper limits");
      if (!(limits_.accel[j] > 0) || !(limits_.jerk[j] > 0) || !std::isfinite(limits_.accel[j]) ||
          !std::isfinite(limits_.jerk[j]))
        throw ConfigError("joint '" + jt.name + "' needs positive finite accel and jerk limits");
    }
    for (const auto& p : points_) check_frame(p.frame, p.name);
    for (const auto& s : spheres_) {
      check_frame(s.frame, s.name);
      if (!(s.radius > 0)) throw ConfigError("sphere '" + s.name + "' needs a positive radius");
    }
    // chain_[f] lists the joints whose motion moves frame f, root first.
    chain_.resize(joints_.size());
    for (std::size_t j = 0; j < joints_.size(); ++j) {
      if (joints_[j].parent != kBaseFrame) chain_[j] = chain_[joints_[j].parent];
      chain_[j].push_back(static_cast<int>(j));
    }
  }

  Eigen::Index dof() const { return static_cast<Eigen::Index>(joints_.size()); }
  const std::vector<Joint<Scalar>>& joints() const { return joints_; }
  const JointLimits<Scalar>& limits() const { return limits_; }
  const std::vector<BodyPoint<Scalar>>& body_points() const { return points_; }
  const std::vector<CollisionSphere<Scalar>>& spheres() const { return spheres_; }

  /// Joints that move frame `frame`, ordered root to leaf. Empty for the base.
  std::span<const int> chain(int frame) const
  {
    if (frame == kBaseFrame) return {};
    return chain_[static_cast<std::size_t>(frame)];
  }

  int frame_index(std::string_view name) const
  {
    if (name == "base") return kBaseFrame;
    for (std::size_t j = 0; j < joints_.size(); ++j)
      if (joints_[j].name == name) return static_cast<int>(j);
    throw ConfigError("unknown frame '" + std::string(name) + "'");
  }

  std::size_t point_index(std::string_view name) const
  {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i].name == name) return i;
    throw ConfigError("unknown body point '" + std::string(name) + "'");
  }

  std::size_t sphere_index(std::string_view name) const
  {
    for (std::size_t i = 0; i < spheres_.size(); ++i)
      if (spheres_[i].name == name) return i;
    throw ConfigError("unknown collision sphere '" + std::string(name) + "'");
  }

  /// Resolve point ids to the attached points; throws ConfigError on an unknown id.
  std::vector<BodyPoint<Scalar>> resolve_points(std::span<const std::size_t> ids) const
  {
    std::vector<BodyPoint<Scalar>> out;
    out.reserve(ids.size());
    for (auto id : ids) {
      if (id >= points_.size())
        throw ConfigError("body point id " + std::to_string(id) + " out of range");
      out.push_back(points_[id]);
    }
    return out;
  }

  std::vector<BodyPoint<Scalar>> sphere_centers() const
  {
    std::vector<BodyPoint<Scalar>> out;
    out.reserve(spheres_.size());
    for (const auto& s : spheres_) out.push_back({s.name, s.frame, s.offset});
    return out;
  }

private:
  void check_frame(int frame, const std::string& what) const
  {
    if (frame != kBaseFrame && (frame < 0 || frame >= static_cast<int>(joints_.size())))
      throw ConfigError("'" + what + "' references a missing frame");
  }

  std::vector<Joint<Scalar>> joints_;
  JointLimits<Scalar> limits_;
  std::vector<BodyPoint<Scalar>> points_;
  std::vector<CollisionSphere<Scalar>> spheres_;
  std::vector<std::vector<int>> chain_;
};

template <typename Scalar>
struct JointState {
  VectorX<Scalar> q;
  VectorX<Scalar> qd;
};

namespace detail {

template <typename Scalar>
void check_configuration(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q)
{
  if (q.size() != model.dof())
    throw ConfigError("configuration has " + std::to_string(q.size()) + " entries, model has " +
                      std::to_string(model.dof()) + " joints");
}

}  // namespace detail

/// World transform of every joint frame.
template <typename Scalar>
std::vector<Isometry3<Scalar>> forward_frames(const KinematicModel<Scalar>& model,
                                              const VectorX<Scalar>& q)
{
  detail::check_configuration(model, q);
  const auto& joints = model.joints();
  std::vector<Isometry3<Scalar>> frames(joints.size());
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const auto& jt = joints[j];
    Isometry3<Scalar> local = jt.origin;
    local.linear() = local.linear() * Eigen::AngleAxis<Scalar>(q[static_cast<Eigen::Index>(j)], jt.axis).toRotationMatrix();
    frames[j] = jt.parent == kBaseFrame ? local : frames[static_cast<std::size_t>(jt.parent)] * local;
  }
  return frames;
}

template <typename Scalar>
Vector3<Scalar> point_position(const std::vector<Isometry3<Scalar>>& frames, const BodyPoint<Scalar>& p)
{
  if (p.frame == kBaseFrame) return p.offset;
  return frames[static_cast<std::size_t>(p.frame)] * p.offset;
}

/// Stacked 3k vector of world positions.
template <typename Scalar>
VectorX<Scalar> forward_points(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                               std::span<const BodyPoint<Scalar>> points)
{
  const auto frames = forward_frames(model, q);
  VectorX<Scalar> x(3 * static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    x.template segment<3>(3 * static_cast<Eigen::Index>(i)) = point_position(frames, points[i]);
  return x;
}

template <typename Scalar>
std::vector<Vector3<Scalar>> forward_points(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                                            std::span<const std::size_t> point_ids)
{
  const auto points = model.resolve_points(point_ids);
  const VectorX<Scalar> x = forward_points<Scalar>(model, q, points);
  std::vector<Vector3<Scalar>> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out[i] = x.template segment<3>(3 * static_cast<Eigen::Index>(i));
  return out;
}

/// Analytic position Jacobian: column j is axis_j x (p - o_j) for every joint moving the point.
template <typename Scalar>
MatrixX<Scalar> jacobian(const KinematicModel<Scalar>& model, const std::vector<Isometry3<Scalar>>& frames,
                         std::span<const BodyPoint<Scalar>> points)
{
  MatrixX<Scalar> J = MatrixX<Scalar>::Zero(3 * static_cast<Eigen::Index>(points.size()), model.dof());
  const auto& joints = model.joints();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector3<Scalar> p = point_position(frames, points[i]);
    for (int j : model.chain(points[i].frame)) {
      const auto& T = frames[static_cast<std::size_t>(j)];
      const Vector3<Scalar> axis = T.linear() * joints[static_cast<std::size_t>(j)].axis;
      J.template block<3, 1>(3 * static_cast<Eigen::Index>(i), j) = axis.cross(p - T.translation());
    }
  }
  return J;
}

template <typename Scalar>
MatrixX<Scalar> jacobian(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                         std::span<const BodyPoint<Scalar>> points)
{
  return jacobian(model, forward_frames(model, q), points);
}

template <typename Scalar>
MatrixX<Scalar> jacobian(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                         std::span<const std::size_t> point_ids)
{
  const auto points = model.resolve_points(point_ids);
  return jacobian<Scalar>(model, q, points);
}

inline constexpr double kCurvatureStep = 1e-6;

/// J-dot times q-dot, by a central directional difference of the Jacobian along q-dot.
template <typename Scalar>
VectorX<Scalar> curvature_term(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                               const VectorX<Scalar>& qd, std::span<const BodyPoint<Scalar>> points)
{
  detail::check_configuration(model, qd);
  const Scalar eps = Scalar(kCurvatureStep);
  if (qd.isZero(Scalar(0))) return VectorX<Scalar>::Zero(3 * static_cast<Eigen::Index>(points.size()));
  const MatrixX<Scalar> Jp = jacobian<Scalar>(model, VectorX<Scalar>(q + eps * qd), points);
  const MatrixX<Scalar> Jm = jacobian<Scalar>(model, VectorX<Scalar>(q - eps * qd), points);
  return (Jp - Jm) * qd / (Scalar(2) * eps);
}

template <typename Scalar>
VectorX<Scalar> curvature_term(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                               const VectorX<Scalar>& qd, std::span<const std::size_t> point_ids)
{
  const auto points = model.resolve_points(point_ids);
  return curvature_term<Scalar>(model, q, qd, points);
}

}  // namespace fabricore
