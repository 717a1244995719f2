#pragma once

#include "fabricore/kinematics.hpp"
#include "fabricore/pca_basis.hpp"

#include <array>
#include <span>
#include <vector>

namespace fabricore {

enum class TaskmapKind { body_points, linear, identity, joint_limit_upper, joint_limit_lower };

/**
 * A differentiable map x = phi(q). Linear maps are affine, x = matrix * q + offset,
 * so a mean-centred PCA basis embeds without a separate shift.
 */
template <typename Scalar>
struct Taskmap {
  TaskmapKind kind = TaskmapKind::identity;
  MatrixX<Scalar> matrix;              // linear only
  VectorX<Scalar> offset;              // linear only
  std::vector<BodyPoint<Scalar>> points;  // body_points only

  Eigen::Index dim(Eigen::Index dof) const
  {
    switch (kind) {
      case TaskmapKind::body_points: return 3 * static_cast<Eigen::Index>(points.size());
      case TaskmapKind::linear: return matrix.rows();
      default: return dof;
    }
  }

  static Taskmap identity() { return {}; }
  static Taskmap linear(MatrixX<Scalar> A, VectorX<Scalar> b = {})
  {
    if (!A.allFinite()) throw ConfigError("linear taskmap matrix must be finite");
    if (A.rows() > A.cols()) throw ConfigError("linear taskmap must not have more rows than columns");
    if (b.size() == 0) b = VectorX<Scalar>::Zero(A.rows());
    if (b.size() != A.rows()) throw ConfigError("linear taskmap offset has the wrong size");
    return {TaskmapKind::linear, std::move(A), std::move(b), {}};
  }
  static Taskmap body_points(std::vector<BodyPoint<Scalar>> pts)
  {
    return {TaskmapKind::body_points, {}, {}, std::move(pts)};
  }
  static Taskmap joint_limit_upper() { return {TaskmapKind::joint_limit_upper, {}, {}, {}}; }
  static Taskmap joint_limit_lower() { return {TaskmapKind::joint_limit_lower, {}, {}, {}}; }
};

template <typename Scalar>
struct TaskEval {
  VectorX<Scalar> x;
  VectorX<Scalar> xd;
  MatrixX<Scalar> J;
  VectorX<Scalar> curvature;  // J-dot q-dot
};

template <typename Scalar>
TaskEval<Scalar> eval(const Taskmap<Scalar>& map, const KinematicModel<Scalar>& model,
                      const JointState<Scalar>& state)
{
  const Eigen::Index n = model.dof();
  if (state.q.size() != n || state.qd.size() != n)
    throw ConfigError("taskmap evaluated on a state of the wrong dimension");
  TaskEval<Scalar> out;
  switch (map.kind) {
    case TaskmapKind::identity:
      out.x = state.q;
      out.J = MatrixX<Scalar>::Identity(n, n);
      out.curvature = VectorX<Scalar>::Zero(n);
      break;
    case TaskmapKind::linear:
      if (map.matrix.cols() != n) throw ConfigError("linear taskmap column count does not match the model");
      out.x = map.matrix * state.q + map.offset;
      out.J = map.matrix;
      out.curvature = VectorX<Scalar>::Zero(map.matrix.rows());
      break;
    case TaskmapKind::joint_limit_upper:
      out.x = model.limits().upper - state.q;
      out.J = -MatrixX<Scalar>::Identity(n, n);
      out.curvature = VectorX<Scalar>::Zero(n);
      break;
    case TaskmapKind::joint_limit_lower:
      out.x = state.q - model.limits().lower;
      out.J = MatrixX<Scalar>::Identity(n, n);
      out.curvature = VectorX<Scalar>::Zero(n);
      break;
    case TaskmapKind::body_points: {
      const auto frames = forward_frames(model, state.q);
      const std::span<const BodyPoint<Scalar>> pts(map.points);
      out.x.resize(3 * static_cast<Eigen::Index>(pts.size()));
      for (std::size_t i = 0; i < pts.size(); ++i)
        out.x.template segment<3>(3 * static_cast<Eigen::Index>(i)) = point_position(frames, pts[i]);
      out.J = jacobian(model, frames, pts);
      out.curvature = curvature_term(model, state.q, state.qd, pts);
      break;
    }
  }
  out.xd = out.J * state.qd;
  return out;
}

/// Embed a k x h basis into the hand columns [hand_offset, hand_offset + h) of an n-DOF model.
template <typename Scalar>
Taskmap<Scalar> pca_taskmap(const PcaBasis<Scalar>& basis, Eigen::Index n, Eigen::Index hand_offset)
{
  const Eigen::Index h = basis.hand_dof();
  if (basis.mean.size() != h) throw ConfigError("PCA basis mean does not match its column count");
  if (hand_offset < 0 || hand_offset + h > n)
    throw ConfigError("PCA basis does not fit the model at the requested hand offset");
  MatrixX<Scalar> A = MatrixX<Scalar>::Zero(basis.rank(), n);
  A.middleCols(hand_offset, h) = basis.components;
  return Taskmap<Scalar>::linear(std::move(A), -basis.components * basis.mean);
}

/// Palm origin plus +-spacing along each local axis: 7 points that pin down a full pose.
template <typename Scalar>
std::array<Vector3<Scalar>, 7> palm_offsets(Scalar spacing = Scalar(0.1))
{
  std::array<Vector3<Scalar>, 7> out;
  out[0].setZero();
  for (int a = 0; a < 3; ++a) {
    out[1 + 2 * a] = spacing * Vector3<Scalar>::Unit(a);
    out[2 + 2 * a] = -spacing * Vector3<Scalar>::Unit(a);
  }
  return out;
}

/// Palm description: the frame it is rigid in and where the palm origin sits in that frame.
template <typename Scalar>
struct PalmFrame {
  int frame = kBaseFrame;
  Vector3<Scalar> origin = Vector3<Scalar>::Zero();
  std::array<Vector3<Scalar>, 7> offsets = palm_offsets<Scalar>();
};

template <typename Scalar>
Taskmap<Scalar> palm_pose_taskmap(const KinematicModel<Scalar>& model, const PalmFrame<Scalar>& palm)
{
  if (palm.frame != kBaseFrame && (palm.frame < 0 || palm.frame >= model.dof()))
    throw ConfigError("palm frame does not exist in the model");
  std::vector<BodyPoint<Scalar>> pts;
  for (std::size_t k = 0; k < palm.offsets.size(); ++k)
    pts.push_back({"palm_" + std::to_string(k), palm.frame, palm.origin + palm.offsets[k]});
  return Taskmap<Scalar>::body_points(std::move(pts));
}

/// 21-D target: the 7 palm offsets placed at the commanded position and extrinsic-XYZ orientation.
template <typename Scalar>
VectorX<Scalar> pose_to_targets(const Vector3<Scalar>& position, const Vector3<Scalar>& rpy,
                                const std::array<Vector3<Scalar>, 7>& offsets)
{
  const Matrix3<Scalar> R = rotation_from_rpy(rpy);
  VectorX<Scalar> x(21);
  for (std::size_t k = 0; k < offsets.size(); ++k)
    x.template segment<3>(3 * static_cast<Eigen::Index>(k)) = position + R * offsets[k];
  return x;
}

template <typename Scalar>
struct PalmPose {
  Vector3<Scalar> position;
  Vector3<Scalar> rpy;
};

/// Current palm pose, in the same parameterisation pose_to_targets consumes.
template <typename Scalar>
PalmPose<Scalar> palm_pose(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                           const PalmFrame<Scalar>& palm)
{
  if (palm.frame == kBaseFrame) return {palm.origin, Vector3<Scalar>::Zero()};
  const auto frames = forward_frames(model, q);
  const auto& T = frames[static_cast<std::size_t>(palm.frame)];
  return {T * palm.origin, rpy_from_rotation<Scalar>(T.linear())};
}

}  // namespace fabricore
