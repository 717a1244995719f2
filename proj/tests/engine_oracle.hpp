#pragma once

#include "fabricore/fabric_engine.hpp"

#include <vector>

namespace testing {

using namespace fabricore;

/// Point position as a function of q alone, for finite differencing.
inline Eigen::Vector3d fd_point(const KinematicModel<double>& m, const Eigen::VectorXd& q, const BodyPoint<double>& p)
{
  return point_position(forward_frames(m, q), p);
}

inline Eigen::MatrixXd fd_jacobian(const KinematicModel<double>& m, const Eigen::VectorXd& q, const BodyPoint<double>& p)
{
  const double h = 1e-6;
  Eigen::MatrixXd J(3, q.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    Eigen::VectorXd qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    J.col(j) = (fd_point(m, qp, p) - fd_point(m, qm, p)) / (2 * h);
  }
  return J;
}

/// d/dt J(q + t qd) qd at t = 0, as a second difference of the point along the line.
inline Eigen::Vector3d fd_curvature(const KinematicModel<double>& m, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                    const BodyPoint<double>& p)
{
  const double h = 1e-4;
  return (fd_point(m, q + h * qd, p) - 2 * fd_point(m, q, p) + fd_point(m, q - h * qd, p)) / (h * h);
}

struct DenseSystem {
  Eigen::MatrixXd M;
  Eigen::VectorXd f;

  void add(const Eigen::MatrixXd& J, const FabricTermOutput<double>& t, const Eigen::VectorXd& curvature)
  {
    M += J.transpose() * t.metric * J;
    f += J.transpose() * t.metric * (t.accel - curvature);
  }

  Eigen::VectorXd solve() const { return M.fullPivLu().solve(f); }
};

/// Brute-force assembly: every term pulled back separately through finite-difference Jacobians.
inline DenseSystem dense_resolve(const KinematicModel<double>& m, const CollisionWorld<double>& world,
                                 const EngineConfig<double>& cfg, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Command<double>& cmd)
{
  const Eigen::Index n = q.size();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  DenseSystem sys{cfg.lambda_reg * I, zero};

  const Eigen::VectorXd posture_target = cfg.posture_target.size() ? cfg.posture_target : zero;
  sys.add(I, attraction_geometric_hd2<double>(q, qd, posture_target, cfg.posture), zero);
  sys.add(I, cspace_damping<double>(qd, cfg.cspace_damping), zero);

  JointLimitConfig<double> jl = cfg.joint_limits;
  if (jl.repulsion.size() == 0) jl.repulsion = Eigen::VectorXd::Ones(n);
  sys.add(-I, joint_limit_repulsion<double>(m.limits().upper - q, -qd, jl), zero);
  sys.add(I, joint_limit_repulsion<double>(q - m.limits().lower, qd, jl), zero);

  if (const auto* c = std::get_if<CspaceCommand<double>>(&cmd)) {
    sys.add(I, attraction_forced<double>(q, qd, c->joint_target, cfg.cspace_attraction), zero);
  } else {
    const auto& a = std::get<ActionCommand<double>>(cmd);
    const auto& basis = *cfg.pca_basis;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(basis.rank(), n);
    A.middleCols(cfg.hand_offset, basis.hand_dof()) = basis.components;
    const Eigen::VectorXd x = basis.components * (q.segment(cfg.hand_offset, basis.hand_dof()) - basis.mean);
    sys.add(A, attraction_forced<double>(x, A * qd, a.pca_target, cfg.pca_attraction), Eigen::VectorXd::Zero(A.rows()));

    const Eigen::Matrix3d R = rotation_from_rpy<double>(a.palm_rpy);
    Eigen::MatrixXd J(21, n);
    Eigen::VectorXd x_palm(21), target(21), curv(21);
    for (int k = 0; k < 7; ++k) {
      const BodyPoint<double> p{"", cfg.palm.frame, cfg.palm.origin + cfg.palm.offsets[static_cast<std::size_t>(k)]};
      J.middleRows(3 * k, 3) = fd_jacobian(m, q, p);
      x_palm.segment<3>(3 * k) = fd_point(m, q, p);
      curv.segment<3>(3 * k) = fd_curvature(m, q, qd, p);
      target.segment<3>(3 * k) = a.palm_position + R * cfg.palm.offsets[static_cast<std::size_t>(k)];
    }
    sys.add(J, attraction_forced<double>(x_palm, J * qd, target, cfg.palm_attraction), curv);
  }

  for (std::size_t s = 0; s < m.spheres().size(); ++s) {
    const auto& sp = m.spheres()[s];
    const BodyPoint<double> p{"", sp.frame, sp.offset};
    const Eigen::Vector3d c = fd_point(m, q, p);
    std::vector<DistanceQuery<double>> qs;
    for (const auto& ob : world.obstacles) qs.push_back(signed_distance(c, sp.radius, ob));
    for (const auto& [i, j] : world.self_pairs) {
      if (i != s && j != s) continue;
      const std::size_t other = i == s ? j : i;
      const auto& so = m.spheres()[other];
      const Eigen::Vector3d co = fd_point(m, q, BodyPoint<double>{"", so.frame, so.offset});
      qs.push_back(signed_distance(c, sp.radius, Sphere<double>{co, so.radius}));
    }
    for (auto& d : qs) d.bound_below(world.d_min);
    if (qs.empty()) continue;
    bool in_range = false;
    for (const auto& d : qs) in_range |= d.lower_bounded < cfg.collision.cutoff;
    if (!in_range) continue;
    const Eigen::MatrixXd J = fd_jacobian(m, q, p);
    const Eigen::Vector3d xd = J * qd;
    const Eigen::Vector3d curv = fd_curvature(m, q, qd, p);
    sys.add(J, collision_geometric<double>(qs, xd, cfg.collision), curv);
    sys.add(J, collision_forcing<double>(qs, xd, cfg.collision), curv);
  }
  return sys;
}

}  // namespace testing
