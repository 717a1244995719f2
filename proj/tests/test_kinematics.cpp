#include "support.hpp"

#include <doctest.h>

using namespace testing;

namespace {

// Independent oracle: 4x4 homogeneous matrices built with Rodrigues' formula.
Eigen::Matrix4d rodrigues(const Eigen::Vector3d& axis_in, double angle)
{
  const Eigen::Vector3d k = axis_in.normalized();
  Eigen::Matrix3d K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + std::sin(angle) * K + (1 - std::cos(angle)) * K * K;
  return T;
}

Eigen::Vector3d oracle_point(const KinematicModel<double>& m, const Eigen::VectorXd& q, const BodyPoint<double>& p)
{
  std::vector<Eigen::Matrix4d> T(m.joints().size());
  for (std::size_t j = 0; j < T.size(); ++j) {
    const auto& jt = m.joints()[j];
    const Eigen::Matrix4d parent = jt.parent == kBaseFrame ? Eigen::Matrix4d::Identity()
                                                           : T[static_cast<std::size_t>(jt.parent)];
    T[j] = parent * jt.origin.matrix() * rodrigues(jt.axis, q[static_cast<Eigen::Index>(j)]);
  }
  Eigen::Vector4d h(p.offset.x(), p.offset.y(), p.offset.z(), 1.0);
  const Eigen::Matrix4d F = p.frame == kBaseFrame ? Eigen::Matrix4d::Identity() : T[static_cast<std::size_t>(p.frame)];
  return (F * h).head<3>();
}

}  // namespace

TEST_CASE("single joint forward kinematics")
{
  const auto m = single_joint();
  const auto p = m.body_points()[0];
  const Eigen::VectorXd q0 = Eigen::VectorXd::Zero(1);
  CHECK(forward_points<double>(m, q0, std::vector{p}).isApprox(Eigen::Vector3d(1, 0, 0)));
  const Eigen::VectorXd q1 = Eigen::VectorXd::Constant(1, std::numbers::pi / 2);
  CHECK((forward_points<double>(m, q1, std::vector{p}) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("forward kinematics matches transform stacking")
{
  std::mt19937_64 rng(7);
  const auto m = spatial3();
  const auto planar = io::load_model(source_path("configs/planar3.json"));
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd q = uniform(rng, 3, -2.5, 2.5);
    for (const auto& model : {&m, &planar}) {
      const auto frames = forward_frames(*model, q);
      for (const auto& p : model->body_points())
        CHECK((point_position(frames, p) - oracle_point(*model, q, p)).norm() < 1e-12);
    }
  }
}

TEST_CASE("jacobian columns")
{
  const auto m = single_joint();
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const std::vector<std::size_t> p{0}, axis{1};
  CHECK(jacobian(m, q, std::span<const std::size_t>(p)).isApprox(Eigen::Vector3d(0, 1, 0)));
  CHECK(jacobian(m, q, std::span<const std::size_t>(axis)).norm() == 0.0);
}

TEST_CASE("jacobian matches central differences")
{
  std::mt19937_64 rng(11);
  const auto m = spatial3();
  const std::vector<std::size_t> ids{0, 1};
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = uniform(rng, 3, -2.0, 2.0);
    const Eigen::MatrixXd J = jacobian(m, q, std::span<const std::size_t>(ids));
    Eigen::MatrixXd Jfd(6, 3);
    const auto pts = m.resolve_points(ids);
    for (Eigen::Index j = 0; j < 3; ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      Jfd.col(j) = (forward_points<double>(m, qp, pts) - forward_points<double>(m, qm, pts)) / (2 * h);
    }
    CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("curvature term")
{
  const auto m = single_joint();
  const std::vector<std::size_t> p{0};
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  SUBCASE("zero velocity") { CHECK(curvature_term(m, q, Eigen::VectorXd(Eigen::VectorXd::Zero(1)), std::span<const std::size_t>(p)).norm() == 0.0); }
  SUBCASE("centripetal acceleration on the unit circle")
  {
    const Eigen::VectorXd c = curvature_term(m, q, Eigen::VectorXd(Eigen::VectorXd::Ones(1)), std::span<const std::size_t>(p));
    CHECK((c - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-6);
  }
  SUBCASE("matches second difference of the point along q(t) = q + t qd")
  {
    std::mt19937_64 rng(3);
    const auto s = spatial3();
    const std::vector<std::size_t> ids{0};
    const auto pts = s.resolve_points(ids);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd q0 = uniform(rng, 3, -2, 2), qd = uniform(rng, 3, -1, 1);
      const double h = 1e-4;
      const Eigen::VectorXd acc = (forward_points<double>(s, Eigen::VectorXd(q0 + h * qd), pts) -
                                   2 * forward_points<double>(s, q0, pts) +
                                   forward_points<double>(s, Eigen::VectorXd(q0 - h * qd), pts)) /
                                  (h * h);
      CHECK((curvature_term(s, q0, qd, std::span<const std::size_t>(ids)) - acc).norm() < 1e-5);
    }
  }
}

TEST_CASE("model validation")
{
  std::vector<Joint<double>> joints{{"a", 1, Eigen::Vector3d::UnitZ(), Eigen::Isometry3d::Identity()},
                                    {"b", kBaseFrame, Eigen::Vector3d::UnitZ(), Eigen::Isometry3d::Identity()}};
  JointLimits<double> lim{Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)};
  CHECK_THROWS_AS(KinematicModel<double>(joints, lim), ConfigError);
  joints[0].parent = kBaseFrame;
  lim.lower[1] = 2;
  CHECK_THROWS_AS(KinematicModel<double>(joints, lim), ConfigError);
  lim.lower[1] = -1;
  joints[1].axis.setZero();
  CHECK_THROWS_AS(KinematicModel<double>(joints, lim), ConfigError);
  joints[1].axis = Eigen::Vector3d::UnitX();
  const KinematicModel<double> ok(joints, lim);
  CHECK_THROWS_AS(forward_frames(ok, Eigen::VectorXd(Eigen::VectorXd::Zero(3))), ConfigError);
  CHECK_THROWS_AS(ok.frame_index("nope"), ConfigError);
}

TEST_CASE("bundled models load")
{
  CHECK(io::load_model(source_path("configs/desk23.json")).dof() == 23);
  CHECK(io::load_model(source_path("configs/hand16.json")).dof() == 16);
  CHECK(io::load_model(source_path("configs/planar3.json")).dof() == 3);
}
