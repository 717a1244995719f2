#include "fabricore/taskmaps.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("identity taskmap")
{
  const auto m = spatial3();
  const JointState<double> s{Eigen::Vector3d(0.1, -0.2, 0.3), Eigen::Vector3d(1, 2, 3)};
  const auto e = eval(Taskmap<double>::identity(), m, s);
  CHECK(e.x == s.q);
  CHECK(e.J.isIdentity());
  CHECK(e.curvature.isZero());
  CHECK(e.xd == s.qd);
}

TEST_CASE("joint limit taskmaps are affine")
{
  std::vector<Joint<double>> joints{{"a", kBaseFrame, Eigen::Vector3d::UnitZ(), Eigen::Isometry3d::Identity()}};
  JointLimits<double> lim{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 2.0),
                          Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)};
  const KinematicModel<double> m(joints, lim);
  const JointState<double> s{Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.7)};
  const auto up = eval(Taskmap<double>::joint_limit_upper(), m, s);
  CHECK(up.x[0] == doctest::Approx(1.5));
  CHECK(up.xd[0] == doctest::Approx(-0.7));
  const auto lo = eval(Taskmap<double>::joint_limit_lower(), m, s);
  CHECK(lo.x[0] == doctest::Approx(1.5));
  CHECK(lo.xd[0] == doctest::Approx(0.7));
}

TEST_CASE("pca taskmap embedding")
{
  PcaBasis<double> basis;
  std::mt19937_64 rng(5);
  basis.components = Eigen::MatrixXd(Eigen::MatrixXd::Random(16, 16).householderQr().householderQ()).topRows(5);
  basis.mean = Eigen::VectorXd::Zero(16);
  const auto desk = io::load_model(source_path("configs/desk23.json"));
  const auto map = pca_taskmap(basis, 23, 7);
  CHECK(map.matrix.leftCols(7).isZero());
  CHECK(map.matrix.rightCols(16) == basis.components);

  Eigen::VectorXd q = Eigen::VectorXd::Zero(23);
  q.head(7) = uniform(rng, 7, -1, 1);
  const auto e = eval(map, desk, JointState<double>{q, Eigen::VectorXd::Zero(23)});
  CHECK(e.x.norm() == 0.0);

  const auto hand_only = pca_taskmap(basis, 16, 0);
  CHECK(hand_only.matrix == basis.components);
  CHECK_THROWS_AS(pca_taskmap(basis, 23, 8), ConfigError);

  SUBCASE("mean-centred basis projects through the affine offset")
  {
    basis.mean = uniform(rng, 16, -0.3, 0.3);
    const auto shifted = pca_taskmap(basis, 23, 7);
    Eigen::VectorXd qq = uniform(rng, 23, -0.5, 0.5);
    const auto ev = eval(shifted, desk, JointState<double>{qq, Eigen::VectorXd::Zero(23)});
    CHECK((ev.x - basis.project(qq.tail(16))).norm() < 1e-12);
  }
}

TEST_CASE("palm pose targets")
{
  const auto offsets = palm_offsets<double>(0.1);
  SUBCASE("translation shifts every point")
  {
    const Eigen::Vector3d t(0.3, -0.2, 0.5);
    const auto x = pose_to_targets<double>(t, Eigen::Vector3d::Zero(), offsets);
    for (int k = 0; k < 7; ++k) CHECK((x.segment<3>(3 * k) - (t + offsets[static_cast<std::size_t>(k)])).norm() < 1e-15);
  }
  SUBCASE("yaw by pi flips +x onto -x, origin fixed")
  {
    const auto x = pose_to_targets<double>(Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, std::numbers::pi), offsets);
    CHECK(x.segment<3>(0).norm() < 1e-15);
    CHECK((x.segment<3>(3) - Eigen::Vector3d(-0.1, 0, 0)).norm() < 1e-15);
  }
  SUBCASE("current pose is a fixed point")
  {
    const auto desk = io::load_model(source_path("configs/desk23.json"));
    PalmFrame<double> palm{desk.frame_index("arm_7"), Eigen::Vector3d(0, 0, 0.12), offsets};
    std::mt19937_64 rng(9);
    const auto map = palm_pose_taskmap(desk, palm);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd q = uniform(rng, 23, -1, 1);
      const auto pose = palm_pose(desk, q, palm);
      const auto target = pose_to_targets(pose.position, pose.rpy, palm.offsets);
      const auto e = eval(map, desk, JointState<double>{q, Eigen::VectorXd::Zero(23)});
      CHECK((e.x - target).norm() < 1e-12);
    }
  }
}

TEST_CASE("linear taskmap validation")
{
  CHECK_THROWS_AS(Taskmap<double>::linear(Eigen::MatrixXd::Ones(4, 3)), ConfigError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 3);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(Taskmap<double>::linear(bad), ConfigError);
}
