#include "fabricore/collision.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace testing;

namespace {

// Brute-force surface distance: grid over every face, refined around the best hit.
double sampled_surface_distance(const Eigen::Vector3d& p, const Box<double>& b)
{
  double best = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    for (double side : {-1.0, 1.0}) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      double cu = 0, cv = 0, span_u = b.half_extents[u], span_v = b.half_extents[v];
      for (int level = 0; level < 6; ++level) {
        double local_best = std::numeric_limits<double>::infinity(), bu = cu, bv = cv;
        const int n = 40;
        for (int i = 0; i <= n; ++i) {
          for (int k = 0; k <= n; ++k) {
            Eigen::Vector3d s;
            s[axis] = side * b.half_extents[axis];
            s[u] = std::clamp(cu + span_u * (2.0 * i / n - 1), -b.half_extents[u], b.half_extents[u]);
            s[v] = std::clamp(cv + span_v * (2.0 * k / n - 1), -b.half_extents[v], b.half_extents[v]);
            const double d = (b.center + b.orientation * s - p).norm();
            if (d < local_best) {
              local_best = d;
              bu = s[u];
              bv = s[v];
            }
          }
        }
        best = std::min(best, local_best);
        cu = bu;
        cv = bv;
        span_u *= 0.1;
        span_v *= 0.1;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("sphere and halfspace distances")
{
  const auto d = signed_distance<double>(Eigen::Vector3d::Zero(), 0.2, Sphere<double>{Eigen::Vector3d(1, 0, 0), 0.3});
  CHECK(d.distance == doctest::Approx(0.5));
  CHECK((d.direction - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  const auto h = signed_distance<double>(Eigen::Vector3d(0, 0, 0.5), 0.2, Halfspace<double>{});
  CHECK(h.distance == doctest::Approx(0.3));
  CHECK((h.direction - Eigen::Vector3d(0, 0, -1)).norm() < 1e-15);
}

TEST_CASE("box distance matches surface sampling")
{
  std::mt19937_64 rng(21);
  Box<double> box;
  box.half_extents = Eigen::Vector3d::Constant(0.5);
  SUBCASE("centre inside a unit box")
  {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Vector3d c = uniform(rng, 3, -0.45, 0.45);
      const auto q = signed_distance<double>(c, 0.1, box);
      CHECK(q.distance < 0);
      CHECK(std::abs(q.distance - (-sampled_surface_distance(c, box) - 0.1)) < 1e-4);
      CHECK((c + (q.distance + 0.1) * q.direction - q.closest_point).norm() < 1e-12);
    }
  }
  SUBCASE("rotated box, centre outside")
  {
    box.center = Eigen::Vector3d(0.2, -0.1, 0.3);
    box.half_extents = Eigen::Vector3d(0.3, 0.2, 0.4);
    box.orientation = rotation_from_rpy<double>(Eigen::Vector3d(0.3, -0.5, 1.1));
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Vector3d c = box.center + uniform(rng, 3, -1.0, 1.0);
      const auto q = signed_distance<double>(c, 0.05, box);
      if (q.distance + 0.05 <= 0) continue;
      CHECK(std::abs(q.distance - (sampled_surface_distance(c, box) - 0.05)) < 1e-4);
      CHECK((q.direction - (q.closest_point - c).normalized()).norm() < 1e-12);
    }
  }
  SUBCASE("moving along the direction reduces the distance")
  {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Vector3d c = uniform(rng, 3, -1.0, 1.0);
      const auto q = signed_distance<double>(c, 0.1, box);
      const auto moved = signed_distance<double>(Eigen::Vector3d(c + 1e-4 * q.direction), 0.1, box);
      CHECK(moved.distance < q.distance);
    }
  }
}

TEST_CASE("degenerate centre uses the fallback direction")
{
  const auto q = signed_distance<double>(Eigen::Vector3d(1, 0, 0), 0.1, Sphere<double>{Eigen::Vector3d(1, 0, 0), 0.3});
  CHECK(q.degenerate);
  CHECK(q.direction.norm() == doctest::Approx(1.0));
}

TEST_CASE("query_all semantics")
{
  const auto m = spatial3();
  const Eigen::VectorXd q = Eigen::Vector3d(0.2, 0.3, -0.4);
  CollisionWorld<double> world;
  CHECK(query_all(m, q, world).empty());

  world.obstacles.push_back(Sphere<double>{Eigen::Vector3d(1, 1, 1), 0.2});
  const auto all = query_all(m, q, world);
  REQUIRE(all.size() == 2);
  const auto centers = sphere_centers(m, q);
  for (const auto& s : all) {
    REQUIRE(s.queries.size() == 1);
    const auto direct = signed_distance(centers[s.sphere], m.spheres()[s.sphere].radius, world.obstacles[0]);
    CHECK(s.queries[0].distance == direct.distance);
    CHECK(s.queries[0].lower_bounded == std::max(world.d_min, direct.distance));
  }

  SUBCASE("self pairs are an allowlist")
  {
    CollisionWorld<double> selfw;
    CHECK(query_all(m, q, selfw).empty());
    selfw.self_pairs.emplace_back(0, 1);
    const auto pairs = query_all(m, q, selfw);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].queries[0].distance == doctest::Approx(pairs[1].queries[0].distance));
  }
}

TEST_CASE("lower bound clamps penetration")
{
  DistanceQuery<double> q;
  q.distance = -0.2;
  q.bound_below(0.015);
  CHECK(q.lower_bounded == 0.015);
}

TEST_CASE("invalid primitives are rejected")
{
  Box<double> b;
  b.half_extents = Eigen::Vector3d(1, 0, 1);
  CHECK_THROWS_AS(validate(ObstaclePrimitive<double>(b)), ConfigError);
  CHECK_THROWS_AS(validate(ObstaclePrimitive<double>(Sphere<double>{Eigen::Vector3d::Zero(), -1})), ConfigError);
  CHECK_THROWS_AS(validate(ObstaclePrimitive<double>(Halfspace<double>{Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, 2)})),
                  ConfigError);
}
