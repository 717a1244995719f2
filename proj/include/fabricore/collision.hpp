#pragma once

#include "fabricore/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

namespace fabricore {

template <typename Scalar>
struct Box {
  Vector3<Scalar> center = Vector3<Scalar>::Zero();
  Vector3<Scalar> half_extents = Vector3<Scalar>::Ones();
  Matrix3<Scalar> orientation = Matrix3<Scalar>::Identity();  // box frame -> world
};

template <typename Scalar>
struct Sphere {
  Vector3<Scalar> center = Vector3<Scalar>::Zero();
  Scalar radius = Scalar(1);
};

/// Solid region {p : (p - point) . normal <= 0}; `normal` points out of the solid.
template <typename Scalar>
struct Halfspace {
  Vector3<Scalar> point = Vector3<Scalar>::Zero();
  Vector3<Scalar> normal = Vector3<Scalar>::UnitZ();
};

template <typename Scalar>
using ObstaclePrimitive = std::variant<Box<Scalar>, Sphere<Scalar>, Halfspace<Scalar>>;

template <typename Scalar>
void validate(const ObstaclePrimitive<Scalar>& obstacle)
{
  std::visit(
      [](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Box<Scalar>>) {
          if (!(o.half_extents.minCoeff() > 0)) throw ConfigError("box half extents must be positive");
          if (!(o.orientation.transpose() * o.orientation).isIdentity(Scalar(1e-9)))
            throw ConfigError("box orientation must be a rotation");
        } else if constexpr (std::is_same_v<T, Sphere<Scalar>>) {
          if (!(o.radius > 0)) throw ConfigError("obstacle sphere radius must be positive");
        } else {
          if (std::abs(o.normal.norm() - Scalar(1)) > Scalar(1e-9))
            throw ConfigError("halfspace normal must be unit length");
        }
      },
      obstacle);
}

/**
 * Result of one sphere/body distance query.
 *
 * `direction` is the unit vector pointing from the robot sphere towards the
 * body: from the centre to the closest point when separated, and away from
 * the nearest surface point (into the body) when the centre penetrates.
 * Moving along +direction therefore always reduces the distance.
 */
template <typename Scalar>
struct DistanceQuery {
  Scalar distance = std::numeric_limits<Scalar>::infinity();  // negative = penetration
  Vector3<Scalar> closest_point = Vector3<Scalar>::Zero();    // on the body surface
  Vector3<Scalar> direction = Vector3<Scalar>::Zero();
  Scalar lower_bounded = std::numeric_limits<Scalar>::infinity();  // max(d_min, distance)
  bool degenerate = false;  // centre on the closest-point locus; direction is a fallback

  void bound_below(Scalar d_min) { lower_bounded = std::max(d_min, distance); }
};

namespace detail {

template <typename Scalar>
DistanceQuery<Scalar> query_from(const Vector3<Scalar>& center, Scalar radius,
                                 const Vector3<Scalar>& surface_point, Scalar center_distance,
                                 const Vector3<Scalar>& fallback)
{
  DistanceQuery<Scalar> out;
  out.distance = center_distance - radius;
  out.closest_point = surface_point;
  Vector3<Scalar> dir = surface_point - center;
  if (center_distance < 0) dir = -dir;
  const Scalar len = dir.norm();
  if (len < kDegenerate<Scalar>) {
    out.direction = fallback;
    out.degenerate = true;
  } else {
    out.direction = dir / len;
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
DistanceQuery<Scalar> signed_distance(const Vector3<Scalar>& center, Scalar radius, const Sphere<Scalar>& s)
{
  const Vector3<Scalar> delta = s.center - center;
  const Scalar len = delta.norm();
  DistanceQuery<Scalar> out;
  out.distance = len - s.radius - radius;
  if (len < kDegenerate<Scalar>) {
    out.direction = Vector3<Scalar>::UnitX();
    out.degenerate = true;
  } else {
    out.direction = delta / len;
  }
  out.closest_point = s.center - s.radius * out.direction;
  return out;
}

template <typename Scalar>
DistanceQuery<Scalar> signed_distance(const Vector3<Scalar>& center, Scalar radius, const Halfspace<Scalar>& h)
{
  DistanceQuery<Scalar> out;
  const Scalar height = (center - h.point).dot(h.normal);
  out.distance = height - radius;
  out.closest_point = center - height * h.normal;
  out.direction = -h.normal;
  return out;
}

template <typename Scalar>
DistanceQuery<Scalar> signed_distance(const Vector3<Scalar>& center, Scalar radius, const Box<Scalar>& b)
{
  const Vector3<Scalar> local = b.orientation.transpose() * (center - b.center);
  const Vector3<Scalar> clamped = local.cwiseMax(-b.half_extents).cwiseMin(b.half_extents);
  const bool inside = (local.cwiseAbs() - b.half_extents).maxCoeff() <= Scalar(0);
  if (!inside) {
    Eigen::Index out_axis = 0;
    (local.cwiseAbs() - b.half_extents).maxCoeff(&out_axis);
    const Vector3<Scalar> inward =
        b.orientation * ((local[out_axis] >= 0 ? Scalar(-1) : Scalar(1)) * Vector3<Scalar>::Unit(out_axis));
    const Vector3<Scalar> surface = b.center + b.orientation * clamped;
    return detail::query_from<Scalar>(center, radius, surface, (local - clamped).norm(), inward);
  }
  // Inside: nearest face wins.
  Eigen::Index axis = 0;
  const Vector3<Scalar> slack = b.half_extents - local.cwiseAbs();
  slack.minCoeff(&axis);
  Vector3<Scalar> surface_local = local;
  const Scalar sign = local[axis] >= 0 ? Scalar(1) : Scalar(-1);
  surface_local[axis] = sign * b.half_extents[axis];
  const Vector3<Scalar> inward = b.orientation * (-sign * Vector3<Scalar>::Unit(axis));
  return detail::query_from<Scalar>(center, radius, b.center + b.orientation * surface_local, -slack[axis], inward);
}

template <typename Scalar>
DistanceQuery<Scalar> signed_distance(const Vector3<Scalar>& center, Scalar radius,
                                      const ObstaclePrimitive<Scalar>& obstacle)
{
  return std::visit([&](const auto& o) { return signed_distance<Scalar>(center, radius, o); }, obstacle);
}

template <typename Scalar>
struct CollisionWorld {
  std::vector<ObstaclePrimitive<Scalar>> obstacles;
  std::vector<std::pair<std::size_t, std::size_t>> self_pairs;  // robot sphere indices, allowlist
  Scalar d_min = Scalar(0.015);
};

template <typename Scalar>
struct SphereQueries {
  std::size_t sphere = 0;
  Vector3<Scalar> center = Vector3<Scalar>::Zero();
  std::vector<DistanceQuery<Scalar>> queries;
  Scalar min_lower_bounded = std::numeric_limits<Scalar>::infinity();  // d-tilde
  Scalar min_distance = std::numeric_limits<Scalar>::infinity();
};

/// Every (sphere, obstacle) query and both directions of each allowed self pair, grouped per sphere.
template <typename Scalar>
std::vector<SphereQueries<Scalar>> query_all(const KinematicModel<Scalar>& model,
                                             const std::vector<Vector3<Scalar>>& centers,
                                             const CollisionWorld<Scalar>& world)
{
  const auto& spheres = model.spheres();
  std::vector<SphereQueries<Scalar>> out;
  if (world.obstacles.empty() && world.self_pairs.empty()) return out;
  std::vector<int> slot(spheres.size(), -1);
  auto entry = [&](std::size_t s) -> SphereQueries<Scalar>& {
    if (slot[s] < 0) {
      slot[s] = static_cast<int>(out.size());
      out.push_back({s, centers[s], {}, std::numeric_limits<Scalar>::infinity(),
                     std::numeric_limits<Scalar>::infinity()});
    }
    return out[static_cast<std::size_t>(slot[s])];
  };
  auto record = [&](std::size_t s, DistanceQuery<Scalar> q) {
    q.bound_below(world.d_min);
    auto& e = entry(s);
    e.min_lower_bounded = std::min(e.min_lower_bounded, q.lower_bounded);
    e.min_distance = std::min(e.min_distance, q.distance);
    e.queries.push_back(q);
  };
  if (!world.obstacles.empty()) {
    for (std::size_t s = 0; s < spheres.size(); ++s)
      for (const auto& ob : world.obstacles) record(s, signed_distance(centers[s], spheres[s].radius, ob));
  }
  for (const auto& [a, b] : world.self_pairs) {
    if (a >= spheres.size() || b >= spheres.size()) throw ConfigError("self-collision pair out of range");
    record(a, signed_distance(centers[a], spheres[a].radius, Sphere<Scalar>{centers[b], spheres[b].radius}));
    record(b, signed_distance(centers[b], spheres[b].radius, Sphere<Scalar>{centers[a], spheres[a].radius}));
  }
  return out;
}

template <typename Scalar>
std::vector<Vector3<Scalar>> sphere_centers(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q)
{
  const auto frames = forward_frames(model, q);
  std::vector<Vector3<Scalar>> c;
  c.reserve(model.spheres().size());
  for (const auto& s : model.spheres()) c.push_back(point_position(frames, BodyPoint<Scalar>{{}, s.frame, s.offset}));
  return c;
}

template <typename Scalar>
std::vector<SphereQueries<Scalar>> query_all(const KinematicModel<Scalar>& model, const VectorX<Scalar>& q,
                                             const CollisionWorld<Scalar>& world)
{
  return query_all(model, sphere_centers(model, q), world);
}

/// Smallest signed distance over all queries; +inf when there are none.
template <typename Scalar>
Scalar min_signed_distance(const std::vector<SphereQueries<Scalar>>& all)
{
  Scalar d = std::numeric_limits<Scalar>::infinity();
  for (const auto& s : all) d = std::min(d, s.min_distance);
  return d;
}

}  // namespace fabricore
