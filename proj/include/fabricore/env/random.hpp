#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace fabricore::env {

using Rng = std::mt19937_64;

/// Uniform direction on the unit sphere (normalised Gaussian).
inline Eigen::Vector3d random_unit_vector(Rng& rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d v(n(rng), n(rng), n(rng));
    const double len = v.norm();
    if (len > 1e-12) return v / len;
  }
}

/// Uniformly distributed rotation (Shoemake).
inline Eigen::Quaterniond random_quaternion(Rng& rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  constexpr double two_pi = 6.283185307179586;
  return {a * std::sin(two_pi * u2), a * std::cos(two_pi * u2), b * std::sin(two_pi * u3), b * std::cos(two_pi * u3)};
}

}  // namespace fabricore::env
