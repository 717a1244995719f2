#pragma once

#include "fabricore/kinematics.hpp"
#include "fabricore/pca_basis.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace fabricore {

enum class GripType { power, precision };

inline const char* to_string(GripType g) { return g == GripType::power ? "power" : "precision"; }

/// Human fingertip motion: each row is 4 stacked fingertip points (index, middle, ring, thumb) in the palm frame.
template <typename Scalar>
struct HumanGraspTrace {
  MatrixX<Scalar> points;  // n x 12, metres
  GripType grip = GripType::power;

  Eigen::Index size() const { return points.rows(); }
};

template <typename Scalar>
struct AdamParams {
  Scalar learning_rate = Scalar(0.05);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
  int iterations = 200;
};

template <typename Scalar>
struct RetargetConfig {
  Scalar scale = Scalar(1.6);
  Scalar regularization = Scalar(0.01);
  VectorX<Scalar> q_reg_power;
  VectorX<Scalar> q_reg_precision;
  Vector3<Scalar> focal_power = Vector3<Scalar>(0.06, 0.0, 0.05);
  Vector3<Scalar> focal_precision = Vector3<Scalar>(0.07, 0.01, 0.14);
  std::vector<std::string> fingertips{"index_tip", "middle_tip", "ring_tip", "thumb_tip"};
  AdamParams<Scalar> adam;

  /// Regularisation postures for the 16-joint four-finger hand.
  static RetargetConfig allegro_defaults()
  {
    RetargetConfig cfg;
    cfg.q_reg_precision.resize(16);
    cfg.q_reg_precision << 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1.0, 0.75, 0, 0;
    cfg.q_reg_power.resize(16);
    cfg.q_reg_power << 0, 1, 1, 1, 0, 1, 1, 1, 0, 1, 1, 1, 1.0, 0.75, 0, 0;
    return cfg;
  }

  const VectorX<Scalar>& q_reg(GripType g) const { return g == GripType::power ? q_reg_power : q_reg_precision; }
  const Vector3<Scalar>& focal(GripType g) const { return g == GripType::power ? focal_power : focal_precision; }
};

/// q_r = (tanh(q) + 1)/2 (upper - lower) + lower, strictly inside the limits.
template <typename Scalar>
VectorX<Scalar> saturate(const VectorX<Scalar>& q_free, const VectorX<Scalar>& lower, const VectorX<Scalar>& upper)
{
  return (Scalar(0.5) * (q_free.array().tanh() + Scalar(1)) * (upper - lower).array() + lower.array()).matrix();
}

/// Elementwise derivative of saturate.
template <typename Scalar>
VectorX<Scalar> saturate_derivative(const VectorX<Scalar>& q_free, const VectorX<Scalar>& lower,
                                    const VectorX<Scalar>& upper)
{
  const auto t = q_free.array().tanh();
  return (Scalar(0.5) * (Scalar(1) - t * t) * (upper - lower).array()).matrix();
}

/// Inverse of saturate for points strictly inside the limits.
template <typename Scalar>
VectorX<Scalar> unsaturate(const VectorX<Scalar>& q, const VectorX<Scalar>& lower, const VectorX<Scalar>& upper)
{
  const auto u = (Scalar(2) * (q - lower).array() / (upper - lower).array() - Scalar(1))
                     .cwiseMax(Scalar(-1) + Scalar(1e-12))
                     .cwiseMin(Scalar(1) - Scalar(1e-12));
  return u.atanh().matrix();
}

/**
 * Hand-side view of a kinematic model for retargeting: the model and the
 * fingertip points whose stacked positions form x_r.
 */
template <typename Scalar>
struct RetargetHand {
  const KinematicModel<Scalar>* model = nullptr;
  std::vector<BodyPoint<Scalar>> fingertips;

  RetargetHand(const KinematicModel<Scalar>& m, const std::vector<std::string>& tip_names) : model(&m)
  {
    for (const auto& name : tip_names) fingertips.push_back(m.body_points()[m.point_index(name)]);
  }

  VectorX<Scalar> tips(const VectorX<Scalar>& q) const { return forward_points<Scalar>(*model, q, fingertips); }
};

/**
 * gamma |x_r - s x_h|^2 + (1 - gamma) |x_r - x_c|^2 + lambda |q_r - q_reg|
 * with q_r = saturate(q_free) and x_c the focal point stacked once per fingertip.
 */
template <typename Scalar>
Scalar retarget_loss(const VectorX<Scalar>& q_free, const VectorX<Scalar>& x_h, Scalar gamma,
                     GripType grip, const RetargetConfig<Scalar>& cfg, const RetargetHand<Scalar>& hand)
{
  const auto& lim = hand.model->limits();
  const VectorX<Scalar> q_r = saturate(q_free, lim.lower, lim.upper);
  const VectorX<Scalar> x_r = hand.tips(q_r);
  VectorX<Scalar> x_c(x_r.size());
  for (Eigen::Index i = 0; i < x_r.size() / 3; ++i) x_c.template segment<3>(3 * i) = cfg.focal(grip);
  return gamma * (x_r - cfg.scale * x_h).squaredNorm() + (Scalar(1) - gamma) * (x_r - x_c).squaredNorm() +
         cfg.regularization * (q_r - cfg.q_reg(grip)).norm();
}

/// Central-difference gradient.
template <typename Scalar>
VectorX<Scalar> finite_difference_gradient(const std::function<Scalar(const VectorX<Scalar>&)>& f,
                                           const VectorX<Scalar>& x, Scalar h = Scalar(1e-5))
{
  VectorX<Scalar> g(x.size());
  VectorX<Scalar> probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const Scalar fp = f(probe);
    probe[i] = x[i] - h;
    const Scalar fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (Scalar(2) * h);
  }
  return g;
}

template <typename Scalar>
struct AdamResult {
  VectorX<Scalar> x;
  Scalar loss = std::numeric_limits<Scalar>::infinity();
  int best_iteration = 0;
};

/**
 * Adam with bias correction and a fixed iteration budget. Returns the best
 * iterate seen. Without a gradient callback, gradients come from central
 * differences (h = 1e-5).
 */
template <typename Scalar>
AdamResult<Scalar> adam_minimize(const std::function<Scalar(const VectorX<Scalar>&)>& loss, VectorX<Scalar> x,
                                 const AdamParams<Scalar>& params,
                                 std::function<VectorX<Scalar>(const VectorX<Scalar>&)> gradient = {})
{
  if (!gradient) gradient = [&](const VectorX<Scalar>& p) { return finite_difference_gradient<Scalar>(loss, p); };
  VectorX<Scalar> m = VectorX<Scalar>::Zero(x.size());
  VectorX<Scalar> v = VectorX<Scalar>::Zero(x.size());
  AdamResult<Scalar> best{x, loss(x), 0};
  if (!std::isfinite(best.loss)) throw std::runtime_error("adam: non-finite loss at the initial point");
  Scalar b1t = 1, b2t = 1;
  for (int t = 1; t <= params.iterations; ++t) {
    const VectorX<Scalar> g = gradient(x);
    if (!g.allFinite()) throw std::runtime_error("adam: non-finite gradient at iteration " + std::to_string(t));
    m = params.beta1 * m + (Scalar(1) - params.beta1) * g;
    v = params.beta2 * v + (Scalar(1) - params.beta2) * g.cwiseAbs2();
    b1t *= params.beta1;
    b2t *= params.beta2;
    const VectorX<Scalar> m_hat = m / (Scalar(1) - b1t);
    const VectorX<Scalar> v_hat = v / (Scalar(1) - b2t);
    x -= params.learning_rate * m_hat.cwiseQuotient((v_hat.array().sqrt() + params.epsilon).matrix());
    const Scalar value = loss(x);
    if (!std::isfinite(value)) throw std::runtime_error("adam: non-finite loss at iteration " + std::to_string(t));
    if (value < best.loss) best = {x, value, t};
  }
  return best;
}

/// Blend weight for datapoint i of n: 1 - (i + 1)/n, reaching 0 on the last frame.
template <typename Scalar>
Scalar blend_factor(Eigen::Index i, Eigen::Index n)
{
  return Scalar(1) - Scalar(i + 1) / Scalar(n);
}

/**
 * Retarget one trace, one datapoint at a time. The first datapoint starts at
 * q_free = 0; later ones warm-start from the previous solution. Rows of the
 * result are saturated joint angles.
 */
template <typename Scalar>
MatrixX<Scalar> retarget_trace(const HumanGraspTrace<Scalar>& trace, const RetargetHand<Scalar>& hand,
                               const RetargetConfig<Scalar>& cfg)
{
  const Eigen::Index n = trace.size();
  const Eigen::Index dof = hand.model->dof();
  if (n < 2) throw ConfigError("grasp trace needs at least two datapoints");
  if (trace.points.cols() != 3 * static_cast<Eigen::Index>(hand.fingertips.size()))
    throw ConfigError("grasp trace width does not match the fingertip count");
  if (!trace.points.allFinite()) throw ConfigError("grasp trace contains non-finite values");
  if (cfg.q_reg(trace.grip).size() != dof) throw ConfigError("q_reg does not match the hand");
  const auto& lim = hand.model->limits();
  MatrixX<Scalar> out(n, dof);
  VectorX<Scalar> q_free = VectorX<Scalar>::Zero(dof);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VectorX<Scalar> x_h = trace.points.row(i).transpose();
    const Scalar gamma = blend_factor<Scalar>(i, n);
    std::function<Scalar(const VectorX<Scalar>&)> loss = [&](const VectorX<Scalar>& q) {
      return retarget_loss<Scalar>(q, x_h, gamma, trace.grip, cfg, hand);
    };
    q_free = adam_minimize<Scalar>(loss, q_free, cfg.adam).x;
    out.row(i) = saturate(q_free, lim.lower, lim.upper).transpose();
  }
  return out;
}

/**
 * PCA over the rows of `data` (N x h): mean-centred covariance (1/N)
 * eigendecomposition, top-k rows kept. Zero eigenvalues are allowed.
 */
template <typename Scalar>
PcaBasis<Scalar> fit_pca(const MatrixX<Scalar>& data, Eigen::Index k)
{
  const Eigen::Index N = data.rows();
  const Eigen::Index h = data.cols();
  if (k < 1 || k > h) throw ConfigError("PCA rank must be between 1 and the data width");
  if (N < k) throw ConfigError("PCA needs at least k samples");
  if (!data.allFinite()) throw ConfigError("PCA data contains non-finite values");
  PcaBasis<Scalar> basis;
  basis.mean = data.colwise().mean().transpose();
  const MatrixX<Scalar> centered = data.rowwise() - basis.mean.transpose();
  const MatrixX<Scalar> cov = (centered.transpose() * centered) / Scalar(N);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(cov);
  // Eigen sorts ascending.
  basis.eigenvalues = eig.eigenvalues().reverse();
  const MatrixX<Scalar> vectors = eig.eigenvectors().rowwise().reverse();
  basis.components = vectors.leftCols(k).transpose();
  // Sign convention: largest-magnitude entry of each component is positive.
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::Index idx = 0;
    basis.components.row(r).cwiseAbs().maxCoeff(&idx);
    if (basis.components(r, idx) < 0) basis.components.row(r) *= Scalar(-1);
  }
  const Scalar total = basis.eigenvalues.sum();
  basis.explained_variance_ratio = total > 0 ? basis.eigenvalues.head(k).sum() / total : Scalar(1);
  return basis;
}

/// Mean over samples of the squared residual after projecting onto the basis and back.
template <typename Scalar>
Scalar reconstruction_error(const PcaBasis<Scalar>& basis, const MatrixX<Scalar>& data)
{
  const MatrixX<Scalar> centered = data.rowwise() - basis.mean.transpose();
  const MatrixX<Scalar> residual = centered - centered * basis.components.transpose() * basis.components;
  return residual.squaredNorm() / Scalar(data.rows());
}

}  // namespace fabricore
