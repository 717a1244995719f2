#pragma once

#include "fabricore/fabric_terms.hpp"
#include "fabricore/log.hpp"
#include "fabricore/taskmaps.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace fabricore {

/// The 11-D action: palm position (m), palm extrinsic XYZ Euler angles (rad), eigengrasp target.
template <typename Scalar>
struct ActionCommand {
  static constexpr Eigen::Index kSize = 11;

  Vector3<Scalar> palm_position = Vector3<Scalar>::Zero();
  Vector3<Scalar> palm_rpy = Vector3<Scalar>::Zero();
  VectorX<Scalar> pca_target = VectorX<Scalar>::Zero(5);

  static ActionCommand from_vector(const VectorX<Scalar>& a)
  {
    if (a.size() != kSize) throw ConfigError("action must have 11 entries");
    if (!a.allFinite()) throw ConfigError("action must be finite");
    return {a.template head<3>(), a.template segment<3>(3), a.tail(5)};
  }

  VectorX<Scalar> to_vector() const
  {
    VectorX<Scalar> a(kSize);
    a << palm_position, palm_rpy, pca_target;
    return a;
  }
};

/// Joint-position target for the cspace action mode.
template <typename Scalar>
struct CspaceCommand {
  VectorX<Scalar> joint_target;
};

template <typename Scalar>
using Command = std::variant<ActionCommand<Scalar>, CspaceCommand<Scalar>>;

enum class ActionMode { pca_pose, cspace };

template <typename Scalar>
struct StepDiagnostics {
  Scalar alpha = Scalar(0);  // largest limiter damping used during the step
  int clamped = 0;           // joints clamped back into range after integration
  int floored = 0;           // joint-limit distances floored inside the barrier term
  Scalar min_distance = std::numeric_limits<Scalar>::infinity();
};

/**
 * Fabric state. q streams out as the PD position target; the matching
 * velocity target is always zero.
 */
template <typename Scalar>
struct FabricState {
  VectorX<Scalar> q, qd, qdd;
  std::uint64_t step = 0;
  std::optional<Command<Scalar>> last_action;
  StepDiagnostics<Scalar> diagnostics;

  static FabricState at_rest(const VectorX<Scalar>& q)
  {
    const Eigen::Index n = q.size();
    return {q, VectorX<Scalar>::Zero(n), VectorX<Scalar>::Zero(n), 0, std::nullopt, {}};
  }
};

template <typename Scalar>
struct EngineConfig {
  Scalar dt = Scalar(1) / Scalar(60);
  int action_repeat = 4;
  Scalar lambda_reg = Scalar(1e-6);
  Scalar cspace_damping = Scalar(0);
  ActionMode mode = ActionMode::pca_pose;

  CollisionTermConfig<Scalar> collision;
  AttractionConfig<Scalar> pca_attraction{1, 40, 10, 12};
  AttractionConfig<Scalar> palm_attraction{1, 40, 10, 12};
  AttractionConfig<Scalar> cspace_attraction{1, 40, 10, 12};
  AttractionConfig<Scalar> posture{1, 1, 10, 0};
  VectorX<Scalar> posture_target;  // empty: zero configuration
  JointLimitConfig<Scalar> joint_limits;  // empty repulsion: ones

  PalmFrame<Scalar> palm;
  std::optional<PcaBasis<Scalar>> pca_basis;
  Eigen::Index hand_offset = 0;

  Scalar alpha_max = Scalar(1e8);
  Scalar limiter_tolerance = Scalar(1e-4);
  int limiter_iterations = 60;
};

/// q-acc limits that also bound jerk: min(acc, dt * jerk / (2 acc)).
template <typename Scalar>
VectorX<Scalar> effective_accel_limits(const VectorX<Scalar>& accel, const VectorX<Scalar>& jerk, Scalar dt)
{
  return accel.cwiseMin((dt * jerk).cwiseQuotient(Scalar(2) * accel));
}

template <typename Scalar>
struct LimitedAccel {
  VectorX<Scalar> qdd;
  Scalar alpha = Scalar(0);
  int iterations = 0;
};

/**
 * Shrink q-acc = (M + alpha I)^-1 f until every joint is within its limit.
 * alpha = 0 when the raw solution already fits. Otherwise alpha is bisected
 * until the worst joint sits in [1 - tol, 1] of its limit. The returned
 * acceleration always satisfies the limits.
 */
template <typename Scalar>
LimitedAccel<Scalar> limit_accel_jerk(const VectorX<Scalar>& qdd_raw, const MatrixX<Scalar>& M,
                                      const VectorX<Scalar>& f, const VectorX<Scalar>& limits,
                                      Scalar tolerance = Scalar(1e-4), int max_iterations = 60,
                                      Scalar alpha_max = Scalar(1e8))
{
  auto ratio = [&](const VectorX<Scalar>& a) { return a.cwiseAbs().cwiseQuotient(limits).maxCoeff(); };
  if (ratio(qdd_raw) <= Scalar(1)) return {qdd_raw, Scalar(0), 0};

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(M);
  const VectorX<Scalar> ft = eig.eigenvectors().transpose() * f;
  auto solve = [&](Scalar alpha) -> VectorX<Scalar> {
    return eig.eigenvectors() * ft.cwiseQuotient((eig.eigenvalues().array() + alpha).matrix());
  };

  Scalar lo = 0, hi = 1;
  VectorX<Scalar> best = solve(hi);
  int it = 0;
  while (ratio(best) > Scalar(1)) {
    lo = hi;
    hi *= 10;
    if (hi > alpha_max) {
      logging::warn("acceleration limiter: alpha_max reached, clamping elementwise");
      return {best.cwiseMax(-limits).cwiseMin(limits), alpha_max, it};
    }
    best = solve(hi);
    ++it;
  }
  for (; it < max_iterations; ++it) {
    if (ratio(best) >= Scalar(1) - tolerance) break;
    const Scalar mid = Scalar(0.5) * (lo + hi);
    VectorX<Scalar> trial = solve(mid);
    if (ratio(trial) > Scalar(1)) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(trial);
    }
  }
  return {best, hi, it};
}

/// Result of one explicit-midpoint step; `accel` is the midpoint acceleration that was applied.
template <typename Scalar>
struct MidpointStep {
  VectorX<Scalar> q, qd, accel;
};

/**
 * Explicit-midpoint RK2 for q'' = accel(q, q'):
 *   k1 = accel(q, qd), k2 = accel(q + dt/2 qd, qd + dt/2 k1),
 *   q+ = q + dt (qd + dt/2 k1), qd+ = qd + dt k2.
 * Exact for constant acceleration.
 */
template <typename Scalar, typename AccelFn>
MidpointStep<Scalar> integrate_midpoint(const VectorX<Scalar>& q, const VectorX<Scalar>& qd, Scalar dt,
                                        AccelFn&& accel)
{
  const VectorX<Scalar> k1 = accel(q, qd);
  const VectorX<Scalar> qd_mid = qd + Scalar(0.5) * dt * k1;
  VectorX<Scalar> k2 = accel(VectorX<Scalar>(q + Scalar(0.5) * dt * qd), qd_mid);
  return {q + dt * qd_mid, qd + dt * k2, std::move(k2)};
}

template <typename Scalar>
struct Resolution {
  VectorX<Scalar> qdd;
  MatrixX<Scalar> metric;  // M_q
  VectorX<Scalar> force;   // f_q
  Scalar min_distance = std::numeric_limits<Scalar>::infinity();
  int floored = 0;
};

template <typename Scalar>
struct TrajectorySample {
  Scalar t = 0;
  VectorX<Scalar> q, qd, qdd;
  Scalar min_distance = std::numeric_limits<Scalar>::infinity();
  Scalar alpha = 0;
  int clamped = 0;
};

template <typename Scalar>
struct Trajectory {
  std::vector<TrajectorySample<Scalar>> samples;
  std::size_t pulls = 0;
  std::optional<std::string> error;
};

template <typename Scalar>
struct BatchResult {
  std::vector<FabricState<Scalar>> states;
  std::vector<std::optional<std::string>> faults;  // per index; faulted states are returned unchanged
};

/**
 * Geometric-fabric engine over one robot model and world.
 *
 * Terms are pulled back into joint space and resolved by metric-weighted
 * least squares:
 *   M_q = sum J' M J + lambda I,  f_q = sum J' M (xdd - Jd qd),  qdd = M_q^-1 f_q.
 * Each step limits qdd, integrates with explicit-midpoint RK2 and clamps q
 * into the joint range.
 */
template <typename Scalar>
class FabricEngine {
public:
  FabricEngine(KinematicModel<Scalar> model, CollisionWorld<Scalar> world, EngineConfig<Scalar> cfg)
      : model_(std::move(model)), world_(std::move(world)), cfg_(std::move(cfg))
  {
    const Eigen::Index n = model_.dof();
    if (!(cfg_.dt > 0)) throw ConfigError("dt must be positive");
    if (cfg_.action_repeat < 1) throw ConfigError("action_repeat must be at least 1");
    if (!(cfg_.lambda_reg >= 0)) throw ConfigError("lambda_reg must be non-negative");
    if (!(cfg_.cspace_damping >= 0)) throw ConfigError("cspace damping must be non-negative");
    cfg_.collision.validate();
    cfg_.pca_attraction.validate();
    cfg_.palm_attraction.validate();
    cfg_.cspace_attraction.validate();
    cfg_.posture.validate();
    if (cfg_.posture_target.size() == 0) cfg_.posture_target = VectorX<Scalar>::Zero(n);
    if (cfg_.posture_target.size() != n) throw ConfigError("posture target has the wrong dimension");
    if (cfg_.joint_limits.repulsion.size() == 0) cfg_.joint_limits.repulsion = VectorX<Scalar>::Ones(n);
    cfg_.joint_limits.validate(n);
    for (const auto& ob : world_.obstacles) validate(ob);
    if (!(world_.d_min > 0)) throw ConfigError("d_min must be positive");
    for (const auto& [a, b] : world_.self_pairs)
      if (a >= model_.spheres().size() || b >= model_.spheres().size() || a == b)
        throw ConfigError("invalid self-collision pair");

    if (cfg_.mode == ActionMode::pca_pose) {
      if (!cfg_.pca_basis) throw ConfigError("pca_pose mode needs a PCA basis");
      pca_map_ = pca_taskmap(*cfg_.pca_basis, n, cfg_.hand_offset);
      palm_map_ = palm_pose_taskmap(model_, cfg_.palm);
    }
    accel_limits_ = effective_accel_limits(model_.limits().accel, model_.limits().jerk, cfg_.dt);
    collision_points_ = model_.sphere_centers();
  }

  const KinematicModel<Scalar>& model() const { return model_; }
  const CollisionWorld<Scalar>& world() const { return world_; }
  const EngineConfig<Scalar>& config() const { return cfg_; }
  const VectorX<Scalar>& effective_limits() const { return accel_limits_; }

  /// Unlimited resolved acceleration plus the assembled joint-space system.
  Resolution<Scalar> resolve(const VectorX<Scalar>& q, const VectorX<Scalar>& qd, const Command<Scalar>& command) const
  {
    const Eigen::Index n = model_.dof();
    if (q.size() != n || qd.size() != n) throw ConfigError("state dimension does not match the model");
    Resolution<Scalar> out;
    out.metric = cfg_.lambda_reg * MatrixX<Scalar>::Identity(n, n);
    out.force = VectorX<Scalar>::Zero(n);
    auto& M = out.metric;
    auto& f = out.force;

    auto check = [](const FabricTermOutput<Scalar>& t, const char* name, long index = -1) {
      if (!t.metric.allFinite() || !t.accel.allFinite()) {
        std::string what = std::string("non-finite output from fabric term '") + name;
        if (index >= 0) what += "[" + std::to_string(index) + "]";
        throw EngineFault(what + "'");
      }
    };
    // Identity-map terms.
    auto add_identity = [&](const FabricTermOutput<Scalar>& t) {
      M += t.metric;
      f.noalias() += t.metric * t.accel;
    };
    // Diagonal-metric terms on x = +-q + c.
    auto add_signed_diag = [&](const FabricTermOutput<Scalar>& t, Scalar sign) {
      M.diagonal() += t.metric.diagonal();
      f += sign * t.metric.diagonal().cwiseProduct(t.accel);
    };
    auto add_pullback = [&](const auto& J, const FabricTermOutput<Scalar>& t, const auto& curvature) {
      const MatrixX<Scalar> JtM = J.transpose() * t.metric;
      M.noalias() += JtM * J;
      f.noalias() += JtM * (t.accel - curvature);
    };

    // Posture and cspace damping.
    {
      auto posture = attraction_geometric_hd2<Scalar>(q, qd, cfg_.posture_target, cfg_.posture);
      check(posture, "posture");
      add_identity(posture);
      auto damping = cspace_damping<Scalar>(qd, cfg_.cspace_damping);
      check(damping, "cspace_damping");
      add_identity(damping);
    }
    // Joint limits.
    {
      int floored_upper = 0, floored_lower = 0;
      const JointLimitConfig<Scalar>& jl = cfg_.joint_limits;
      auto upper = joint_limit_repulsion<Scalar>(model_.limits().upper - q, -qd, jl, &floored_upper);
      check(upper, "joint_limit_upper");
      add_signed_diag(upper, Scalar(-1));
      auto lower = joint_limit_repulsion<Scalar>(q - model_.limits().lower, qd, jl, &floored_lower);
      check(lower, "joint_limit_lower");
      add_signed_diag(lower, Scalar(1));
      out.floored = floored_upper + floored_lower;
      if (out.floored > 0) logging::debug("joint-limit distance floored for " + std::to_string(out.floored) + " joint(s)");
    }

    // Body-point work shares one set of frames and one curvature difference.
    const bool pose_mode = cfg_.mode == ActionMode::pca_pose;
    std::vector<BodyPoint<Scalar>> points;
    if (pose_mode) points = palm_map_.points;
    const std::size_t palm_count = points.size();

    const auto frames = forward_frames(model_, q);
    std::vector<Vector3<Scalar>> centers;
    centers.reserve(collision_points_.size());
    for (const auto& c : collision_points_) centers.push_back(point_position(frames, c));
    const auto queries = query_all(model_, centers, world_);
    out.min_distance = min_signed_distance(queries);
    std::vector<const SphereQueries<Scalar>*> active;
    for (const auto& sq : queries) {
      const bool in_range = std::any_of(sq.queries.begin(), sq.queries.end(),
                                        [&](const auto& d) { return d.lower_bounded < cfg_.collision.cutoff; });
      if (in_range) {
        active.push_back(&sq);
        points.push_back(collision_points_[sq.sphere]);
      }
    }

    if (!points.empty()) {
      const std::span<const BodyPoint<Scalar>> pts(points);
      const MatrixX<Scalar> J = jacobian(model_, frames, pts);
      const VectorX<Scalar> curvature = curvature_term(model_, q, qd, pts);
      const VectorX<Scalar> xd = J * qd;

      if (pose_mode) {
        const auto& cmd = command_as<ActionCommand<Scalar>>(command);
        VectorX<Scalar> x(3 * static_cast<Eigen::Index>(palm_count));
        for (std::size_t i = 0; i < palm_count; ++i)
          x.template segment<3>(3 * static_cast<Eigen::Index>(i)) = point_position(frames, points[i]);
        const VectorX<Scalar> target = pose_to_targets(cmd.palm_position, cmd.palm_rpy, cfg_.palm.offsets);
        const Eigen::Index rows = x.size();
        auto palm = attraction_forced<Scalar>(x, xd.head(rows), target, cfg_.palm_attraction);
        check(palm, "palm_attraction");
        add_pullback(J.topRows(rows), palm, curvature.head(rows));
      }

      for (std::size_t a = 0; a < active.size(); ++a) {
        const Eigen::Index row = 3 * static_cast<Eigen::Index>(palm_count + a);
        const Vector3<Scalar> sxd = xd.template segment<3>(row);
        const std::span<const DistanceQuery<Scalar>> qs(active[a]->queries);
        const auto Js = J.middleRows(row, 3);
        const auto cs = curvature.template segment<3>(row);
        auto geometric = collision_geometric<Scalar>(qs, sxd, cfg_.collision);
        check(geometric, "collision_geometric", static_cast<long>(active[a]->sphere));
        add_pullback(Js, geometric, cs);
        auto forcing = collision_forcing<Scalar>(qs, sxd, cfg_.collision);
        check(forcing, "collision_forcing", static_cast<long>(active[a]->sphere));
        add_pullback(Js, forcing, cs);
      }
    }

    if (pose_mode) {
      const auto& cmd = command_as<ActionCommand<Scalar>>(command);
      const MatrixX<Scalar>& A = pca_map_.matrix;
      if (cmd.pca_target.size() != A.rows()) throw ConfigError("PCA target has the wrong dimension");
      const VectorX<Scalar> x = A * q + pca_map_.offset;
      auto pca = attraction_forced<Scalar>(x, A * qd, cmd.pca_target, cfg_.pca_attraction);
      check(pca, "pca_attraction");
      add_pullback(A, pca, VectorX<Scalar>::Zero(A.rows()));
    } else {
      const auto& cmd = command_as<CspaceCommand<Scalar>>(command);
      if (cmd.joint_target.size() != n) throw ConfigError("joint target has the wrong dimension");
      auto target = attraction_forced<Scalar>(q, qd, cmd.joint_target, cfg_.cspace_attraction);
      check(target, "cspace_attraction");
      add_identity(target);
    }

    out.qdd = M.llt().solve(f);
    if (!out.qdd.allFinite()) throw EngineFault("non-finite acceleration from the resolved fabric system");
    return out;
  }

  /// Resolve and limit.
  LimitedAccel<Scalar> acceleration(const VectorX<Scalar>& q, const VectorX<Scalar>& qd,
                                    const Command<Scalar>& command, Resolution<Scalar>* resolution = nullptr) const
  {
    Resolution<Scalar> r = resolve(q, qd, command);
    auto limited = limit_accel_jerk<Scalar>(r.qdd, r.metric, r.force, accel_limits_, cfg_.limiter_tolerance,
                                            cfg_.limiter_iterations, cfg_.alpha_max);
    if (resolution) *resolution = std::move(r);
    return limited;
  }

  /// One integration step with explicit-midpoint RK2.
  FabricState<Scalar> step(const FabricState<Scalar>& state, const Command<Scalar>& command) const
  {
    const auto& lim = model_.limits();
    constexpr Scalar kSlack = Scalar(1e-6);
    if (((state.q - lim.lower).minCoeff() < -kSlack) || ((lim.upper - state.q).minCoeff() < -kSlack))
      throw EngineFault("fabric state outside joint limits");

    Scalar alpha = 0;
    int floored = 0;
    auto accel = [&](const VectorX<Scalar>& q, const VectorX<Scalar>& qd) {
      Resolution<Scalar> r;
      auto limited = acceleration(q, qd, command, &r);
      alpha = std::max(alpha, limited.alpha);
      floored += r.floored;
      return limited.qdd;
    };
    auto mid = integrate_midpoint<Scalar>(state.q, state.qd, cfg_.dt, accel);

    FabricState<Scalar> next;
    next.q = std::move(mid.q);
    next.qd = std::move(mid.qd);
    next.qdd = std::move(mid.accel);
    next.step = state.step + 1;
    next.last_action = command;
    next.diagnostics.alpha = alpha;
    next.diagnostics.floored = floored;
    for (Eigen::Index j = 0; j < next.q.size(); ++j) {
      if (next.q[j] > lim.upper[j]) {
        next.q[j] = lim.upper[j];
        next.qd[j] = 0;
        ++next.diagnostics.clamped;
      } else if (next.q[j] < lim.lower[j]) {
        next.q[j] = lim.lower[j];
        next.qd[j] = 0;
        ++next.diagnostics.clamped;
      }
    }
    next.diagnostics.min_distance = min_distance(next.q);
    return next;
  }

  /// Same results as calling step per element; elements are split across `workers` threads.
  BatchResult<Scalar> step_batch(std::span<const FabricState<Scalar>> states,
                                 std::span<const Command<Scalar>> commands, unsigned workers = 1) const
  {
    if (states.size() != commands.size()) throw ConfigError("batch needs one command per state");
    BatchResult<Scalar> out;
    out.states.resize(states.size());
    out.faults.resize(states.size());
    auto run = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          out.states[i] = step(states[i], commands[i]);
        } catch (const std::exception& e) {
          out.states[i] = states[i];
          out.faults[i] = e.what();
        }
      }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(states.size())));
    if (workers <= 1) {
      run(0, states.size());
      return out;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (states.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < states.size(); begin += chunk)
      pool.emplace_back(run, begin, std::min(states.size(), begin + chunk));
    return out;
  }

  /// Pull one command every action_repeat steps; stops early if the source throws.
  Trajectory<Scalar> run_policy_rate(FabricState<Scalar> state,
                                     const std::function<Command<Scalar>(std::size_t)>& action_source,
                                     std::size_t steps) const
  {
    Trajectory<Scalar> traj;
    traj.samples.reserve(steps + 1);
    state.diagnostics.min_distance = min_distance(state.q);
    traj.samples.push_back(sample(state));
    std::optional<Command<Scalar>> current;
    for (std::size_t s = 0; s < steps; ++s) {
      try {
        if (s % static_cast<std::size_t>(cfg_.action_repeat) == 0) {
          current = action_source(traj.pulls);
          ++traj.pulls;
        }
        state = step(state, *current);
      } catch (const std::exception& e) {
        traj.error = "step " + std::to_string(s) + ": " + e.what();
        break;
      }
      traj.samples.push_back(sample(state));
    }
    return traj;
  }

  /// Smallest signed distance between robot spheres and the world (self pairs included).
  Scalar min_distance(const VectorX<Scalar>& q) const
  {
    return min_signed_distance(query_all(model_, q, world_));
  }

private:
  template <typename T>
  static const T& command_as(const Command<Scalar>& c)
  {
    if (const T* p = std::get_if<T>(&c)) return *p;
    throw ConfigError("command type does not match the engine action mode");
  }

  TrajectorySample<Scalar> sample(const FabricState<Scalar>& s) const
  {
    return {static_cast<Scalar>(s.step) * cfg_.dt, s.q, s.qd, s.qdd, s.diagnostics.min_distance,
            s.diagnostics.alpha, s.diagnostics.clamped};
  }

  KinematicModel<Scalar> model_;
  CollisionWorld<Scalar> world_;
  EngineConfig<Scalar> cfg_;
  Taskmap<Scalar> pca_map_;
  Taskmap<Scalar> palm_map_;
  VectorX<Scalar> accel_limits_;
  std::vector<BodyPoint<Scalar>> collision_points_;
};

}  // namespace fabricore
