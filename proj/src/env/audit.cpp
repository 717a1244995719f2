#include "fabricore/env/audit.hpp"

#include <algorithm>
#include <cmath>

namespace fabricore::env {

EpisodeAudit audit_episode(std::span<const RewardObservation> trajectory, const RewardConfig& cfg)
{
  cfg.validate();
  EpisodeAudit audit;
  if (trajectory.empty()) return audit;
  audit.initial_fingertip_distance = fingertip_distance(trajectory.front(), cfg.aggregation);
  audit.initial_lift_error = trajectory.front().z_table + cfg.lift_offset - trajectory.front().object.z();
  EpisodeState state;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    RewardBreakdown r;
    std::tie(r, state) = compute_reward(trajectory[i], state, cfg);
    audit.steps.push_back(r);
    auto& t = audit.totals;
    t.to_obj += cfg.w_to_obj * r.to_obj;
    t.lift += cfg.w_lift * r.lift;
    t.lifted += cfg.w_lifted * r.lifted;
    t.to_goal += cfg.w_to_goal * r.to_goal;
    t.reached += cfg.w_reached * r.reached;
    t.success += cfg.w_success * r.success;
    t.total += r.total;
    if (check_reset(trajectory[i], state, cfg)) {
      audit.reset_step = static_cast<int>(i);
      break;
    }
  }
  return audit;
}

namespace {

double smoothstep(double s)
{
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3 - 2 * s);
}

}  // namespace

std::vector<RewardObservation> synthetic_episode(Rng& rng, const SyntheticEpisodeConfig& cfg)
{
  std::normal_distribution<double> noise(0.0, cfg.jitter);
  // Fingertip directions around the object: a tetrahedron-ish spread.
  const std::array<Eigen::Vector3d, 4> spread{Eigen::Vector3d(1, 0, 0.3).normalized(),
                                              Eigen::Vector3d(-0.5, 0.87, 0.3).normalized(),
                                              Eigen::Vector3d(-0.5, -0.87, 0.3).normalized(),
                                              Eigen::Vector3d(0, 0, 1)};
  std::vector<RewardObservation> out;
  auto emit = [&](const Eigen::Vector3d& object, double radius) {
    RewardObservation o;
    o.object = object;
    o.goal = cfg.goal;
    o.z_table = cfg.z_table;
    for (std::size_t k = 0; k < 4; ++k)
      o.fingertips[k] = object + radius * spread[k] + Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    out.push_back(o);
  };

  for (int i = 0; i < cfg.approach_steps; ++i) {
    const double s = smoothstep(double(i) / double(cfg.approach_steps - 1));
    emit(cfg.object, cfg.start_distance + s * (cfg.grasp_radius - cfg.start_distance));
  }
  const Eigen::Vector3d above(cfg.object.x(), cfg.object.y(), cfg.goal.z());
  for (int i = 1; i <= cfg.lift_steps; ++i)
    emit(cfg.object + smoothstep(double(i) / cfg.lift_steps) * (above - cfg.object), cfg.grasp_radius);
  if (cfg.drop) {
    for (int i = 1; i <= cfg.hold_steps; ++i)
      emit(Eigen::Vector3d(above.x(), above.y(), above.z() - 0.05 * i), cfg.grasp_radius + 0.02 * i);
    return out;
  }
  for (int i = 1; i <= cfg.carry_steps; ++i)
    emit(above + smoothstep(double(i) / cfg.carry_steps) * (cfg.goal - above), cfg.grasp_radius);
  for (int i = 0; i < cfg.hold_steps; ++i) emit(cfg.goal, cfg.grasp_radius);
  return out;
}

}  // namespace fabricore::env
