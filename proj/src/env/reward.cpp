#include "fabricore/env/reward.hpp"

#include "fabricore/types.hpp"

#include <algorithm>

namespace fabricore::env {

void RewardConfig::validate() const
{
  for (double w : {w_to_obj, w_lift, w_lifted, w_to_goal, w_reached, w_success})
    if (!(w >= 0)) throw ConfigError("reward weights must be non-negative");
  if (!(lift_offset > 0) || !(d_success > 0) || t_success <= 0 || t_max <= 0)
    throw ConfigError("reward thresholds must be positive");
}

std::pair<double, MinimizeTerm> minimize_reward(double e, MinimizeTerm term)
{
  if (!term.smallest) {
    term.smallest = e;
    return {0.0, term};
  }
  const double r = std::max(*term.smallest - e, 0.0);
  term.smallest = std::min(*term.smallest, e);
  return {r, term};
}

double fingertip_distance(const RewardObservation& obs, FingertipAggregation aggregation)
{
  double acc = 0.0;
  for (const auto& tip : obs.fingertips) {
    const double d = (tip - obs.object).norm();
    acc = aggregation == FingertipAggregation::max ? std::max(acc, d) : acc + d;
  }
  return aggregation == FingertipAggregation::mean ? acc / static_cast<double>(obs.fingertips.size()) : acc;
}

std::pair<RewardBreakdown, EpisodeState> compute_reward(const RewardObservation& obs, EpisodeState state,
                                                        const RewardConfig& cfg)
{
  RewardBreakdown r;
  const double z_lifted = obs.z_table + cfg.lift_offset;
  const bool lifted = obs.object.z() > z_lifted;
  const double goal_distance = (obs.goal - obs.object).norm();

  double value = 0;
  std::tie(value, state.to_obj) = minimize_reward(fingertip_distance(obs, cfg.aggregation), state.to_obj);
  r.to_obj = value;

  std::tie(value, state.lift) = minimize_reward(z_lifted - obs.object.z(), state.lift);
  r.lift = lifted ? 0.0 : value;

  if (lifted && !state.lifted_rewarded) {
    r.lifted = 1;
    state.lifted_rewarded = true;
  }

  std::tie(value, state.to_goal) = minimize_reward(goal_distance, state.to_goal);
  r.to_goal = lifted ? value : 0.0;

  const bool reached = goal_distance < cfg.d_success;
  r.reached = reached ? 1.0 : 0.0;
  state.consecutive_reached = reached ? state.consecutive_reached + 1 : 0;
  if (reached && state.consecutive_reached == cfg.t_success && !state.success) {
    r.success = static_cast<double>(cfg.t_max - state.timestep);
    state.success = true;
  }

  r.total = cfg.w_to_obj * r.to_obj + cfg.w_lift * r.lift + cfg.w_lifted * r.lifted + cfg.w_to_goal * r.to_goal +
            cfg.w_reached * r.reached + cfg.w_success * r.success;
  ++state.timestep;
  return {r, state};
}

bool check_reset(const RewardObservation& obs, const EpisodeState& state, const RewardConfig& cfg)
{
  return obs.object.z() < obs.z_table || state.success || state.timestep > cfg.t_max;
}

}  // namespace fabricore::env
