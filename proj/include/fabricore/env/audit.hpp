#pragma once

#include "fabricore/env/random.hpp"
#include "fabricore/env/reward.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fabricore::env {

/// Per-step reward ledger of a replayed episode. Totals are weighted.
struct EpisodeAudit {
  std::vector<RewardBreakdown> steps;  // unweighted terms, weighted total
  RewardBreakdown totals;              // every field weighted
  std::optional<int> reset_step;       // first step at which the reset predicate fired
  double initial_fingertip_distance = 0;
  double initial_lift_error = 0;
};

/// Replays until the end of the trajectory or the first reset, whichever comes first.
EpisodeAudit audit_episode(std::span<const RewardObservation> trajectory, const RewardConfig& cfg);

struct SyntheticEpisodeConfig {
  double start_distance = 0.5;  // mean fingertip-object distance at T = 0
  double grasp_radius = 0.03;
  Eigen::Vector3d object{0.0, 0.0, 0.05};
  Eigen::Vector3d goal{0.1, 0.2, 0.45};
  double z_table = 0.0;
  int approach_steps = 40;
  int lift_steps = 30;
  int carry_steps = 40;
  int hold_steps = 20;
  double jitter = 0.002;  // fingertip noise std, metres
  bool drop = false;      // release the object through the table instead of holding
};

/// Scripted approach, lift, carry and hold; fingertips wrap the object once grasped.
std::vector<RewardObservation> synthetic_episode(Rng& rng, const SyntheticEpisodeConfig& cfg = {});

}  // namespace fabricore::env
