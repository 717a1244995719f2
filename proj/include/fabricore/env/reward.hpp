#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <utility>

namespace fabricore::env {

enum class FingertipAggregation { mean, max, sum };

struct RewardConfig {
  double w_to_obj = 5;
  double w_lift = 50;
  double w_lifted = 50;
  double w_to_goal = 1000;
  double w_reached = 40;
  double w_success = 100;
  double lift_offset = 0.2;  // z_lifted = z_table + lift_offset
  double d_success = 0.1;
  int t_success = 15;
  int t_max = 150;
  FingertipAggregation aggregation = FingertipAggregation::mean;

  void validate() const;
};

/// Per-episode memory of one minimised error term.
struct MinimizeTerm {
  std::optional<double> smallest;
};

/// r = max(e_smallest - e, 0); e_smallest starts at the first observed e.
std::pair<double, MinimizeTerm> minimize_reward(double e, MinimizeTerm term);

struct EpisodeState {
  MinimizeTerm to_obj, lift, to_goal;
  bool lifted_rewarded = false;
  int consecutive_reached = 0;
  int timestep = 0;  // T of the next reward evaluation
  bool success = false;
};

struct RewardObservation {
  std::array<Eigen::Vector3d, 4> fingertips;
  Eigen::Vector3d object = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  double z_table = 0;
};

/// Unweighted terms r_i and the weighted total.
struct RewardBreakdown {
  double to_obj = 0, lift = 0, lifted = 0, to_goal = 0, reached = 0, success = 0;
  double total = 0;
};

double fingertip_distance(const RewardObservation& obs, FingertipAggregation aggregation);

std::pair<RewardBreakdown, EpisodeState> compute_reward(const RewardObservation& obs, EpisodeState state,
                                                        const RewardConfig& cfg);

/// Object below the table, success granted, or past the episode limit.
bool check_reset(const RewardObservation& obs, const EpisodeState& state, const RewardConfig& cfg);

}  // namespace fabricore::env
