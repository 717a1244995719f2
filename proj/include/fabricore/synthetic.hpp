#pragma once

#include "fabricore/env/random.hpp"
#include "fabricore/retarget_pca.hpp"

#include <string>
#include <vector>

namespace fabricore {

struct SyntheticTraceConfig {
  std::size_t traces = 40;
  std::size_t frames = 30;
  double human_scale = 1.6;  // robot hand size over human hand size
  double jitter = 0.001;     // fingertip noise std, metres
  double closure_noise = 0.08;
};

/**
 * Stand-in for recorded human grasps: each trace closes the given hand model
 * from a near-open posture along a grip-specific synergy, reads the fingertips
 * and shrinks them to human size. Grip types alternate.
 */
std::vector<HumanGraspTrace<double>> generate_synthetic_traces(const KinematicModel<double>& hand,
                                                               const std::vector<std::string>& tips,
                                                               env::Rng& rng, const SyntheticTraceConfig& cfg = {});

}  // namespace fabricore
