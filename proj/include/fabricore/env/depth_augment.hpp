#pragma once

#include "fabricore/env/random.hpp"

namespace fabricore::env {

/// Depth in metres, rows x cols (120 x 160 for the policy camera).
using DepthImage = Eigen::MatrixXd;

struct DepthAugConfig {
  double p_dropout = 0.003;
  double p_random_value = 0.003;
  double random_value_lower = 0.5;
  double random_value_upper = 1.3;
  double p_stick = 0.0025;  // per candidate anchor pixel
  int stick_max_length = 18;
  int stick_max_width = 3;
  double depth_min = 0.5;
  double depth_max = 1.5;

  // Structured-light sensor model: sub-pixel shifts resampled bilinearly, then
  // Gaussian disparity noise with quantisation. Defaults follow a Kinect-style camera.
  bool sensor_noise = true;
  double shift_sigma_px = 0.5;
  double focal_baseline = 35.130;  // disparity (px) at 1 m
  double disparity_sigma = 1.0 / 6.0;
  double disparity_quantum = 1.0 / 8.0;

  void validate() const;
};

struct DepthAugStats {
  long dropouts = 0;
  long random_values = 0;
  long sticks = 0;
};

/// Sensor noise, then sticks, then random-value pixels, then dropout.
DepthImage depth_augment(const DepthImage& image, Rng& rng, const DepthAugConfig& cfg,
                         DepthAugStats* stats = nullptr);

}  // namespace fabricore::env
