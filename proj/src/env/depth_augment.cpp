#include "fabricore/env/depth_augment.hpp"

#include "fabricore/types.hpp"

#include <algorithm>
#include <cmath>

namespace fabricore::env {

void DepthAugConfig::validate() const
{
  for (double p : {p_dropout, p_random_value, p_stick})
    if (!(p >= 0 && p <= 1)) throw ConfigError("depth augmentation probabilities must lie in [0, 1]");
  if (!(depth_min < depth_max) || !(random_value_lower <= random_value_upper))
    throw ConfigError("depth augmentation ranges must be ordered");
  if (stick_max_length < 1 || stick_max_width < 1) throw ConfigError("stick dimensions must be at least one pixel");
}

namespace {

// Visit the indices in [0, count) selected by independent Bernoulli(p) trials, via geometric gaps.
template <typename Visit>
void bernoulli_indices(Rng& rng, double p, long count, Visit&& visit)
{
  if (p <= 0) return;
  if (p >= 1) {
    for (long i = 0; i < count; ++i) visit(i);
    return;
  }
  std::geometric_distribution<long> gap(p);
  for (long i = gap(rng); i < count; i += 1 + gap(rng)) visit(i);
}

double bilinear(const DepthImage& img, double r, double c)
{
  r = std::clamp(r, 0.0, static_cast<double>(img.rows() - 1));
  c = std::clamp(c, 0.0, static_cast<double>(img.cols() - 1));
  const auto r0 = static_cast<Eigen::Index>(std::floor(r));
  const auto c0 = static_cast<Eigen::Index>(std::floor(c));
  const Eigen::Index r1 = std::min(r0 + 1, img.rows() - 1);
  const Eigen::Index c1 = std::min(c0 + 1, img.cols() - 1);
  const double fr = r - static_cast<double>(r0), fc = c - static_cast<double>(c0);
  return (1 - fr) * ((1 - fc) * img(r0, c0) + fc * img(r0, c1)) + fr * ((1 - fc) * img(r1, c0) + fc * img(r1, c1));
}

void sensor_noise(DepthImage& img, Rng& rng, const DepthAugConfig& cfg)
{
  std::normal_distribution<double> shift(0.0, cfg.shift_sigma_px);
  std::normal_distribution<double> disparity(0.0, cfg.disparity_sigma);
  const DepthImage src = img;
  for (Eigen::Index c = 0; c < img.cols(); ++c)
    for (Eigen::Index r = 0; r < img.rows(); ++r) {
      const double dr = cfg.shift_sigma_px > 0 ? shift(rng) : 0.0;
      const double dc = cfg.shift_sigma_px > 0 ? shift(rng) : 0.0;
      const double z = bilinear(src, static_cast<double>(r) + dr, static_cast<double>(c) + dc);
      double d = cfg.focal_baseline / z + (cfg.disparity_sigma > 0 ? disparity(rng) : 0.0);
      if (cfg.disparity_quantum > 0) d = std::round(d / cfg.disparity_quantum) * cfg.disparity_quantum;
      img(r, c) = d > 0 ? std::clamp(cfg.focal_baseline / d, cfg.depth_min, cfg.depth_max) : cfg.depth_max;
    }
}

void draw_stick(DepthImage& img, Rng& rng, const DepthAugConfig& cfg, Eigen::Index r0, Eigen::Index c0)
{
  std::uniform_int_distribution<int> length(1, cfg.stick_max_length);
  std::uniform_int_distribution<int> width(1, cfg.stick_max_width);
  std::uniform_real_distribution<double> angle(0.0, 3.141592653589793);
  std::uniform_real_distribution<double> depth(cfg.depth_min, cfg.depth_max);
  const int len = length(rng), wid = width(rng);
  const double theta = angle(rng), value = depth(rng);
  const double ur = std::sin(theta), uc = std::cos(theta);
  for (int s = 0; s < len; ++s)
    for (int w = 0; w < wid; ++w) {
      // Offset across the stick, centred on the axis.
      const double across = w - 0.5 * (wid - 1);
      const auto r = static_cast<Eigen::Index>(std::lround(static_cast<double>(r0) + s * ur + across * uc));
      const auto c = static_cast<Eigen::Index>(std::lround(static_cast<double>(c0) + s * uc - across * ur));
      if (r >= 0 && r < img.rows() && c >= 0 && c < img.cols()) img(r, c) = value;
    }
}

}  // namespace

DepthImage depth_augment(const DepthImage& image, Rng& rng, const DepthAugConfig& cfg, DepthAugStats* stats)
{
  DepthAugStats local;
  DepthImage img = image.cwiseMax(cfg.depth_min).cwiseMin(cfg.depth_max);
  const long count = static_cast<long>(img.size());
  const Eigen::Index rows = img.rows();

  if (cfg.sensor_noise) sensor_noise(img, rng, cfg);

  // Column-major linear index -> (row, col).
  bernoulli_indices(rng, cfg.p_stick, count, [&](long i) {
    draw_stick(img, rng, cfg, i % rows, i / rows);
    ++local.sticks;
  });

  std::uniform_real_distribution<double> random_depth(cfg.random_value_lower, cfg.random_value_upper);
  bernoulli_indices(rng, cfg.p_random_value, count, [&](long i) {
    img.data()[i] = random_depth(rng);
    ++local.random_values;
  });

  bernoulli_indices(rng, cfg.p_dropout, count, [&](long i) {
    img.data()[i] = 0.0;
    ++local.dropouts;
  });

  if (stats) *stats = local;
  return img;
}

}  // namespace fabricore::env
