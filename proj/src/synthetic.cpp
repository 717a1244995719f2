#include "fabricore/synthetic.hpp"

#include <random>

namespace fabricore {

namespace {

// Closing direction per joint for the four-finger layout (index, middle, ring, thumb).
Eigen::VectorXd synergy(GripType grip)
{
  Eigen::VectorXd s(16);
  if (grip == GripType::power)
    s << 0, 1.2, 1.2, 1.0, 0, 1.25, 1.2, 1.0, 0, 1.3, 1.2, 1.0, 1.1, 0.8, 0.5, 0.5;
  else
    s << 0.1, 0.8, 0.6, 0.4, 0, 0.7, 0.6, 0.4, -0.1, 0.3, 0.3, 0.2, 1.25, 1.0, 0.4, 0.3;
  return s;
}

}  // namespace

std::vector<HumanGraspTrace<double>> generate_synthetic_traces(const KinematicModel<double>& hand,
                                                               const std::vector<std::string>& tips,
                                                               env::Rng& rng, const SyntheticTraceConfig& cfg)
{
  if (hand.dof() != 16) throw ConfigError("synthetic traces need a 16-joint hand model");
  if (tips.size() != 4) throw ConfigError("synthetic traces need four fingertips");
  if (cfg.frames < 2 || !(cfg.human_scale > 0) || !(cfg.jitter >= 0) || !(cfg.closure_noise >= 0))
    throw ConfigError("invalid synthetic trace configuration");
  const RetargetHand<double> view(hand, tips);
  const auto& lim = hand.limits();
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> amplitude(0.6, 1.0);

  std::vector<HumanGraspTrace<double>> out;
  for (std::size_t t = 0; t < cfg.traces; ++t) {
    HumanGraspTrace<double> trace;
    trace.grip = t % 2 == 0 ? GripType::power : GripType::precision;
    Eigen::VectorXd open = Eigen::VectorXd::Constant(16, 0.1);
    open.tail<4>() << 0.4, 0.2, 0.1, 0.1;
    Eigen::VectorXd close = open + amplitude(rng) * synergy(trace.grip);
    for (Eigen::Index j = 0; j < 16; ++j) {
      open[j] += 0.3 * cfg.closure_noise * noise(rng);
      close[j] += cfg.closure_noise * noise(rng);
    }
    open = open.cwiseMax(lim.lower).cwiseMin(lim.upper);
    close = close.cwiseMax(lim.lower).cwiseMin(lim.upper);

    trace.points.resize(static_cast<Eigen::Index>(cfg.frames), 12);
    for (std::size_t i = 0; i < cfg.frames; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(cfg.frames - 1);
      const double s = u * u * (3 - 2 * u);
      Eigen::VectorXd x = view.tips(open + s * (close - open)) / cfg.human_scale;
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += cfg.jitter * noise(rng);
      trace.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
    out.push_back(std::move(trace));
  }
  return out;
}

}  // namespace fabricore
