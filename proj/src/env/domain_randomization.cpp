#include "fabricore/env/domain_randomization.hpp"

#include "fabricore/types.hpp"

#include <cmath>

namespace fabricore::env {

void DRSpec::validate() const
{
  for (const auto& g : groups)
    for (const auto& r : g.rows) {
      const std::string what = g.name + "/" + r.parameter;
      if (r.distribution == DRDistribution::gaussian) {
        if (!(r.upper >= 0)) throw ConfigError(what + ": gaussian standard deviation must be non-negative");
      } else if (!(r.lower <= r.upper)) {
        throw ConfigError(what + ": range must be ordered");
      }
      if (r.distribution == DRDistribution::loguniform && !(r.lower > 0))
        throw ConfigError(what + ": loguniform range must be positive");
    }
}

DRSpec default_randomization_spec()
{
  using D = DRDistribution;
  using O = DROperation;
  return DRSpec{{
      {"robot",
       {{"mass", D::uniform, O::scaling, 0.3, 3.0},
        {"friction", D::uniform, O::scaling, 0.5, 1.1},
        {"restitution", D::uniform, O::additive, 0.0, 0.4},
        {"joint_stiffness", D::loguniform, O::scaling, 0.5, 2.0},
        {"joint_damping", D::loguniform, O::scaling, 0.3, 3.0}}},
      {"object",
       {{"mass", D::uniform, O::scaling, 0.3, 3.0},
        {"friction", D::uniform, O::scaling, 0.5, 1.1},
        {"restitution", D::uniform, O::additive, 0.0, 0.4}}},
      {"table", {{"friction", D::uniform, O::scaling, 0.5, 1.1}, {"restitution", D::uniform, O::additive, 0.0, 0.4}}},
      {"observation",
       {{"uncorrelated_noise", D::gaussian, O::additive, 0.0, 0.005},
        {"correlated_noise", D::gaussian, O::additive, 0.0, 0.01}}},
      {"action",
       {{"uncorrelated_noise", D::gaussian, O::additive, 0.0, 0.05},
        {"correlated_noise", D::gaussian, O::additive, 0.0, 0.02}}},
      {"environment", {{"gravity", D::gaussian, O::additive, 0.0, 0.5}}},
  }};
}

std::vector<DRSample> sample_domain_randomization(Rng& rng, const DRSpec& spec)
{
  std::vector<DRSample> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& g : spec.groups)
    for (const auto& r : g.rows) {
      double v = 0;
      switch (r.distribution) {
        case DRDistribution::uniform: v = r.lower + unit(rng) * (r.upper - r.lower); break;
        case DRDistribution::loguniform:
          v = std::exp(std::log(r.lower) + unit(rng) * (std::log(r.upper) - std::log(r.lower)));
          break;
        case DRDistribution::gaussian: v = r.lower + r.upper * normal(rng); break;
      }
      out.push_back({g.name, r.parameter, r.operation, v});
    }
  return out;
}

DRDistribution parse_distribution(const std::string& s)
{
  if (s == "uniform") return DRDistribution::uniform;
  if (s == "loguniform") return DRDistribution::loguniform;
  if (s == "gaussian") return DRDistribution::gaussian;
  throw ConfigError("unknown randomization distribution '" + s + "'");
}

DROperation parse_operation(const std::string& s)
{
  if (s == "scaling") return DROperation::scaling;
  if (s == "additive") return DROperation::additive;
  throw ConfigError("unknown randomization operation '" + s + "'");
}

}  // namespace fabricore::env
