#pragma once

#include "fabricore/env/random.hpp"

#include <string>
#include <vector>

namespace fabricore::env {

enum class DRDistribution { uniform, loguniform, gaussian };
enum class DROperation { scaling, additive };

/// One randomised parameter. For gaussian rows, `lower` is the mean and `upper` the standard deviation.
struct DRRow {
  std::string parameter;
  DRDistribution distribution = DRDistribution::uniform;
  DROperation operation = DROperation::scaling;
  double lower = 0, upper = 0;
};

struct DRGroup {
  std::string name;
  std::vector<DRRow> rows;
};

struct DRSpec {
  std::vector<DRGroup> groups;

  void validate() const;
};

/// The randomisation table used for grasp-policy training.
DRSpec default_randomization_spec();

struct DRSample {
  std::string group, parameter;
  DROperation operation = DROperation::scaling;
  double value = 0;

  /// Apply to a nominal value: multiply for scaling rows, add for additive rows.
  double apply(double nominal) const { return operation == DROperation::scaling ? nominal * value : nominal + value; }
};

std::vector<DRSample> sample_domain_randomization(Rng& rng, const DRSpec& spec);

DRDistribution parse_distribution(const std::string& s);
DROperation parse_operation(const std::string& s);

}  // namespace fabricore::env
