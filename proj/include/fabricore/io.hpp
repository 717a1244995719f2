#pragma once

#include "fabricore/env/audit.hpp"
#include "fabricore/env/domain_randomization.hpp"
#include "fabricore/env/random.hpp"
#include "fabricore/env/reward.hpp"
#include "fabricore/fabric_engine.hpp"
#include "fabricore/retarget_pca.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fabricore::io {

using json = nlohmann::json;

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// Throws ConfigError naming the first key of `j` not in `allowed`.
void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& context);

KinematicModel<double> parse_model(const json& j);
KinematicModel<double> load_model(const std::filesystem::path& path);
json model_to_json(const KinematicModel<double>& model);

ObstaclePrimitive<double> parse_obstacle(const json& j);
CollisionWorld<double> parse_world(const json& j, const KinematicModel<double>& model);

PcaBasis<double> parse_basis(const json& j);
PcaBasis<double> load_basis(const std::filesystem::path& path);
json basis_to_json(const PcaBasis<double>& basis);

HumanGraspTrace<double> parse_trace(const json& j);
json trace_to_json(const HumanGraspTrace<double>& trace);
/// Every *.json trace in a directory, in filename order.
std::vector<HumanGraspTrace<double>> load_traces(const std::filesystem::path& dir);

env::RewardConfig parse_reward_config(const json& j);
env::DRSpec parse_dr_spec(const json& j);

/// Scripted or seeded-random action source description.
struct ActionScriptEntry {
  double t = 0;
  Command<double> command;
};

struct RandomActionSpec {
  Eigen::Vector3d palm_lower{0.35, -0.35, 0.15};
  Eigen::Vector3d palm_upper{0.75, 0.35, 0.55};
  Eigen::Vector3d rpy_lower{-0.6, -0.6, -0.6};
  Eigen::Vector3d rpy_upper{0.6, 0.6, 0.6};
  double pca_range = 1.5;
  double joint_fraction = 1.0;  // cspace mode: targets uniform over this fraction of each range
  int hold_pulls = 15;          // pulls per random action
};

struct ActionSpec {
  std::vector<ActionScriptEntry> script;  // sorted by t
  std::optional<RandomActionSpec> random;
};

struct Scenario {
  std::filesystem::path robot_path;
  std::optional<KinematicModel<double>> model;
  CollisionWorld<double> world;
  EngineConfig<double> engine;
  Eigen::VectorXd initial_q;
  ActionSpec actions;
  std::size_t steps = 600;
};

/// Parse and validate a scenario; relative paths resolve against `base_dir`.
Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Action source for run_policy_rate; random sources draw from `rng`, which must outlive the source.
std::function<Command<double>(std::size_t)> make_action_source(const Scenario& scenario, env::Rng& rng);

// CSV

std::string trajectory_header(Eigen::Index dof);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory<double>& traj, Eigen::Index dof);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Episode observations: tip{0..3}_{x,y,z}, obj_*, goal_*, z_table. Extra columns are ignored.
CsvTable observations_to_csv(std::span<const env::RewardObservation> trajectory);
std::vector<env::RewardObservation> observations_from_csv(const CsvTable& table);

}  // namespace fabricore::io
