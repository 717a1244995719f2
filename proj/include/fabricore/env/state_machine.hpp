#pragma once

#include "fabricore/fabric_engine.hpp"

#include <utility>

namespace fabricore::env {

enum class BinPackPhase { grasp, transport, release, ret, fault_recover };

const char* to_string(BinPackPhase p);

struct BinPackConfig {
  double lift_height = 0.2;         // predicted object z that triggers transport
  double palm_fault_height = 0.9;   // palm z above this means the policy has collapsed
  double transport_duration = 2.0;  // s
  double release_duration = 0.5;
  double return_duration = 1.5;
  double fault_duration = 2.0;
  ActionCommand<double> bin_pose;      // pca_target unused; palm pose over the bin
  ActionCommand<double> nominal;       // nominal palm pose and PCA posture
  Eigen::VectorXd open_pca = Eigen::VectorXd::Zero(5);
};

struct BinPackState {
  BinPackPhase phase = BinPackPhase::grasp;
  double phase_start = 0;
  Eigen::VectorXd frozen_pca;  // last policy PCA action at lift-off
};

struct BinPackInput {
  double predicted_object_z = 0;
  double palm_height = 0;
  double clock = 0;  // s
  ActionCommand<double> policy_action;
};

struct BinPackOutput {
  BinPackPhase phase = BinPackPhase::grasp;
  ActionCommand<double> command;
  bool policy_engaged = false;
};

/**
 * Pick-and-place cycle GRASP -> TRANSPORT -> RELEASE -> RETURN -> GRASP.
 * A palm height above the fault threshold interrupts any phase with
 * FAULT_RECOVER, which drives to the nominal pose and then re-engages GRASP.
 */
std::pair<BinPackOutput, BinPackState> bin_pack_step(const BinPackInput& in, BinPackState state,
                                                      const BinPackConfig& cfg);

}  // namespace fabricore::env
