#include "fabricore/env/state_machine.hpp"

namespace fabricore::env {

const char* to_string(BinPackPhase p)
{
  switch (p) {
    case BinPackPhase::grasp: return "GRASP";
    case BinPackPhase::transport: return "TRANSPORT";
    case BinPackPhase::release: return "RELEASE";
    case BinPackPhase::ret: return "RETURN";
    case BinPackPhase::fault_recover: return "FAULT_RECOVER";
  }
  return "?";
}

namespace {

void enter(BinPackState& s, BinPackPhase phase, double clock)
{
  s.phase = phase;
  s.phase_start = clock;
}

}  // namespace

std::pair<BinPackOutput, BinPackState> bin_pack_step(const BinPackInput& in, BinPackState state,
                                                      const BinPackConfig& cfg)
{
  const double elapsed = in.clock - state.phase_start;

  if (state.phase != BinPackPhase::fault_recover && in.palm_height > cfg.palm_fault_height) {
    enter(state, BinPackPhase::fault_recover, in.clock);
  } else {
    switch (state.phase) {
      case BinPackPhase::grasp:
        if (in.predicted_object_z > cfg.lift_height) {
          state.frozen_pca = in.policy_action.pca_target;
          enter(state, BinPackPhase::transport, in.clock);
        }
        break;
      case BinPackPhase::transport:
        if (elapsed >= cfg.transport_duration) enter(state, BinPackPhase::release, in.clock);
        break;
      case BinPackPhase::release:
        if (elapsed >= cfg.release_duration) enter(state, BinPackPhase::ret, in.clock);
        break;
      case BinPackPhase::ret:
        if (elapsed >= cfg.return_duration) enter(state, BinPackPhase::grasp, in.clock);
        break;
      case BinPackPhase::fault_recover:
        if (elapsed >= cfg.fault_duration) enter(state, BinPackPhase::grasp, in.clock);
        break;
    }
  }

  BinPackOutput out;
  out.phase = state.phase;
  switch (state.phase) {
    case BinPackPhase::grasp:
      out.command = in.policy_action;
      out.policy_engaged = true;
      break;
    case BinPackPhase::transport:
      out.command = cfg.bin_pose;
      out.command.pca_target = state.frozen_pca;
      break;
    case BinPackPhase::release:
      out.command = cfg.bin_pose;
      out.command.pca_target = cfg.open_pca;
      break;
    case BinPackPhase::ret:
    case BinPackPhase::fault_recover:
      out.command = cfg.nominal;
      break;
  }
  return {out, state};
}

}  // namespace fabricore::env
