#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "aimsim/experiment.hpp"
#include "aimsim/rng.hpp"
#include "aimsim/sim/camera.hpp"
#include "aimsim/sim/geometry.hpp"
#include "aimsim/sim/world.hpp"

namespace aimsim::agent {

using sim::CameraState;
using sim::DisplayedFrame;
using sim::InputEvent;
using sim::Vec3;

/// What the agent perceives of the target.
struct Observation {
  Vec3 center;          // world position of the target centre
  double radius = 0.0;  // world units
};

/// Target as shown on the most recent displayed frame whose photons arrived
/// no later than `now - reactionTime`. Before enough history exists the
/// oldest displayed frame stands in. Empty when that frame showed no target.
inline std::optional<Observation> agent_observe(std::span<const DisplayedFrame> history, double now,
                                                double reactionTime) {
  if (history.empty()) return std::nullopt;
  const double cutoff = now - reactionTime;
  const DisplayedFrame* seen = &history.front();
  for (const auto& f : history) {
    if (f.photonTime > cutoff + 1e-12) break;
    seen = &f;
  }
  if (!seen->target) return std::nullopt;
  return Observation{seen->target->center, seen->target->radius};
}

/// Per-trial controller memory.
struct AgentState {
  double yawResidual = 0.0;    // fractional counts not yet emitted
  double pitchResidual = 0.0;
  bool triggerHeld = false;
  double commandedYaw = 0.0;   // running totals, degrees
  double commandedPitch = 0.0;
  long long emittedDx = 0;
  long long emittedDy = 0;
};

/// Angular radius (degrees) of a sphere seen from `eye`.
inline double angular_radius(const Vec3& eye, const Observation& o) {
  const double d = sim::norm(o.center - eye);
  if (d <= o.radius) return 90.0;
  return sim::rad_to_deg(std::asin(o.radius / d));
}

/// One control step: first-order pursuit toward the observed target, rate
/// limited, plus Gaussian motor noise, quantised to whole mouse counts with
/// the remainder carried over. The trigger is held while the angular error
/// is inside fireThreshold target radii.
inline std::vector<InputEvent> agent_act(const AgentParams& params, const std::optional<Observation>& observation,
                                         const CameraState& camera, double dt, double sensitivity, double now,
                                         AgentState& state, Rng& rng) {
  std::vector<InputEvent> events;
  bool wantTrigger = false;
  double yawTurn = 0.0;
  double pitchTurn = 0.0;

  if (observation) {
    const Vec3 toTarget = sim::normalized(observation->center - camera.position);
    const double error = sim::angle_between(camera.view_direction(), toTarget);
    const double dYaw = sim::wrap180(sim::rad_to_deg(std::atan2(toTarget.y, toTarget.x)) - camera.yaw);
    const double dPitch = sim::rad_to_deg(std::asin(std::clamp(toTarget.z, -1.0, 1.0))) - camera.pitch;
    const double span = std::hypot(dYaw, dPitch);
    if (span > 0.0 && error > 0.0) {
      // Step a fraction of the yaw/pitch offsets rather than a fixed length
      // along them: yaw foreshortens with pitch, and a fixed length would
      // close less than gain * error * dt of the great-circle error.
      const double turn = std::min(params.pursuitGain * error, params.maxTurnRate) * dt;
      const double fraction = std::min(1.0, std::min(turn / error, params.maxTurnRate * dt / span));
      yawTurn = fraction * dYaw;
      pitchTurn = fraction * dPitch;
    }
    wantTrigger = error < params.fireThreshold * angular_radius(camera.position, *observation);
  }
  if (params.motorNoiseSigma > 0.0) {
    yawTurn += params.motorNoiseSigma * rng.normal();
    pitchTurn += params.motorNoiseSigma * rng.normal();
  }

  state.commandedYaw += yawTurn;
  state.commandedPitch += pitchTurn;
  state.yawResidual += yawTurn / sensitivity;
  state.pitchResidual += -pitchTurn / sensitivity;
  const auto dx = static_cast<long long>(std::trunc(state.yawResidual));
  const auto dy = static_cast<long long>(std::trunc(state.pitchResidual));
  state.yawResidual -= static_cast<double>(dx);
  state.pitchResidual -= static_cast<double>(dy);
  state.emittedDx += dx;
  state.emittedDy += dy;
  if (dx != 0 || dy != 0) events.push_back({now, sim::MouseDelta{dx, dy}});

  if (wantTrigger && !state.triggerHeld) events.push_back({now, sim::ButtonDown{}});
  if (!wantTrigger && state.triggerHeld) events.push_back({now, sim::ButtonUp{}});
  state.triggerHeld = wantTrigger;
  return events;
}

/// Closed-loop aim controller for one trial.
class AimAgent {
 public:
  AimAgent(const AgentParams& params, double sensitivity, double frameRate, std::uint64_t streamSeed)
      : params_(params),
        sensitivity_(sensitivity),
        framePeriod_(1.0 / frameRate),
        reactionFrames_(std::round(params.reactionTime * frameRate)),
        rng_(mix_seed(streamSeed, params.seed)) {}

  /// Acts at the start of the frame beginning at `now`, after that frame
  /// has been simulated. The returned events arrive during this frame.
  std::vector<InputEvent> act(const sim::TrialWorld& world, double now) {
    const auto obs = agent_observe(world.displayed(), now, reactionFrames_ * framePeriod_);
    return agent_act(params_, obs, world.camera(), framePeriod_, sensitivity_, now, state_, rng_);
  }

  const AgentState& state() const { return state_; }

 private:
  AgentParams params_;
  double sensitivity_;
  double framePeriod_;
  double reactionFrames_;
  AgentState state_;
  Rng rng_;
};

}  // namespace aimsim::agent
