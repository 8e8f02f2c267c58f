#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aimsim/agent.hpp"
#include "aimsim/experiment.hpp"
#include "aimsim/psychophys.hpp"
#include "aimsim/rng.hpp"
#include "aimsim/sim/world.hpp"

namespace aimsim {

/// One trial's outcome; one row of trials.csv.
struct TrialRecord {
  int trialIndex = 0;
  std::string sessionId;
  std::string sessionKind = "real";
  std::string targetMotionId;
  double frameRate = 60.0;
  int frameDelay = 0;
  bool success = false;
  std::optional<double> completionTime;  // set iff success
  int shotsFired = 0;
  int shotsHit = 0;
  std::uint64_t seedStream = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct SessionResult {
  std::vector<TrialRecord> trials;
  std::optional<psychophys::StaircaseState> staircase;
  std::optional<double> staircaseThreshold;
};

/// Called after every simulated frame when frame logging is wanted.
using FrameSink = std::function<void(int trialIndex, const sim::FrameRecord&)>;

/// Seed used to order a session's trials.
inline std::uint64_t trial_order_seed(std::uint64_t masterSeed, std::string_view userId, std::string_view sessionId) {
  return mix_seed(mix_seed(masterSeed, fnv1a64(userId)), fnv1a64(sessionId) ^ 0x6f72646572ULL);
}

inline sim::TrialSetup make_trial_setup(const ExperimentConfig& cfg, const SessionSpec& session,
                                        const TargetMotionSpec& target, double sensitivity) {
  sim::TrialSetup s;
  s.durations = {cfg.readyDuration, cfg.taskDuration, cfg.feedbackDuration};
  s.weapon = cfg.weapon;
  s.target = target;
  s.targetHealth = cfg.targetHealth;
  s.frameRate = session.frameRate;
  s.refreshRate = session.refreshRate;
  s.frameDelay = session.frameDelay;
  s.sensitivity = sensitivity;
  return s;
}

/// Simulates one trial to completion with the given agent parameters.
inline sim::TrialState run_trial(const sim::TrialSetup& setup, const AgentParams& agentParams,
                                 std::uint64_t streamSeed, int trialIndex = 0, const FrameSink& sink = {}) {
  sim::TrialWorld world(setup, streamSeed);
  agent::AimAgent aim(agentParams, setup.sensitivity, setup.frameRate, streamSeed);
  const double total = setup.durations.ready + setup.durations.task + setup.durations.feedback;
  const auto frameLimit = static_cast<std::int64_t>(std::ceil(total * setup.frameRate)) + 16;
  std::vector<sim::InputEvent> arrived;
  while (!world.done()) {
    if (world.clock().frameIndex > frameLimit) throw std::logic_error("trial did not terminate");
    const double now = world.clock().sim_time();
    const auto rec = world.step_frame(arrived);
    if (sink) sink(trialIndex, rec);
    arrived = aim.act(world, now);
  }
  return world.trial();
}

/// Runs every trial of `session` in its seeded random order. A session
/// staircase drives its target parameter from trial to trial, with trial
/// success as the correct response; it stops adapting once complete.
inline SessionResult run_session(const ExperimentConfig& cfg, const SessionSpec& session, const UserRecord& user,
                                 std::uint64_t masterSeed, const FrameSink& sink = {}) {
  const double sensitivity = sim::mouse_sensitivity(user.cmPer360, user.mouseDpi);
  const auto order = psychophys::order_trials(session.trials, trial_order_seed(masterSeed, user.userId, session.id));

  SessionResult result;
  std::optional<StaircaseTarget> stairTarget;
  if (session.staircase) {
    stairTarget = parse_staircase_parameter(session.staircase->parameter);
    if (!stairTarget) throw std::invalid_argument("bad staircase parameter '" + session.staircase->parameter + "'");
    result.staircase = psychophys::make_staircase(*session.staircase);
  }

  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto* spec = cfg.find_target(order[i]);
    if (!spec) throw std::invalid_argument("unresolved target motion id '" + order[i] + "'");
    TargetMotionSpec target = *spec;
    const bool staircased = stairTarget && stairTarget->targetId == target.id;
    if (staircased) set_target_parameter(target, stairTarget->field, result.staircase->currentLevel);

    const auto index = static_cast<int>(i);
    const std::uint64_t stream = trial_stream_seed(masterSeed, user.userId, session.id, i);
    const auto setup = make_trial_setup(cfg, session, target, sensitivity);
    const auto trial = run_trial(setup, session.agent, stream, index, sink);

    const bool success = trial.outcome == sim::Outcome::Success;
    TrialRecord rec;
    rec.trialIndex = index;
    rec.sessionId = session.id;
    rec.sessionKind = std::string(to_string(session.kind));
    rec.targetMotionId = target.id;
    rec.frameRate = session.frameRate;
    rec.frameDelay = session.frameDelay;
    rec.success = success;
    rec.completionTime = trial.completionTime;
    rec.shotsFired = trial.shotsFired;
    rec.shotsHit = trial.shotsHit;
    rec.seedStream = stream;
    result.trials.push_back(std::move(rec));

    if (staircased && !result.staircase->complete()) {
      result.staircase = psychophys::staircase_step(
          *result.staircase, success ? psychophys::Response::Correct : psychophys::Response::Incorrect);
    }
  }
  if (result.staircase && result.staircase->complete())
    result.staircaseThreshold = psychophys::staircase_threshold(*result.staircase);
  return result;
}

}  // namespace aimsim
