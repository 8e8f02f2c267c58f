#pragma once

#include <optional>
#include <string_view>

namespace aimsim::sim {

enum class Phase { Ready, Task, Feedback, Done };
enum class Outcome { Pending, Success, Failure };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Ready: return "ready";
    case Phase::Task: return "task";
    case Phase::Feedback: return "feedback";
    case Phase::Done: return "done";
  }
  return "?";
}

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pending: return "pending";
    case Outcome::Success: return "success";
    case Outcome::Failure: return "failure";
  }
  return "?";
}

struct TrialDurations {
  double ready = 0.5;
  double task = 6.0;
  double feedback = 0.5;
};

struct TrialState {
  Phase phase = Phase::Ready;
  double phaseStart = 0.0;
  double taskStart = 0.0;
  Outcome outcome = Outcome::Pending;
  std::optional<double> completionTime;
  int shotsFired = 0;
  int shotsHit = 0;

  friend bool operator==(const TrialState&, const TrialState&) = default;
};

/// What happened during one frame, as seen by the trial state machine.
struct TrialEvents {
  double now = 0.0;                      // end of the frame just simulated
  std::optional<double> targetDestroyed; // time of the destroying hit
};

namespace detail {

inline TrialState advance_once(TrialState t, const TrialDurations& d, const TrialEvents& e) {
  constexpr double kEps = 1e-9;
  switch (t.phase) {
    case Phase::Ready:
      if (e.now - t.phaseStart >= d.ready - kEps) {
        t.phase = Phase::Task;
        t.phaseStart = e.now;
        t.taskStart = e.now;
      }
      break;
    case Phase::Task:
      if (e.targetDestroyed && *e.targetDestroyed - t.taskStart <= d.task + kEps) {
        t.outcome = Outcome::Success;
        t.completionTime = *e.targetDestroyed - t.taskStart;
        t.phase = Phase::Feedback;
        t.phaseStart = e.now;
      } else if (e.now - t.taskStart >= d.task - kEps) {
        t.outcome = Outcome::Failure;
        t.phase = Phase::Feedback;
        t.phaseStart = e.now;
      }
      break;
    case Phase::Feedback:
      if (e.now - t.phaseStart >= d.feedback - kEps) t.phase = Phase::Done;
      break;
    case Phase::Done:
      break;
  }
  return t;
}

}  // namespace detail

/// Phases only advance: ready -> task after the ready duration, task ->
/// feedback on destruction (success) or when the task duration runs out
/// (failure), feedback -> done after the feedback duration. Zero-length
/// phases are passed through within the same call.
inline TrialState trial_advance(TrialState t, const TrialDurations& d, const TrialEvents& e) {
  while (true) {
    const TrialState next = detail::advance_once(t, d, e);
    if (next.phase == t.phase) return next;
    t = next;
  }
}

}  // namespace aimsim::sim
