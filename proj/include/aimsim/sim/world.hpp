#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aimsim/experiment.hpp"
#include "aimsim/rng.hpp"
#include "aimsim/sim/camera.hpp"
#include "aimsim/sim/geometry.hpp"
#include "aimsim/sim/target.hpp"
#include "aimsim/sim/timing.hpp"
#include "aimsim/sim/trial.hpp"
#include "aimsim/sim/weapon.hpp"

namespace aimsim::sim {

struct MouseDelta {
  long long dx = 0;
  long long dy = 0;
  friend bool operator==(const MouseDelta&, const MouseDelta&) = default;
};
struct ButtonDown {
  friend bool operator==(const ButtonDown&, const ButtonDown&) = default;
};
struct ButtonUp {
  friend bool operator==(const ButtonUp&, const ButtonUp&) = default;
};

struct InputEvent {
  double timestamp = 0.0;
  std::variant<MouseDelta, ButtonDown, ButtonUp> kind;

  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

inline std::string describe(const InputEvent& e) {
  if (const auto* m = std::get_if<MouseDelta>(&e.kind))
    return "mouse(" + std::to_string(m->dx) + "," + std::to_string(m->dy) + ")";
  return std::holds_alternative<ButtonDown>(e.kind) ? "down" : "up";
}

/// Everything needed to simulate one trial.
struct TrialSetup {
  TrialDurations durations;
  WeaponSpec weapon;
  TargetMotionSpec target;
  double targetHealth = 1.0;
  double frameRate = 60.0;
  double refreshRate = 60.0;
  int frameDelay = 0;
  double sensitivity = 1.0;  // deg/count
};

/// Target as drawn in a frame.
struct TargetView {
  Vec3 center;
  double radius = 0.0;
};

/// A frame that reached the screen: the world as sampled at the frame's
/// start, and the time its centre scanline lit up.
struct DisplayedFrame {
  std::int64_t frameIndex = 0;
  double photonTime = 0.0;
  CameraState camera;
  std::optional<TargetView> target;
};

struct FrameRecord {
  std::int64_t frameIndex = 0;
  double simTime = 0.0;
  std::optional<double> photonTime;  // empty when the frame was not displayed
  Phase phase = Phase::Ready;
  double yaw = 0.0;
  double pitch = 0.0;
  std::optional<TargetState> target;  // end-of-frame state
  std::vector<InputEvent> processed;
  int shots = 0;
  int hits = 0;
  bool dryFire = false;
};

/// One trial's world: frame clock, delayed input, camera, target, weapon and
/// trial phase. Single-threaded; all randomness comes from the trial's stream.
class TrialWorld {
 public:
  TrialWorld(TrialSetup setup, std::uint64_t streamSeed)
      : setup_(std::move(setup)),
        clock_(setup_.frameRate, setup_.refreshRate),
        queue_(setup_.frameDelay),
        weapon_(make_weapon(setup_.weapon)),
        rng_(streamSeed) {}

  /// Runs one frame. `arrived` holds the raw input that arrived since the
  /// previous frame started; it is sampled now.
  ///
  /// Order: enqueue raw input, release events whose delay has elapsed,
  /// apply mouse motion, resolve shots against the target as it is at the
  /// start of this frame, apply damage, advance the target, advance the
  /// trial phase, then work out when (and whether) the frame is seen.
  FrameRecord step_frame(std::span<const InputEvent> arrived) {
    const std::int64_t k = clock_.frameIndex;
    const double now = clock_.sim_time();
    const double dt = clock_.frame_period();

    FrameRecord rec;
    rec.frameIndex = k;
    rec.simTime = now;

    for (const auto& e : arrived) queue_.push(e, k);
    rec.processed = queue_.pop_ready(k);
    for (const auto& e : rec.processed) {
      if (const auto* m = std::get_if<MouseDelta>(&e.kind)) {
        camera_ = apply_mouse(camera_, m->dx, m->dy, setup_.sensitivity);
      } else if (std::holds_alternative<ButtonDown>(e.kind)) {
        if (!weapon_.triggerHeld) weapon_.pressPending = true;
        weapon_.triggerHeld = true;
      } else {
        weapon_.triggerHeld = false;
      }
    }

    std::optional<double> destroyedAt;
    const std::optional<TargetView> view = target_view();
    if (trial_.phase == Phase::Task && target_) {
      const auto fire = weapon_fire_events(weapon_, setup_.weapon, dt, now);
      weapon_ = fire.weapon;
      rec.dryFire = fire.dryFire;
      const bool onTarget = ray_sphere_hit(camera_.position, camera_.view_direction(), view->center, view->radius);
      for (double t : fire.fireTimes) {
        ++rec.shots;
        if (!onTarget || target_->health <= 0.0) continue;
        ++rec.hits;
        *target_ = apply_damage(*target_, setup_.weapon, fire.mode, dt);
        if (target_->health <= 0.0 && !destroyedAt)
          destroyedAt = fire.mode == DamageMode::Continuous ? now + dt : t;
      }
    } else {
      // Button edges outside the task phase are dropped.
      weapon_.pressPending = false;
    }
    trial_.shotsFired += rec.shots;
    trial_.shotsHit += rec.hits;

    if (target_ && !destroyedAt)
      *target_ = update_target(*target_, setup_.target, dt, now - trial_.taskStart, rng_);

    const Phase before = trial_.phase;
    trial_ = trial_advance(trial_, setup_.durations, TrialEvents{now + dt, destroyedAt});
    if (before != Phase::Task && trial_.phase == Phase::Task) {
      target_ = spawn_target(setup_.target, setup_.targetHealth, rng_);
    } else if (trial_.phase != Phase::Task) {
      target_.reset();
    }

    rec.phase = before;
    rec.yaw = camera_.yaw;
    rec.pitch = camera_.pitch;
    const auto pres = present_frame(clock_.frameRate, clock_.refreshRate, k);
    if (pres.displayed) {
      rec.photonTime = pres.photonTime;
      displayed_.push_back(DisplayedFrame{k, pres.photonTime, camera_, view});
    }
    rec.target = target_;
    clock_.advance();
    return rec;
  }

  bool done() const { return trial_.phase == Phase::Done; }
  const TrialState& trial() const { return trial_; }
  const CameraState& camera() const { return camera_; }
  const std::optional<TargetState>& target() const { return target_; }
  const FrameClock& clock() const { return clock_; }
  const TrialSetup& setup() const { return setup_; }
  const WeaponState& weapon() const { return weapon_; }
  std::span<const DisplayedFrame> displayed() const { return displayed_; }

 private:
  std::optional<TargetView> target_view() const {
    if (trial_.phase != Phase::Task || !target_) return std::nullopt;
    return TargetView{target_world_position(*target_, camera_.position), target_->visualRadius};
  }

  TrialSetup setup_;
  FrameClock clock_;
  LatencyQueue<InputEvent> queue_;
  CameraState camera_;
  WeaponState weapon_;
  TrialState trial_;
  std::optional<TargetState> target_;
  std::vector<DisplayedFrame> displayed_;
  Rng rng_;
};

}  // namespace aimsim::sim
