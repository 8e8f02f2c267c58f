#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "aimsim/experiment.hpp"
#include "aimsim/sim/target.hpp"

namespace aimsim::sim {

struct WeaponState {
  std::optional<int> ammoRemaining;  // nullopt: unlimited
  std::optional<double> lastFireTime;
  bool triggerHeld = false;
  bool pressPending = false;  // button-down edge not yet consumed

  friend bool operator==(const WeaponState&, const WeaponState&) = default;
};

inline WeaponState make_weapon(const WeaponSpec& spec) { return WeaponState{spec.ammoPerTrial, {}, false, false}; }

enum class DamageMode { Discrete, Continuous };

struct FireEvents {
  std::vector<double> fireTimes;
  DamageMode mode = DamageMode::Discrete;
  bool dryFire = false;
  WeaponState weapon;
};

/// Tolerance for comparing fire times built from sums of periods.
inline constexpr double kTimeEpsilon = 1e-9;

/// Resolves the shots taken in the frame that starts at `now`.
///
/// Single-shot weapons fire once per button-down edge, provided a full fire
/// period has elapsed. Auto-fire weapons fire on every fire-period multiple
/// inside the frame while the trigger is held; with a fire period shorter
/// than the frame the weapon is a continuous beam and fires once per frame
/// covering the whole frame.
inline FireEvents weapon_fire_events(WeaponState weapon, const WeaponSpec& spec, double framePeriod, double now) {
  FireEvents out;
  const auto has_ammo = [&] { return !weapon.ammoRemaining || *weapon.ammoRemaining > 0; };
  const auto consume = [&](double t) {
    if (weapon.ammoRemaining) --*weapon.ammoRemaining;
    weapon.lastFireTime = t;
    out.fireTimes.push_back(t);
  };

  if (!spec.autoFire) {
    if (weapon.pressPending) {
      weapon.pressPending = false;
      const bool ready = !weapon.lastFireTime || now - *weapon.lastFireTime >= spec.firePeriod - kTimeEpsilon;
      if (ready) {
        if (has_ammo()) consume(now);
        else out.dryFire = true;
      }
    }
  } else if (weapon.triggerHeld || weapon.pressPending) {
    weapon.pressPending = false;
    if (spec.firePeriod < framePeriod) {
      out.mode = DamageMode::Continuous;
      if (has_ammo()) consume(now);
      else out.dryFire = true;
    } else {
      double t = weapon.lastFireTime ? std::max(now, *weapon.lastFireTime + spec.firePeriod) : now;
      const double frameEnd = now + framePeriod;
      if (!has_ammo() && t < frameEnd - kTimeEpsilon) out.dryFire = true;
      while (t < frameEnd - kTimeEpsilon && has_ammo()) {
        consume(t);
        t += spec.firePeriod;
      }
    }
  }
  out.weapon = weapon;
  return out;
}

/// Health left below this counts as zero. Summing per-frame beam damage
/// otherwise leaves rounding residue (1 - 30 * (1/30) > 0) and costs a frame.
inline constexpr double kHealthEpsilon = 1e-9;

/// Discrete shots deal damagePerSecond * firePeriod; a continuous beam deals
/// damagePerSecond * dt. Health never drops below zero.
inline TargetState apply_damage(TargetState target, const WeaponSpec& spec, DamageMode mode, double dt) {
  const double damage = spec.damagePerSecond * (mode == DamageMode::Discrete ? spec.firePeriod : dt);
  target.health -= damage;
  if (target.health <= kHealthEpsilon) target.health = 0.0;
  return target;
}

}  // namespace aimsim::sim
