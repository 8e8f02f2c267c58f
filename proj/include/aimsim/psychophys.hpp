#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aimsim/experiment.hpp"
#include "aimsim/rng.hpp"

namespace aimsim::psychophys {

struct StimulusLevel {
  std::string conditionId;
  double level = 0.0;

  friend bool operator==(const StimulusLevel&, const StimulusLevel&) = default;
  friend auto operator<=>(const StimulusLevel&, const StimulusLevel&) = default;
};

/// Method of constant stimuli: every (condition, level) pair repeated
/// `perLevelCount` times, in a seeded random order.
struct ConstantStimuliSchedule {
  std::vector<StimulusLevel> entries;
  int perLevelCount = 1;
};

inline ConstantStimuliSchedule make_constant_schedule(const std::vector<StimulusLevel>& levels, int reps,
                                                      std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("constant stimuli: reps must be >= 1");
  if (levels.empty()) throw std::invalid_argument("constant stimuli: no stimulus levels");
  ConstantStimuliSchedule out;
  out.perLevelCount = reps;
  out.entries.reserve(levels.size() * static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) out.entries.insert(out.entries.end(), levels.begin(), levels.end());
  Rng rng(seed);
  rng.shuffle(out.entries.begin(), out.entries.end());
  return out;
}

/// Seeded random execution order of a session's trial sets.
inline std::vector<std::string> order_trials(const std::vector<TrialSet>& sets, std::uint64_t seed) {
  std::vector<std::string> out;
  for (const auto& s : sets) {
    if (s.count < 1) throw std::invalid_argument("trial set '" + s.targetMotionId + "': count must be >= 1");
    out.insert(out.end(), static_cast<std::size_t>(s.count), s.targetMotionId);
  }
  Rng rng(seed);
  rng.shuffle(out.begin(), out.end());
  return out;
}

enum class Response { Correct, Incorrect };
enum class Direction { Undecided, Up, Down };

struct StaircaseState {
  double currentLevel = 0.0;
  double stepSize = 1.0;
  int nUp = 1;
  int nDown = 2;
  double minLevel = 0.0;
  double maxLevel = 0.0;
  std::vector<std::pair<double, Response>> history;
  std::vector<double> reversals;
  int targetReversals = 9;
  Direction runDirection = Direction::Undecided;
  // Consecutive same responses since the last level change.
  int correctRun = 0;
  int incorrectRun = 0;

  bool complete() const { return static_cast<int>(reversals.size()) >= targetReversals; }
};

inline StaircaseState make_staircase(double startLevel, double stepSize, int nUp, int nDown, double minLevel,
                                     double maxLevel, int targetReversals) {
  if (!(stepSize > 0)) throw std::invalid_argument("staircase: stepSize must be > 0");
  if (nUp < 1 || nDown < 1) throw std::invalid_argument("staircase: nUp and nDown must be >= 1");
  if (minLevel > maxLevel) throw std::invalid_argument("staircase: minLevel > maxLevel");
  if (startLevel < minLevel || startLevel > maxLevel)
    throw std::invalid_argument("staircase: startLevel outside bounds");
  if (targetReversals < 2) throw std::invalid_argument("staircase: reversals must be >= 2");
  StaircaseState s;
  s.currentLevel = startLevel;
  s.stepSize = stepSize;
  s.nUp = nUp;
  s.nDown = nDown;
  s.minLevel = minLevel;
  s.maxLevel = maxLevel;
  s.targetReversals = targetReversals;
  return s;
}

inline StaircaseState make_staircase(const StaircaseSpec& spec) {
  return make_staircase(spec.startLevel, spec.stepSize, spec.nUp, spec.nDown, spec.minLevel, spec.maxLevel,
                        spec.reversals);
}

/// Transformed up-down rule: nDown consecutive corrects lower the level by
/// one step, nUp consecutive incorrects raise it. A move against the
/// current run direction records the pre-move level as a reversal.
inline StaircaseState staircase_step(StaircaseState s, Response response) {
  if (s.complete()) throw std::logic_error("staircase already complete");
  s.history.emplace_back(s.currentLevel, response);
  Direction move = Direction::Undecided;
  if (response == Response::Correct) {
    s.incorrectRun = 0;
    if (++s.correctRun >= s.nDown) move = Direction::Down;
  } else {
    s.correctRun = 0;
    if (++s.incorrectRun >= s.nUp) move = Direction::Up;
  }
  if (move == Direction::Undecided) return s;

  s.correctRun = 0;
  s.incorrectRun = 0;
  if (s.runDirection != Direction::Undecided && move != s.runDirection)
    s.reversals.push_back(s.currentLevel);
  s.runDirection = move;
  const double next = s.currentLevel + (move == Direction::Up ? s.stepSize : -s.stepSize);
  s.currentLevel = std::clamp(next, s.minLevel, s.maxLevel);
  return s;
}

/// Mean reversal level, dropping the first two reversals when at least
/// four are targeted.
inline double staircase_threshold(const StaircaseState& s) {
  if (static_cast<int>(s.reversals.size()) < s.targetReversals)
    throw std::logic_error("staircase: insufficient reversals for a threshold estimate");
  auto first = s.reversals.end() - s.targetReversals;
  if (s.targetReversals >= 4) first += 2;
  return std::accumulate(first, s.reversals.end(), 0.0) / static_cast<double>(s.reversals.end() - first);
}

}  // namespace aimsim::psychophys
