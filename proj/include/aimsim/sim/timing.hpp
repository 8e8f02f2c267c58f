#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aimsim/rng.hpp"

namespace aimsim::sim {

/// Simulated frame clock; simTime is always frameIndex * framePeriod.
struct FrameClock {
  double frameRate = 60.0;
  double refreshRate = 60.0;
  std::int64_t frameIndex = 0;

  FrameClock() = default;
  FrameClock(double frameRate_, double refreshRate_) : frameRate(frameRate_), refreshRate(refreshRate_) {
    if (!(frameRate > 0.0) || !(refreshRate > 0.0) || !std::isfinite(frameRate) || !std::isfinite(refreshRate))
      throw std::invalid_argument("frame and refresh rates must be finite and > 0");
  }

  double frame_period() const { return 1.0 / frameRate; }
  double refresh_period() const { return 1.0 / refreshRate; }
  double sim_time() const { return static_cast<double>(frameIndex) * frame_period(); }
  double time_of(std::int64_t frame) const { return static_cast<double>(frame) * frame_period(); }
  void advance() { ++frameIndex; }
};

/// When and whether a frame reaches the screen. A frame finishes one frame
/// period after it starts and is presented at the first refresh boundary at
/// or after that; if a later frame also finishes by then, the later one is
/// shown instead. The photon time is taken at the vertical centre of the
/// display, half a refresh period into scanout.
struct Presentation {
  double completionTime = 0.0;
  double presentTime = 0.0;
  double photonTime = 0.0;
  bool displayed = false;
};

inline Presentation present_frame(double frameRate, double refreshRate, std::int64_t frame) {
  constexpr double kEps = 1e-9;
  Presentation p;
  p.completionTime = static_cast<double>(frame + 1) / frameRate;
  const double refreshes = static_cast<double>(frame + 1) * refreshRate / frameRate;
  const double boundary = std::ceil(refreshes - kEps);
  p.presentTime = boundary / refreshRate;
  p.photonTime = p.presentTime + 0.5 / refreshRate;
  const double nextRefreshes = static_cast<double>(frame + 2) * refreshRate / frameRate;
  p.displayed = nextRefreshes > boundary + kEps;
  return p;
}

/// FIFO that holds every event for exactly `delayFrames` frames.
template <class Event>
class LatencyQueue {
 public:
  explicit LatencyQueue(int delayFrames = 0) : delay_(delayFrames) {
    if (delayFrames < 0) throw std::invalid_argument("delayFrames must be >= 0");
  }

  int delay_frames() const { return delay_; }
  std::size_t size() const { return pending_.size(); }

  void push(Event e, std::int64_t frameIndex) {
    if (!pending_.empty() && pending_.back().second > frameIndex)
      throw std::logic_error("latency queue: events must be enqueued in frame order");
    pending_.emplace_back(std::move(e), frameIndex);
  }

  /// Events whose enqueue frame + delay has been reached, in enqueue order.
  std::vector<Event> pop_ready(std::int64_t frameIndex) {
    std::vector<Event> out;
    while (!pending_.empty() && pending_.front().second + delay_ <= frameIndex) {
      out.push_back(std::move(pending_.front().first));
      pending_.pop_front();
    }
    return out;
  }

 private:
  int delay_;
  std::deque<std::pair<Event, std::int64_t>> pending_;
};

/// Click-to-photon latencies (ms) for clicks at uniformly random times. A
/// click is sampled at the next frame start, waits delayFrames more frames,
/// is simulated and rendered for one frame and is then seen at the centre of
/// the display in the next presentation.
inline std::vector<double> click_to_photon_model(double frameRate, double refreshRate, int delayFrames,
                                                 int clicks, std::uint64_t seed) {
  if (!(frameRate > 0.0) || !(refreshRate > 0.0)) throw std::invalid_argument("rates must be > 0");
  if (delayFrames < 0) throw std::invalid_argument("delayFrames must be >= 0");
  if (clicks < 1) throw std::invalid_argument("clicks must be >= 1");
  // Clicks land anywhere in a one-second window so that every phase between
  // the frame and refresh clocks is sampled.
  constexpr double kWindow = 1.0;
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(clicks));
  for (int i = 0; i < clicks; ++i) {
    const double click = rng.uniform(0.0, kWindow);
    const auto clickFrame = static_cast<std::int64_t>(std::floor(click * frameRate));
    const std::int64_t processed = clickFrame + 1 + delayFrames;
    const double photon = present_frame(frameRate, refreshRate, processed).photonTime;
    out.push_back((photon - click) * 1000.0);
  }
  return out;
}

}  // namespace aimsim::sim
