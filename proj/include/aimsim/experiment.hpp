#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aimsim/anyconf.hpp"
#include "aimsim/rng.hpp"

namespace aimsim {

/// Closed interval a parameter is drawn from. Static values use min == max.
struct Range {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

struct WeaponSpec {
  std::optional<int> ammoPerTrial;  // nullopt: unlimited
  double firePeriod = 0.5;
  double damagePerSecond = 2.0;
  bool autoFire = false;

  friend bool operator==(const WeaponSpec&, const WeaponSpec&) = default;
};

struct TargetMotionSpec {
  std::string id;
  Range speed{5.0, 15.0};               // deg/s
  Range motionChangePeriod{1.0, 2.0};   // s
  Range distance{20.0, 20.0};           // world units
  Range visualRadius{0.5, 0.5};         // world units
  Range spawnAzimuth{-20.0, 20.0};      // deg
  Range spawnElevation{-5.0, 5.0};      // deg
  bool horizontalLock = false;
  bool jumpEnabled = false;
  Range jumpSpeed{2.0, 2.0};            // world units/s
  Range jumpPeriod{1.0, 2.0};           // s
  double gravity = 9.8;                 // world units/s^2

  friend bool operator==(const TargetMotionSpec&, const TargetMotionSpec&) = default;
};

struct TrialSet {
  std::string targetMotionId;
  int count = 1;

  friend bool operator==(const TrialSet&, const TrialSet&) = default;
};

/// Parameters of the synthetic aim controller standing in for a subject.
struct AgentParams {
  double reactionTime = 0.2;     // s
  double pursuitGain = 6.0;      // 1/s
  double maxTurnRate = 300.0;    // deg/s
  double motorNoiseSigma = 0.15; // deg per frame, per axis
  double fireThreshold = 1.0;    // multiple of target angular radius
  std::uint64_t seed = 0;

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

/// Staircase attached to one scalar target parameter, e.g.
/// "targets/<id>/visualRadius".
struct StaircaseSpec {
  std::string parameter;
  double startLevel = 0.0;
  double stepSize = 1.0;
  int nUp = 1;
  int nDown = 2;
  double minLevel = 0.0;
  double maxLevel = 0.0;
  int reversals = 9;

  friend bool operator==(const StaircaseSpec&, const StaircaseSpec&) = default;
};

enum class SessionKind { Training, Real };

inline std::string_view to_string(SessionKind k) {
  return k == SessionKind::Training ? "training" : "real";
}

struct SessionSpec {
  std::string id;
  SessionKind kind = SessionKind::Real;
  double frameRate = 60.0;
  int frameDelay = 0;
  double refreshRate = 60.0;
  std::vector<TrialSet> trials;
  std::optional<StaircaseSpec> staircase;
  AgentParams agent;

  int trial_count() const {
    int n = 0;
    for (const auto& t : trials) n += t.count;
    return n;
  }

  friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

struct ExperimentConfig {
  std::string description;
  double readyDuration = 0.5;
  double taskDuration = 6.0;
  double feedbackDuration = 0.5;
  double targetHealth = 1.0;
  WeaponSpec weapon;
  std::vector<TargetMotionSpec> targets;
  std::vector<SessionSpec> sessions;

  const TargetMotionSpec* find_target(std::string_view id) const {
    for (const auto& t : targets)
      if (t.id == id) return &t;
    return nullptr;
  }
  const SessionSpec* find_session(std::string_view id) const {
    for (const auto& s : sessions)
      if (s.id == id) return &s;
    return nullptr;
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct UserRecord {
  std::string userId;
  double cmPer360 = 30.0;
  double mouseDpi = 800.0;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct UserStatus {
  std::string userId;
  std::vector<std::string> completedSessions;
  std::optional<std::vector<std::string>> sessionOrder;

  friend bool operator==(const UserStatus&, const UserStatus&) = default;
};

/// A schema problem, located by key path (e.g. "targets[0].speed").
struct ConfigIssue {
  anyconf::Severity severity = anyconf::Severity::Error;
  std::string path;
  std::string message;

  friend bool operator==(const ConfigIssue&, const ConfigIssue&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ConfigIssue& i) {
  os << (i.severity == anyconf::Severity::Error ? "error: " : "warning: ");
  if (!i.path.empty()) os << i.path << ": ";
  return os << i.message;
}

template <class T>
struct LoadResult {
  std::optional<T> value;
  std::vector<ConfigIssue> issues;

  bool ok() const { return value.has_value(); }
  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const auto& i) {
      return i.severity == anyconf::Severity::Error;
    }));
  }
};

/// Scalar target fields a staircase may drive.
inline constexpr std::string_view kStaircaseFields[] = {
    "speed",       "motionChangePeriod", "distance",  "visualRadius", "spawnAzimuth",
    "spawnElevation", "jumpSpeed",       "jumpPeriod", "gravity"};

struct StaircaseTarget {
  std::string targetId;
  std::string field;
};

/// Splits "targets/<id>/<field>"; nullopt when malformed.
inline std::optional<StaircaseTarget> parse_staircase_parameter(std::string_view path) {
  constexpr std::string_view prefix = "targets/";
  if (path.substr(0, prefix.size()) != prefix) return std::nullopt;
  path.remove_prefix(prefix.size());
  const auto slash = path.rfind('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == path.size()) return std::nullopt;
  StaircaseTarget out{std::string(path.substr(0, slash)), std::string(path.substr(slash + 1))};
  if (std::find(std::begin(kStaircaseFields), std::end(kStaircaseFields), out.field) ==
      std::end(kStaircaseFields))
    return std::nullopt;
  return out;
}

/// Overrides one scalar field of `spec` with a fixed level.
inline void set_target_parameter(TargetMotionSpec& spec, std::string_view field, double level) {
  const Range fixed{level, level};
  if (field == "speed") spec.speed = fixed;
  else if (field == "motionChangePeriod") spec.motionChangePeriod = fixed;
  else if (field == "distance") spec.distance = fixed;
  else if (field == "visualRadius") spec.visualRadius = fixed;
  else if (field == "spawnAzimuth") spec.spawnAzimuth = fixed;
  else if (field == "spawnElevation") spec.spawnElevation = fixed;
  else if (field == "jumpSpeed") spec.jumpSpeed = fixed;
  else if (field == "jumpPeriod") spec.jumpPeriod = fixed;
  else if (field == "gravity") spec.gravity = level;
  else throw std::invalid_argument("not a staircase-capable target field: " + std::string(field));
}

namespace detail {

enum class Bound { Any, NonNegative, Positive };

inline bool satisfies(double v, Bound b) {
  switch (b) {
    case Bound::Any: return true;
    case Bound::NonNegative: return v >= 0.0;
    case Bound::Positive: return v > 0.0;
  }
  return false;
}

inline const char* bound_text(Bound b) {
  switch (b) {
    case Bound::Any: return "";
    case Bound::NonNegative: return "must be >= 0";
    case Bound::Positive: return "must be > 0";
  }
  return "";
}

inline Bound field_bound(std::string_view field) {
  if (field == "speed" || field == "jumpSpeed") return Bound::NonNegative;
  if (field == "spawnAzimuth" || field == "spawnElevation") return Bound::Any;
  return Bound::Positive;
}

// Walks a table, reporting issues against a key path and tracking which
// members were consumed so leftovers can be warned about.
class Reader {
 public:
  Reader(std::vector<ConfigIssue>& issues, std::string path, const anyconf::Value& v)
      : issues_(issues), path_(std::move(path)), value_(v) {
    if (!v.is_table()) {
      error(path_, std::string("expected a table, found ") + anyconf::kind_name(v.kind()));
      valid_ = false;
    }
  }

  bool valid() const { return valid_; }
  const std::string& path() const { return path_; }
  std::vector<ConfigIssue>& issues() { return issues_; }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  void error(std::string path, std::string msg) {
    issues_.push_back({anyconf::Severity::Error, std::move(path), std::move(msg)});
  }
  void warning(std::string path, std::string msg) {
    issues_.push_back({anyconf::Severity::Warning, std::move(path), std::move(msg)});
  }

  const anyconf::Value* get(std::string_view key) {
    if (!valid_) return nullptr;
    used_.emplace_back(key);
    return value_.find(key);
  }

  const anyconf::Value* require(std::string_view key) {
    const auto* v = get(key);
    if (!v && valid_) error(child(key), "required");
    return v;
  }

  std::optional<double> number(std::string_view key, Bound bound, bool required = false) {
    const auto* v = required ? require(key) : get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      error(child(key), std::string("expected a number, found ") + anyconf::kind_name(v->kind()));
      return std::nullopt;
    }
    const double d = v->as_number();
    if (!satisfies(d, bound)) {
      error(child(key), bound_text(bound));
      return std::nullopt;
    }
    return d;
  }

  void read(std::string_view key, double& out, Bound bound) {
    if (auto d = number(key, bound)) out = *d;
  }

  void read_int(std::string_view key, int& out, int minimum) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_number() || v->as_number() != std::floor(v->as_number()) ||
        std::abs(v->as_number()) > 1e9) {
      error(child(key), "expected an integer");
      return;
    }
    const int n = static_cast<int>(v->as_number());
    if (n < minimum) {
      error(child(key), "must be >= " + std::to_string(minimum));
      return;
    }
    out = n;
  }

  void read(std::string_view key, bool& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_bool()) {
      error(child(key), std::string("expected true or false, found ") + anyconf::kind_name(v->kind()));
      return;
    }
    out = v->as_bool();
  }

  std::optional<std::string> text(std::string_view key, bool required = false) {
    const auto* v = required ? require(key) : get(key);
    if (!v) return std::nullopt;
    if (!v->is_text()) {
      error(child(key), std::string("expected text, found ") + anyconf::kind_name(v->kind()));
      return std::nullopt;
    }
    return v->as_text();
  }

  // A range is a number (static), a two-element list [min, max], or a table
  // {min, max}.
  void read(std::string_view key, Range& out, Bound bound) {
    const auto* v = get(key);
    if (!v) return;
    const std::string p = child(key);
    Range r;
    if (v->is_number()) {
      r = {v->as_number(), v->as_number()};
    } else if (v->is_list() && v->as_list().size() == 2 && v->as_list()[0].is_number() &&
               v->as_list()[1].is_number()) {
      r = {v->as_list()[0].as_number(), v->as_list()[1].as_number()};
    } else if (v->is_table()) {
      Reader sub(issues_, p, *v);
      const auto lo = sub.number("min", Bound::Any, true);
      const auto hi = sub.number("max", Bound::Any, true);
      sub.warn_unused();
      if (!lo || !hi) return;
      r = {*lo, *hi};
    } else {
      error(p, "expected a range: number, [min, max] or {min, max}");
      return;
    }
    if (r.min > r.max) {
      error(p, "min > max");
      return;
    }
    if (!satisfies(r.min, bound)) {
      error(p, bound_text(bound));
      return;
    }
    out = r;
  }

  void warn_unused(std::string_view note = "unknown key, ignored") {
    if (!valid_) return;
    for (const auto& [k, v] : value_.as_table()) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) warning(child(k), std::string(note));
    }
  }

 private:
  std::vector<ConfigIssue>& issues_;
  std::string path_;
  const anyconf::Value& value_;
  std::vector<std::string> used_;
  bool valid_ = true;
};

inline std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

inline std::optional<std::uint64_t> read_seed(const anyconf::Value& v) {
  if (v.is_number()) {
    const double d = v.as_number();
    if (d >= 0 && d == std::floor(d) && d <= 9007199254740992.0) return static_cast<std::uint64_t>(d);
    return std::nullopt;
  }
  if (v.is_text()) {
    const auto& s = v.as_text();
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return out;
  }
  return std::nullopt;
}

inline WeaponSpec load_weapon(Reader& r) {
  WeaponSpec w;
  if (const auto* ammo = r.get("ammoPerTrial")) {
    if (ammo->is_null() || (ammo->is_text() && ammo->as_text() == "unlimited")) {
      w.ammoPerTrial.reset();
    } else if (ammo->is_number() && ammo->as_number() == std::floor(ammo->as_number()) &&
               ammo->as_number() >= 1 && ammo->as_number() <= 1e9) {
      w.ammoPerTrial = static_cast<int>(ammo->as_number());
    } else {
      r.error(r.child("ammoPerTrial"), "expected an integer >= 1 or \"unlimited\"");
    }
  }
  r.read("firePeriod", w.firePeriod, Bound::NonNegative);
  r.read("damagePerSecond", w.damagePerSecond, Bound::Positive);
  r.read("autoFire", w.autoFire);
  if (!w.autoFire && w.firePeriod == 0.0)
    r.warning(r.child("firePeriod"), "0 with autoFire off: discrete shots deal no damage");
  r.warn_unused("weapon presentation key, ignored");
  return w;
}

inline TargetMotionSpec load_target(Reader& r) {
  TargetMotionSpec t;
  if (auto id = r.text("id", true)) t.id = *id;
  r.read("speed", t.speed, Bound::NonNegative);
  r.read("motionChangePeriod", t.motionChangePeriod, Bound::Positive);
  r.read("distance", t.distance, Bound::Positive);
  r.read("visualRadius", t.visualRadius, Bound::Positive);
  r.read("spawnAzimuth", t.spawnAzimuth, Bound::Any);
  r.read("spawnElevation", t.spawnElevation, Bound::Any);
  if (t.spawnElevation.min < -89.0 || t.spawnElevation.max > 89.0)
    r.error(r.child("spawnElevation"), "must lie within [-89, 89]");
  r.read("horizontalLock", t.horizontalLock);
  r.read("jumpEnabled", t.jumpEnabled);
  r.read("jumpSpeed", t.jumpSpeed, Bound::NonNegative);
  r.read("jumpPeriod", t.jumpPeriod, Bound::Positive);
  r.read("gravity", t.gravity, Bound::Positive);
  r.warn_unused();
  return t;
}

inline AgentParams load_agent(Reader& r) {
  AgentParams a;
  r.read("reactionTime", a.reactionTime, Bound::NonNegative);
  r.read("pursuitGain", a.pursuitGain, Bound::Positive);
  r.read("maxTurnRate", a.maxTurnRate, Bound::Positive);
  r.read("motorNoiseSigma", a.motorNoiseSigma, Bound::NonNegative);
  r.read("fireThreshold", a.fireThreshold, Bound::Positive);
  if (const auto* s = r.get("seed")) {
    if (auto seed = read_seed(*s)) a.seed = *seed;
    else r.error(r.child("seed"), "expected a non-negative integer (or decimal text)");
  }
  r.warn_unused();
  return a;
}

inline StaircaseSpec load_staircase(Reader& r) {
  StaircaseSpec s;
  if (auto p = r.text("parameter", true)) s.parameter = *p;
  const auto start = r.number("startLevel", Bound::Any, true);
  const auto step = r.number("stepSize", Bound::Positive, true);
  const auto lo = r.number("minLevel", Bound::Any, true);
  const auto hi = r.number("maxLevel", Bound::Any, true);
  r.read_int("nUp", s.nUp, 1);
  r.read_int("nDown", s.nDown, 1);
  r.read_int("reversals", s.reversals, 2);
  r.warn_unused();
  if (start) s.startLevel = *start;
  if (step) s.stepSize = *step;
  if (lo) s.minLevel = *lo;
  if (hi) s.maxLevel = *hi;
  if (lo && hi && *lo > *hi) r.error(r.path(), "minLevel > maxLevel");
  else if (lo && hi && start && (*start < *lo || *start > *hi))
    r.error(r.child("startLevel"), "outside [minLevel, maxLevel]");
  return s;
}

inline SessionSpec load_session(Reader& r) {
  SessionSpec s;
  if (auto id = r.text("id", true)) s.id = *id;
  if (auto kind = r.text("kind")) {
    if (*kind == "training") s.kind = SessionKind::Training;
    else if (*kind == "real") s.kind = SessionKind::Real;
    else r.error(r.child("kind"), "expected \"training\" or \"real\"");
  }
  r.read("frameRate", s.frameRate, Bound::Positive);
  r.read_int("frameDelay", s.frameDelay, 0);
  s.refreshRate = s.frameRate;
  r.read("refreshRate", s.refreshRate, Bound::Positive);
  if (const auto* trials = r.require("trials")) {
    const std::string base = r.child("trials");
    if (!trials->is_list() || trials->as_list().empty()) {
      r.error(base, "expected a non-empty list of {targetMotionId, count}");
    } else {
      for (std::size_t i = 0; i < trials->as_list().size(); ++i) {
        Reader t(r.issues(), index_path(base, i), trials->as_list()[i]);
        if (!t.valid()) continue;
        TrialSet set;
        if (auto id = t.text("targetMotionId", true)) set.targetMotionId = *id;
        if (!t.get("count")) t.error(t.child("count"), "required");
        t.read_int("count", set.count, 1);
        t.warn_unused();
        s.trials.push_back(std::move(set));
      }
    }
  }
  if (const auto* st = r.get("staircase")) {
    Reader sr(r.issues(), r.child("staircase"), *st);
    if (sr.valid()) s.staircase = load_staircase(sr);
  }
  if (const auto* ag = r.get("agent")) {
    Reader ar(r.issues(), r.child("agent"), *ag);
    if (ar.valid()) s.agent = load_agent(ar);
  }
  r.warn_unused();
  return s;
}

inline anyconf::Value range_value(const Range& r) { return anyconf::List{r.min, r.max}; }

}  // namespace detail

/// Maps a parsed experiment document onto a validated config. Unknown keys
/// (and `scene`) produce warnings; any error leaves `value` empty.
inline LoadResult<ExperimentConfig> load_experiment(const anyconf::Value& tree) {
  using detail::Bound;
  LoadResult<ExperimentConfig> result;
  detail::Reader r(result.issues, "", tree);
  if (!r.valid()) return result;

  ExperimentConfig cfg;
  if (auto d = r.text("description")) cfg.description = *d;
  if (r.get("scene")) r.warning("scene", "scene selection is not simulated, ignored");
  r.read("readyDuration", cfg.readyDuration, Bound::NonNegative);
  r.read("taskDuration", cfg.taskDuration, Bound::Positive);
  r.read("feedbackDuration", cfg.feedbackDuration, Bound::NonNegative);
  r.read("targetHealth", cfg.targetHealth, Bound::Positive);

  if (const auto* w = r.get("weapon")) {
    detail::Reader wr(result.issues, "weapon", *w);
    if (wr.valid()) cfg.weapon = detail::load_weapon(wr);
  }

  if (const auto* targets = r.require("targets")) {
    if (!targets->is_list() || targets->as_list().empty()) {
      r.error("targets", "expected a non-empty list of target motion tables");
    } else {
      for (std::size_t i = 0; i < targets->as_list().size(); ++i) {
        detail::Reader tr(result.issues, detail::index_path("targets", i), targets->as_list()[i]);
        if (!tr.valid()) continue;
        auto spec = detail::load_target(tr);
        if (!spec.id.empty() && cfg.find_target(spec.id))
          tr.error(tr.child("id"), "duplicate target id '" + spec.id + "'");
        cfg.targets.push_back(std::move(spec));
      }
    }
  }

  if (const auto* sessions = r.require("sessions")) {
    if (!sessions->is_list() || sessions->as_list().empty()) {
      r.error("sessions", "expected a non-empty list of session tables");
    } else {
      for (std::size_t i = 0; i < sessions->as_list().size(); ++i) {
        const std::string path = detail::index_path("sessions", i);
        detail::Reader sr(result.issues, path, sessions->as_list()[i]);
        if (!sr.valid()) continue;
        auto session = detail::load_session(sr);
        if (!session.id.empty() && cfg.find_session(session.id))
          sr.error(sr.child("id"), "duplicate session id '" + session.id + "'");
        for (std::size_t j = 0; j < session.trials.size(); ++j) {
          const auto& id = session.trials[j].targetMotionId;
          if (!id.empty() && !cfg.find_target(id))
            sr.error(path + ".trials" + "[" + std::to_string(j) + "].targetMotionId",
                     "unresolved target motion id '" + id + "'");
        }
        if (session.staircase) {
          const std::string sp = path + ".staircase.parameter";
          const auto target = parse_staircase_parameter(session.staircase->parameter);
          if (!session.staircase->parameter.empty() && !target) {
            sr.error(sp, "expected \"targets/<id>/<field>\" naming a scalar target field");
          } else if (target && !cfg.find_target(target->targetId)) {
            sr.error(sp, "unresolved target motion id '" + target->targetId + "'");
          } else if (target) {
            const auto bound = detail::field_bound(target->field);
            if (!detail::satisfies(session.staircase->minLevel, bound))
              sr.error(path + ".staircase.minLevel",
                       std::string(detail::bound_text(bound)) + " for " + target->field);
          }
        }
        cfg.sessions.push_back(std::move(session));
      }
    }
  }
  r.warn_unused();

  if (result.error_count() == 0) result.value = std::move(cfg);
  return result;
}

/// Full tree with every default materialized; loading it back yields an
/// equal config.
inline anyconf::Value to_value(const ExperimentConfig& cfg) {
  using anyconf::List;
  using anyconf::Table;
  using anyconf::Value;
  using detail::range_value;

  Table weapon{
      {"ammoPerTrial", cfg.weapon.ammoPerTrial ? Value(*cfg.weapon.ammoPerTrial) : Value("unlimited")},
      {"firePeriod", cfg.weapon.firePeriod},
      {"damagePerSecond", cfg.weapon.damagePerSecond},
      {"autoFire", cfg.weapon.autoFire}};

  List targets;
  for (const auto& t : cfg.targets) {
    targets.emplace_back(Table{{"id", t.id},
                               {"speed", range_value(t.speed)},
                               {"motionChangePeriod", range_value(t.motionChangePeriod)},
                               {"distance", range_value(t.distance)},
                               {"visualRadius", range_value(t.visualRadius)},
                               {"spawnAzimuth", range_value(t.spawnAzimuth)},
                               {"spawnElevation", range_value(t.spawnElevation)},
                               {"horizontalLock", t.horizontalLock},
                               {"jumpEnabled", t.jumpEnabled},
                               {"jumpSpeed", range_value(t.jumpSpeed)},
                               {"jumpPeriod", range_value(t.jumpPeriod)},
                               {"gravity", t.gravity}});
  }

  List sessions;
  for (const auto& s : cfg.sessions) {
    List trials;
    for (const auto& t : s.trials)
      trials.emplace_back(Table{{"targetMotionId", t.targetMotionId}, {"count", t.count}});
    Table session{{"id", s.id},
                  {"kind", std::string(to_string(s.kind))},
                  {"frameRate", s.frameRate},
                  {"frameDelay", s.frameDelay},
                  {"refreshRate", s.refreshRate},
                  {"trials", std::move(trials)}};
    if (s.staircase) {
      const auto& st = *s.staircase;
      session.emplace_back("staircase", Table{{"parameter", st.parameter},
                                              {"startLevel", st.startLevel},
                                              {"stepSize", st.stepSize},
                                              {"nUp", st.nUp},
                                              {"nDown", st.nDown},
                                              {"minLevel", st.minLevel},
                                              {"maxLevel", st.maxLevel},
                                              {"reversals", st.reversals}});
    }
    session.emplace_back("agent", Table{{"reactionTime", s.agent.reactionTime},
                                        {"pursuitGain", s.agent.pursuitGain},
                                        {"maxTurnRate", s.agent.maxTurnRate},
                                        {"motorNoiseSigma", s.agent.motorNoiseSigma},
                                        {"fireThreshold", s.agent.fireThreshold},
                                        {"seed", std::to_string(s.agent.seed)}});
    sessions.emplace_back(std::move(session));
  }

  return Table{{"description", cfg.description},
               {"readyDuration", cfg.readyDuration},
               {"taskDuration", cfg.taskDuration},
               {"feedbackDuration", cfg.feedbackDuration},
               {"targetHealth", cfg.targetHealth},
               {"weapon", std::move(weapon)},
               {"targets", std::move(targets)},
               {"sessions", std::move(sessions)}};
}

/// users.any: a list of {userId, cmPer360, mouseDpi}.
inline LoadResult<std::vector<UserRecord>> load_users(const anyconf::Value& tree) {
  using detail::Bound;
  LoadResult<std::vector<UserRecord>> result;
  if (!tree.is_list()) {
    result.issues.push_back({anyconf::Severity::Error, "", "expected a list of user tables"});
    return result;
  }
  std::vector<UserRecord> users;
  for (std::size_t i = 0; i < tree.as_list().size(); ++i) {
    detail::Reader r(result.issues, detail::index_path("", i), tree.as_list()[i]);
    if (!r.valid()) continue;
    UserRecord u;
    if (auto id = r.text("userId", true)) u.userId = *id;
    if (auto cm = r.number("cmPer360", Bound::Positive, true)) u.cmPer360 = *cm;
    if (auto dpi = r.number("mouseDpi", Bound::Positive, true)) u.mouseDpi = *dpi;
    r.warn_unused();
    if (std::any_of(users.begin(), users.end(), [&](const auto& o) { return o.userId == u.userId; }))
      r.error(r.child("userId"), "duplicate user id '" + u.userId + "'");
    users.push_back(std::move(u));
  }
  if (result.error_count() == 0) result.value = std::move(users);
  return result;
}

inline anyconf::Value to_value(const std::vector<UserRecord>& users) {
  anyconf::List out;
  for (const auto& u : users)
    out.emplace_back(anyconf::Table{{"userId", u.userId}, {"cmPer360", u.cmPer360}, {"mouseDpi", u.mouseDpi}});
  return out;
}

/// status.any: userId -> {completedSessions, sessionOrder?}. Session ids are
/// checked against `sessions`.
inline LoadResult<std::vector<UserStatus>> load_status(const anyconf::Value& tree,
                                                       const std::vector<SessionSpec>& sessions) {
  LoadResult<std::vector<UserStatus>> result;
  detail::Reader root(result.issues, "", tree);
  if (!root.valid()) return result;
  const auto known = [&](const std::string& id) {
    return std::any_of(sessions.begin(), sessions.end(), [&](const auto& s) { return s.id == id; });
  };
  const auto id_list = [&](detail::Reader& r, std::string_view key) -> std::optional<std::vector<std::string>> {
    const auto* v = r.get(key);
    if (!v) return std::nullopt;
    if (!v->is_list()) {
      r.error(r.child(key), "expected a list of session ids");
      return std::nullopt;
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < v->as_list().size(); ++i) {
      const auto& e = v->as_list()[i];
      const std::string p = detail::index_path(r.child(key), i);
      if (!e.is_text()) {
        r.error(p, "expected a session id");
      } else if (!known(e.as_text())) {
        r.error(p, "unknown session id '" + e.as_text() + "'");
      } else if (std::find(ids.begin(), ids.end(), e.as_text()) != ids.end()) {
        r.error(p, "repeated session id '" + e.as_text() + "'");
      } else {
        ids.push_back(e.as_text());
      }
    }
    return ids;
  };

  std::vector<UserStatus> out;
  for (const auto& [userId, entry] : tree.as_table()) {
    detail::Reader r(result.issues, userId, entry);
    if (!r.valid()) continue;
    UserStatus st{userId, {}, std::nullopt};
    if (auto c = id_list(r, "completedSessions")) st.completedSessions = std::move(*c);
    if (auto o = id_list(r, "sessionOrder")) {
      if (o->size() != sessions.size())
        r.error(r.child("sessionOrder"), "must list every session exactly once");
      st.sessionOrder = std::move(*o);
    }
    r.warn_unused();
    out.push_back(std::move(st));
  }
  if (result.error_count() == 0) result.value = std::move(out);
  return result;
}

inline anyconf::Value to_value(const std::vector<UserStatus>& statuses) {
  anyconf::Table out;
  for (const auto& st : statuses) {
    anyconf::List completed(st.completedSessions.begin(), st.completedSessions.end());
    anyconf::Table entry{{"completedSessions", std::move(completed)}};
    if (st.sessionOrder)
      entry.emplace_back("sessionOrder", anyconf::List(st.sessionOrder->begin(), st.sessionOrder->end()));
    out.emplace_back(st.userId, std::move(entry));
  }
  return out;
}

namespace detail {

inline void check_known(const UserStatus& status, const std::vector<SessionSpec>& sessions) {
  const auto known = [&](const std::string& id) {
    return std::any_of(sessions.begin(), sessions.end(), [&](const auto& s) { return s.id == id; });
  };
  for (const auto& id : status.completedSessions)
    if (!known(id)) throw std::invalid_argument("status references unknown session '" + id + "'");
  if (status.sessionOrder) {
    for (const auto& id : *status.sessionOrder)
      if (!known(id)) throw std::invalid_argument("session order references unknown session '" + id + "'");
  }
}

}  // namespace detail

/// Session order used when a user has no explicit order: a permutation of
/// the configured sessions that depends only on (userId, seed).
inline std::vector<std::string> random_session_order(std::string_view userId,
                                                     const std::vector<SessionSpec>& sessions,
                                                     std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& s : sessions) ids.push_back(s.id);
  Rng rng(mix_seed(seed, fnv1a64(userId)));
  rng.shuffle(ids.begin(), ids.end());
  return ids;
}

/// First session not yet completed, in the user's explicit order if set,
/// otherwise in the seeded random order. nullptr when all are complete.
inline const SessionSpec* next_session(const UserStatus& status, const std::vector<SessionSpec>& sessions,
                                       std::uint64_t seed) {
  detail::check_known(status, sessions);
  const auto order = status.sessionOrder ? *status.sessionOrder
                                         : random_session_order(status.userId, sessions, seed);
  for (const auto& id : order) {
    if (std::find(status.completedSessions.begin(), status.completedSessions.end(), id) !=
        status.completedSessions.end())
      continue;
    for (const auto& s : sessions)
      if (s.id == id) return &s;
  }
  return nullptr;
}

inline UserStatus mark_completed(UserStatus status, std::string_view sessionId,
                                 const std::vector<SessionSpec>& sessions) {
  if (std::none_of(sessions.begin(), sessions.end(), [&](const auto& s) { return s.id == sessionId; }))
    throw std::invalid_argument("unknown session '" + std::string(sessionId) + "'");
  if (std::find(status.completedSessions.begin(), status.completedSessions.end(), sessionId) ==
      status.completedSessions.end())
    status.completedSessions.emplace_back(sessionId);
  return status;
}

}  // namespace aimsim
