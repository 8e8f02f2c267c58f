#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "aimsim/anyconf.hpp"
#include "aimsim/experiment.hpp"
#include "support.hpp"

using namespace aimsim;

namespace {

anyconf::Value tree_of(std::string_view text) {
  auto r = anyconf::parse(text);
  EXPECT_TRUE(r.ok()) << text;
  return r.ok() ? *r.value : anyconf::Value();
}

LoadResult<ExperimentConfig> load_text(std::string_view text) { return load_experiment(tree_of(text)); }

bool has_issue(const std::vector<ConfigIssue>& issues, std::string_view path, std::string_view fragment = "") {
  return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) {
    return i.severity == anyconf::Severity::Error && i.path == path &&
           i.message.find(fragment) != std::string::npos;
  });
}

constexpr const char* kMinimal = R"({
  targets = [ { id = "t" } ],
  sessions = [ { id = "s", trials = [ { targetMotionId = "t", count = 3 } ] } ],
})";

std::vector<SessionSpec> sessions_named(std::initializer_list<const char*> ids) {
  std::vector<SessionSpec> out;
  for (const char* id : ids) {
    SessionSpec s;
    s.id = id;
    s.trials = {{"t", 1}};
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Experiment, BundledSample) {
  const auto text = testsupport::read_text(testsupport::docs_dir() / "sample.exp.any");
  const auto r = load_text(text);
  ASSERT_TRUE(r.ok());
  const auto& cfg = *r.value;
  EXPECT_EQ(cfg.targets.size(), 1u);
  EXPECT_EQ(cfg.sessions.size(), 2u);
  EXPECT_TRUE(cfg.weapon.autoFire);
  EXPECT_FALSE(cfg.weapon.ammoPerTrial.has_value());
  EXPECT_EQ(cfg.sessions[0].kind, SessionKind::Training);
  EXPECT_EQ(cfg.sessions[1].frameDelay, 2);
  // `scene` is accepted but flagged.
  EXPECT_TRUE(std::any_of(r.issues.begin(), r.issues.end(), [](const auto& i) {
    return i.severity == anyconf::Severity::Warning && i.path == "scene";
  }));
}

TEST(Experiment, Defaults) {
  const auto r = load_text(kMinimal);
  ASSERT_TRUE(r.ok());
  const auto& cfg = *r.value;
  EXPECT_EQ(cfg.readyDuration, 0.5);
  EXPECT_EQ(cfg.taskDuration, 6.0);
  EXPECT_EQ(cfg.feedbackDuration, 0.5);
  EXPECT_EQ(cfg.targetHealth, 1.0);
  EXPECT_EQ(cfg.weapon, WeaponSpec{});
  const auto& s = cfg.sessions[0];
  EXPECT_EQ(s.frameRate, 60.0);
  EXPECT_EQ(s.refreshRate, 60.0);
  EXPECT_EQ(s.frameDelay, 0);
  EXPECT_EQ(s.kind, SessionKind::Real);
  EXPECT_EQ(s.trial_count(), 3);
}

TEST(Experiment, RefreshDefaultsToFrameRate) {
  const auto r = load_text(R"({targets: [{id: "t"}], sessions: [{id: "s", frameRate: 144, trials: [{targetMotionId: "t", count: 1}]}]})");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value->sessions[0].refreshRate, 144.0);
}

TEST(Experiment, MissingSessions) {
  const auto r = load_text(R"({targets: [{id: "t"}]})");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_issue(r.issues, "sessions", "required"));
  std::ostringstream os;
  os << r.issues.front();
  EXPECT_EQ(os.str(), "error: sessions: required");
}

TEST(Experiment, InvertedRangeNamesPath) {
  const auto r = load_text(R"({targets: [{id: "t", speed: {min: 2.0, max: 1.0}}],
                               sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_issue(r.issues, "targets[0].speed", "min > max"));
}

TEST(Experiment, RangeForms) {
  const auto r = load_text(R"({targets: [{id: "t", speed: 4, distance: [10, 30], visualRadius: {min: 0.2, max: 0.4}}],
                               sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})");
  ASSERT_TRUE(r.ok());
  const auto& t = r.value->targets[0];
  EXPECT_EQ(t.speed, (Range{4, 4}));
  EXPECT_EQ(t.distance, (Range{10, 30}));
  EXPECT_EQ(t.visualRadius, (Range{0.2, 0.4}));
}

TEST(Experiment, SchemaErrors) {
  struct Case {
    const char* text;
    const char* path;
  };
  const Case cases[] = {
      {R"({taskDuration: 0, targets: [{id: "t"}], sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})",
       "taskDuration"},
      {R"({targets: [{id: "t"}], sessions: [{id: "s", trials: [{targetMotionId: "nope"}]}]})",
       "sessions[0].trials[0].targetMotionId"},
      {R"({targets: [{id: "t"}, {id: "t"}], sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})",
       "targets[1].id"},
      {R"({targets: [{id: "t"}], sessions: [{id: "s", frameDelay: -1, trials: [{targetMotionId: "t", count: 1}]}]})",
       "sessions[0].frameDelay"},
      {R"({targets: [{id: "t"}], sessions: [{id: "s", frameRate: "fast", trials: [{targetMotionId: "t", count: 1}]}]})",
       "sessions[0].frameRate"},
      {R"({targets: [{id: "t", distance: -1}], sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})",
       "targets[0].distance"},
      {R"({weapon: {firePeriod: -0.1}, targets: [{id: "t"}], sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})",
       "weapon.firePeriod"},
      {R"({targets: [{id: "t"}], sessions: [{id: "s", trials: [{targetMotionId: "t", count: 0}]}]})",
       "sessions[0].trials[0].count"},
      {R"({targets: [{id: "t"}], sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}],
           staircase: {parameter: "targets/t/color", startLevel: 1, stepSize: 1, minLevel: 0, maxLevel: 2}}]})",
       "sessions[0].staircase.parameter"},
  };
  for (const auto& c : cases) {
    const auto r = load_text(c.text);
    EXPECT_FALSE(r.ok()) << c.text;
    EXPECT_TRUE(has_issue(r.issues, c.path)) << c.path << " not reported for " << c.text;
  }
}

TEST(Experiment, UnknownKeysWarn) {
  const auto r = load_text(R"({colour: "red", targets: [{id: "t", wobble: 1}],
                               sessions: [{id: "s", trials: [{targetMotionId: "t", count: 1}]}]})");
  ASSERT_TRUE(r.ok());
  std::set<std::string> warned;
  for (const auto& i : r.issues)
    if (i.severity == anyconf::Severity::Warning) warned.insert(i.path);
  EXPECT_TRUE(warned.count("colour"));
  EXPECT_TRUE(warned.count("targets[0].wobble"));
}

TEST(Experiment, DefaultingIsIdempotent) {
  for (const char* name : {"sample.exp.any", "demo.exp.any", "staircase.exp.any"}) {
    const auto first = load_text(testsupport::read_text(testsupport::docs_dir() / name));
    ASSERT_TRUE(first.ok()) << name;
    const auto text = anyconf::serialize(to_value(*first.value), 2);
    const auto second = load_text(text);
    ASSERT_TRUE(second.ok()) << text;
    EXPECT_EQ(*second.value, *first.value) << name;
    EXPECT_EQ(anyconf::serialize(to_value(*second.value), 2), text);
  }
}

TEST(Experiment, UsersRoundTrip) {
  const auto r = load_users(tree_of(testsupport::read_text(testsupport::docs_dir() / "users.any")));
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.value->size(), 2u);
  EXPECT_EQ((*r.value)[0].userId, "volunteer");
  EXPECT_EQ((*r.value)[0].cmPer360, 30.0);
  const auto again = load_users(to_value(*r.value));
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again.value, *r.value);
}

TEST(Experiment, UsersErrors) {
  EXPECT_FALSE(load_users(tree_of(R"([{userId: "a", cmPer360: 0, mouseDpi: 800}])")).ok());
  EXPECT_FALSE(load_users(tree_of(R"([{userId: "a", cmPer360: 30, mouseDpi: 800}, {userId: "a", cmPer360: 30, mouseDpi: 800}])")).ok());
  EXPECT_FALSE(load_users(tree_of(R"({userId: "a"})")).ok());
}

TEST(Experiment, StatusRoundTripAndValidation) {
  const auto sessions = sessions_named({"A", "B"});
  const auto r = load_status(tree_of(R"({u1: {completedSessions: ["A"]}, u2: {completedSessions: [], sessionOrder: ["B", "A"]}})"),
                             sessions);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.value->size(), 2u);
  EXPECT_EQ((*r.value)[1].sessionOrder, (std::vector<std::string>{"B", "A"}));
  const auto again = load_status(to_value(*r.value), sessions);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again.value, *r.value);

  EXPECT_FALSE(load_status(tree_of(R"({u: {completedSessions: ["C"]}})"), sessions).ok());
  EXPECT_FALSE(load_status(tree_of(R"({u: {completedSessions: [], sessionOrder: ["A"]}})"), sessions).ok());
}

TEST(Experiment, NextSessionExamples) {
  const auto sessions = sessions_named({"A", "B"});
  UserStatus done{"u", {"A", "B"}, std::nullopt};
  EXPECT_EQ(next_session(done, sessions, 1), nullptr);

  UserStatus ordered{"u", {}, std::vector<std::string>{"B", "A"}};
  ASSERT_NE(next_session(ordered, sessions, 1), nullptr);
  EXPECT_EQ(next_session(ordered, sessions, 1)->id, "B");

  UserStatus bad{"u", {"Z"}, std::nullopt};
  EXPECT_THROW(next_session(bad, sessions, 1), std::invalid_argument);
}

TEST(Experiment, NextSessionVisitsEachOnce) {
  const auto sessions = sessions_named({"a", "b", "c", "d", "e"});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    UserStatus st{"user" + std::to_string(seed), {}, std::nullopt};
    std::vector<std::string> visited;
    while (const auto* s = next_session(st, sessions, seed)) {
      ASSERT_EQ(std::count(st.completedSessions.begin(), st.completedSessions.end(), s->id), 0);
      visited.push_back(s->id);
      st = mark_completed(st, s->id, sessions);
      ASSERT_LE(visited.size(), sessions.size());
    }
    std::sort(visited.begin(), visited.end());
    EXPECT_EQ(visited, (std::vector<std::string>{"a", "b", "c", "d", "e"}));
  }
}

TEST(Experiment, RandomSessionOrderDependsOnUserAndSeed) {
  const auto sessions = sessions_named({"a", "b", "c", "d", "e", "f"});
  EXPECT_EQ(random_session_order("x", sessions, 3), random_session_order("x", sessions, 3));
  std::set<std::vector<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) seen.insert(random_session_order("x", sessions, seed));
  EXPECT_GT(seen.size(), 20u);
}

TEST(Experiment, MarkCompleted) {
  const auto sessions = sessions_named({"A", "B"});
  UserStatus st{"u", {}, std::nullopt};
  st = mark_completed(st, "A", sessions);
  st = mark_completed(st, "A", sessions);
  EXPECT_EQ(st.completedSessions, (std::vector<std::string>{"A"}));
  st = mark_completed(st, "B", sessions);
  EXPECT_EQ(st.completedSessions, (std::vector<std::string>{"A", "B"}));
  EXPECT_THROW(mark_completed(st, "C", sessions), std::invalid_argument);
}

TEST(Experiment, StaircaseParameterPaths) {
  const auto p = parse_staircase_parameter("targets/strafe/visualRadius");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->targetId, "strafe");
  EXPECT_EQ(p->field, "visualRadius");
  EXPECT_FALSE(parse_staircase_parameter("targets/strafe"));
  EXPECT_FALSE(parse_staircase_parameter("weapon/firePeriod"));
  EXPECT_FALSE(parse_staircase_parameter("targets/strafe/id"));

  TargetMotionSpec t;
  set_target_parameter(t, "speed", 7.5);
  EXPECT_EQ(t.speed, (Range{7.5, 7.5}));
}
