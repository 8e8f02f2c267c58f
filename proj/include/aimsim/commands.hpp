#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aimsim/analysis.hpp"
#include "aimsim/anyconf.hpp"
#include "aimsim/experiment.hpp"
#include "aimsim/runner.hpp"
#include "aimsim/sim/timing.hpp"
#include "aimsim/svg.hpp"

namespace aimsim::cli {

namespace fs = std::filesystem;

/// Process exit codes shared by all commands.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kSyntaxError = 2,
  kSchemaError = 3,
  kUnknownUser = 4,
  kNoSession = 5,
  kUsage = 64,
};

namespace detail {

inline std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a temporary file and rename, so readers never see a partial file.
inline bool write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    out.flush();
    if (!out) return false;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  return !ec;
}

inline void report(std::ostream& err, const std::string& file, const std::vector<anyconf::Diagnostic>& diags) {
  for (const auto& d : diags) err << file << ':' << d << '\n';
}

inline void report(std::ostream& err, const std::string& file, const std::vector<ConfigIssue>& issues) {
  for (const auto& i : issues) err << file << ": " << i << '\n';
}

/// Reads and parses an AnyLite file; prints diagnostics and sets `code` on failure.
inline std::optional<anyconf::Value> load_tree(const fs::path& path, std::ostream& err, int& code) {
  const auto text = read_file(path);
  if (!text) {
    err << path.string() << ": cannot read file\n";
    code = kIoError;
    return std::nullopt;
  }
  auto parsed = anyconf::parse(*text);
  if (!parsed.ok()) {
    report(err, path.string(), parsed.diagnostics);
    code = kSyntaxError;
    return std::nullopt;
  }
  return std::move(parsed.value);
}

inline std::optional<ExperimentConfig> load_config(const fs::path& path, std::ostream& err, int& code) {
  const auto tree = load_tree(path, err, code);
  if (!tree) return std::nullopt;
  auto loaded = load_experiment(*tree);
  report(err, path.string(), loaded.issues);
  if (!loaded.ok()) {
    code = kSchemaError;
    return std::nullopt;
  }
  return std::move(loaded.value);
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline anyconf::Value stats_value(const analysis::CompletionStats& s) {
  return anyconf::Table{{"mean", s.mean}, {"standardError", s.standardError}, {"n", s.n}};
}

inline anyconf::Value optional_number(const std::optional<double>& v) {
  return v ? anyconf::Value(*v) : anyconf::Value(nullptr);
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct ValidateOptions {
  std::string configPath;
};

/// 0 when the config parses and loads without errors (warnings allowed),
/// 1 on I/O failure, 2 on a syntax error, 3 on a schema error.
inline int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err) {
  int code = kOk;
  const auto cfg = detail::load_config(opt.configPath, err, code);
  if (!cfg) return code;
  out << opt.configPath << ": ok (" << cfg->targets.size() << " target motion type(s), " << cfg->sessions.size()
      << " session(s))\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct RunOptions {
  std::string configPath;
  std::string userId;
  std::uint64_t seed = 0;
  std::string outDir;
  std::optional<std::string> usersPath;   // default: users.any next to the config
  std::optional<std::string> statusPath;  // default: <outDir>/status.any
  std::optional<std::string> sessionId;
  bool force = false;
  bool framesLog = false;
};

/// Runs the user's next session (or the named one) with the session's
/// synthetic agent, then writes trials.csv, manifest.any and the updated
/// status file into the output directory.
inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  int code = kOk;
  const auto cfg = detail::load_config(opt.configPath, err, code);
  if (!cfg) return code;

  const fs::path usersPath =
      opt.usersPath ? fs::path(*opt.usersPath) : fs::path(opt.configPath).parent_path() / "users.any";
  const auto usersTree = detail::load_tree(usersPath, err, code);
  if (!usersTree) return code;
  const auto users = load_users(*usersTree);
  detail::report(err, usersPath.string(), users.issues);
  if (!users.ok()) return kSchemaError;
  const auto user = std::find_if(users.value->begin(), users.value->end(),
                                 [&](const auto& u) { return u.userId == opt.userId; });
  if (user == users.value->end()) {
    err << "unknown user '" << opt.userId << "' (not in " << usersPath.string() << ")\n";
    return kUnknownUser;
  }

  std::error_code ec;
  fs::create_directories(opt.outDir, ec);
  if (ec) {
    err << opt.outDir << ": cannot create output directory: " << ec.message() << '\n';
    return kIoError;
  }
  const fs::path outDir(opt.outDir);
  const fs::path statusPath = opt.statusPath ? fs::path(*opt.statusPath) : outDir / "status.any";

  std::vector<UserStatus> statuses;
  if (fs::exists(statusPath)) {
    const auto tree = detail::load_tree(statusPath, err, code);
    if (!tree) return code;
    auto loaded = load_status(*tree, cfg->sessions);
    detail::report(err, statusPath.string(), loaded.issues);
    if (!loaded.ok()) return kSchemaError;
    statuses = std::move(*loaded.value);
  }
  auto status = std::find_if(statuses.begin(), statuses.end(), [&](const auto& s) { return s.userId == user->userId; });
  if (status == statuses.end()) {
    statuses.push_back(UserStatus{user->userId, {}, std::nullopt});
    status = statuses.end() - 1;
  }

  const SessionSpec* session = nullptr;
  if (opt.sessionId) {
    session = cfg->find_session(*opt.sessionId);
    if (!session) {
      err << "unknown session '" << *opt.sessionId << "'\n";
      return kNoSession;
    }
    const auto& done = status->completedSessions;
    if (std::find(done.begin(), done.end(), session->id) != done.end() && !opt.force) {
      err << "session '" << session->id << "' already completed by '" << user->userId
          << "'; use --force to run it again\n";
      return kNoSession;
    }
  } else {
    session = next_session(*status, cfg->sessions, opt.seed);
    if (!session) {
      err << "user '" << user->userId << "' has completed every session\n";
      return kNoSession;
    }
  }

  std::ofstream frames;
  FrameSink sink;
  if (opt.framesLog) {
    frames.open(outDir / "frames.jsonl", std::ios::binary | std::ios::trunc);
    if (!frames) {
      err << (outDir / "frames.jsonl").string() << ": cannot open for writing\n";
      return kIoError;
    }
    sink = [&frames](int trialIndex, const sim::FrameRecord& r) {
      anyconf::List events;
      for (const auto& e : r.processed) events.emplace_back(sim::describe(e));
      anyconf::Value target = nullptr;
      if (r.target)
        target = anyconf::Table{{"azimuth", r.target->azimuth},
                                {"elevation", r.target->elevation},
                                {"offset", r.target->jumpOffset},
                                {"health", r.target->health}};
      const anyconf::Value line = anyconf::Table{{"trialIndex", trialIndex},
                                                 {"frameIndex", r.frameIndex},
                                                 {"simTime", r.simTime},
                                                 {"photonTime", detail::optional_number(r.photonTime)},
                                                 {"phase", std::string(sim::to_string(r.phase))},
                                                 {"yaw", r.yaw},
                                                 {"pitch", r.pitch},
                                                 {"target", std::move(target)},
                                                 {"events", std::move(events)},
                                                 {"shots", r.shots},
                                                 {"hits", r.hits}};
      frames << anyconf::serialize(line) << '\n';
    };
  }

  const auto result = run_session(*cfg, *session, *user, opt.seed, sink);

  std::ostringstream csv;
  analysis::write_trials_csv(csv, result.trials);
  if (!detail::write_atomic(outDir / "trials.csv", csv.str())) {
    err << (outDir / "trials.csv").string() << ": cannot write\n";
    return kIoError;
  }

  *status = mark_completed(*status, session->id, cfg->sessions);
  if (!detail::write_atomic(statusPath, anyconf::serialize(to_value(statuses), 2) + "\n")) {
    err << statusPath.string() << ": cannot write\n";
    return kIoError;
  }

  const auto successes = analysis::filter_failures(result.trials).size();
  anyconf::Table manifest{{"configPath", opt.configPath},
                          {"userId", user->userId},
                          {"masterSeed", std::to_string(opt.seed)},
                          {"outputDirectory", opt.outDir},
                          {"sessionId", session->id},
                          {"sessionKind", std::string(to_string(session->kind))},
                          {"taskDuration", cfg->taskDuration},
                          {"trials", result.trials.size()},
                          {"successes", successes},
                          {"timestamp", detail::utc_timestamp()}};
  if (result.staircase) {
    anyconf::List reversals(result.staircase->reversals.begin(), result.staircase->reversals.end());
    manifest.emplace_back("staircase", anyconf::Table{{"parameter", session->staircase->parameter},
                                                      {"finalLevel", result.staircase->currentLevel},
                                                      {"reversals", std::move(reversals)},
                                                      {"threshold", detail::optional_number(result.staircaseThreshold)}});
  }
  if (!detail::write_atomic(outDir / "manifest.any", anyconf::serialize(manifest, 2) + "\n")) {
    err << (outDir / "manifest.any").string() << ": cannot write\n";
    return kIoError;
  }

  out << "session " << session->id << " (" << to_string(session->kind) << ", " << session->frameRate << " fps, "
      << session->frameDelay << " frame(s) delay): " << successes << "/" << result.trials.size()
      << " successful trials -> " << (outDir / "trials.csv").string() << '\n';
  if (result.staircaseThreshold) out << "staircase threshold: " << *result.staircaseThreshold << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  std::string resultsPath;
  int groupSize = 10;
  std::optional<double> taskDuration;  // default: manifest.any next to the CSV, else 6 s
  std::optional<std::string> plotPath;
  std::optional<std::string> outPath;
};

/// Summary of a trial table: failure counts, group scores, split-half
/// completion statistics and a quadratic fit of completion time against
/// successful-trial number. Fields needing more successes than available
/// are null.
inline anyconf::Value analyze_table(const analysis::TrialTable& table, int groupSize, double taskDuration) {
  using anyconf::Value;
  const auto successes = analysis::filter_failures(table);
  const auto times = analysis::completion_times(successes);

  anyconf::List scores;
  for (auto s : analysis::group_scores(table, groupSize, taskDuration)) scores.emplace_back(s);

  Value overall = nullptr, first = nullptr, second = nullptr, fit = nullptr;
  if (times.size() >= 2) overall = detail::stats_value(analysis::completion_stats(successes));
  if (times.size() >= 4) {
    const auto [a, b] = analysis::split_halves(successes);
    first = detail::stats_value(a);
    second = detail::stats_value(b);
  }
  if (times.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < times.size(); ++i) pts.emplace_back(static_cast<double>(i + 1), times[i]);
    try {
      const auto f = analysis::quadratic_fit(pts);
      fit = anyconf::Table{{"a", f.a}, {"b", f.b}, {"c", f.c}, {"residualSumSquares", f.residualSumSquares}, {"n", f.n}};
    } catch (const analysis::DegenerateFit&) {
    }
  }

  return anyconf::Table{{"trials", table.size()},
                        {"successes", successes.size()},
                        {"failures", table.size() - successes.size()},
                        {"groupSize", groupSize},
                        {"taskDuration", taskDuration},
                        {"groupScores", std::move(scores)},
                        {"overall", std::move(overall)},
                        {"firstHalf", std::move(first)},
                        {"secondHalf", std::move(second)},
                        {"quadraticFit", std::move(fit)}};
}

inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.groupSize < 1) {
    err << "--group-size must be >= 1\n";
    return kUsage;
  }
  std::ifstream in(opt.resultsPath, std::ios::binary);
  if (!in) {
    err << opt.resultsPath << ": cannot read file\n";
    return kIoError;
  }
  analysis::TrialTable table;
  try {
    table = analysis::read_trials_csv(in);
  } catch (const analysis::CsvError& e) {
    err << opt.resultsPath << ": " << e.what() << '\n';
    return kSyntaxError;
  }
  if (table.empty()) {
    err << opt.resultsPath << ": no trial rows\n";
    return kSyntaxError;
  }

  double taskDuration = 6.0;
  if (opt.taskDuration) {
    taskDuration = *opt.taskDuration;
  } else {
    const auto manifestPath = fs::path(opt.resultsPath).parent_path() / "manifest.any";
    if (const auto text = detail::read_file(manifestPath)) {
      const auto parsed = anyconf::parse(*text);
      if (parsed.ok()) {
        if (const auto* td = parsed.value->find("taskDuration"); td && td->is_number()) taskDuration = td->as_number();
      }
    }
  }

  const auto summary = analyze_table(table, opt.groupSize, taskDuration);
  const std::string json = anyconf::serialize(summary, 2) + "\n";
  out << json;
  if (opt.outPath && !detail::write_atomic(*opt.outPath, json)) {
    err << *opt.outPath << ": cannot write\n";
    return kIoError;
  }
  if (opt.plotPath) {
    const auto times = analysis::completion_times(table);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < times.size(); ++i) pts.emplace_back(static_cast<double>(i + 1), times[i]);
    std::optional<analysis::FitResult> fit;
    try {
      if (pts.size() >= 3) fit = analysis::quadratic_fit(pts);
    } catch (const analysis::DegenerateFit&) {
    }
    if (!detail::write_atomic(*opt.plotPath, svg::training_curve(pts, fit))) {
      err << *opt.plotPath << ": cannot write\n";
      return kIoError;
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct LatencyOptions {
  double fps = 60.0;
  std::optional<double> refresh;  // default: fps
  int delayFrames = 0;
  int clicks = 2000;
  std::uint64_t seed = 1;
  std::optional<std::string> plotPath;
};

inline anyconf::Value latency_report(const LatencyOptions& opt, const analysis::LatencySummary& s) {
  const double refresh = opt.refresh.value_or(opt.fps);
  anyconf::List counts(s.histogram.begin(), s.histogram.end());
  anyconf::Table report{{"frameRate", opt.fps},
                        {"refreshRate", refresh},
                        {"delayFrames", opt.delayFrames},
                        {"clicks", opt.clicks},
                        {"seed", std::to_string(opt.seed)},
                        {"meanMs", s.mean},
                        {"minMs", s.min},
                        {"maxMs", s.max},
                        {"stddevMs", s.stddev}};
  if (refresh == opt.fps) {
    // Matched rates: latency is uniform on [(1.5 + D) T, (2.5 + D) T].
    const double period = 1000.0 / opt.fps;
    report.emplace_back("model", anyconf::Table{{"lowMs", (1.5 + opt.delayFrames) * period},
                                                {"highMs", (2.5 + opt.delayFrames) * period},
                                                {"meanMs", (2.0 + opt.delayFrames) * period}});
  }
  report.emplace_back("histogram", anyconf::Table{{"startMs", s.histogramStart}, {"binMs", 1}, {"counts", std::move(counts)}});
  return report;
}

inline int cmd_latency(const LatencyOptions& opt, std::ostream& out, std::ostream& err) {
  const double refresh = opt.refresh.value_or(opt.fps);
  if (!(opt.fps > 0.0) || !(refresh > 0.0) || !std::isfinite(opt.fps) || !std::isfinite(refresh)) {
    err << "--fps and --refresh must be finite and > 0\n";
    return kUsage;
  }
  if (opt.delayFrames < 0 || opt.clicks < 1) {
    err << "--delay-frames must be >= 0 and --clicks >= 1\n";
    return kUsage;
  }
  const auto samples = sim::click_to_photon_model(opt.fps, refresh, opt.delayFrames, opt.clicks, opt.seed);
  const auto summary = analysis::latency_summary(samples);
  out << anyconf::serialize(latency_report(opt, summary), 2) << '\n';
  if (opt.plotPath && !detail::write_atomic(*opt.plotPath, svg::latency_histogram(summary))) {
    err << *opt.plotPath << ": cannot write\n";
    return kIoError;
  }
  return kOk;
}

}  // namespace aimsim::cli
