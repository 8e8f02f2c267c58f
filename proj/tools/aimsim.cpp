// Command-line front end: validate, run, analyze, latency.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aimsim/commands.hpp"

int main(int argc, char** argv) {
  using namespace aimsim::cli;

  CLI::App app{"Headless targeting-task experiment engine"};
  app.require_subcommand(1);

  ValidateOptions validate;
  auto* validateCmd = app.add_subcommand("validate", "Parse and check an experiment config");
  validateCmd->add_option("config", validate.configPath, "Experiment config (*.exp.any)")->required();

  RunOptions run;
  std::string users, status, session;
  auto* runCmd = app.add_subcommand("run", "Run the user's next session with the synthetic agent");
  runCmd->add_option("config", run.configPath, "Experiment config (*.exp.any)")->required();
  runCmd->add_option("--user", run.userId, "User id from the user table")->required();
  runCmd->add_option("--seed", run.seed, "Master seed")->required();
  runCmd->add_option("--out", run.outDir, "Output directory")->required();
  runCmd->add_option("--users", users, "User table (default: users.any next to the config)");
  runCmd->add_option("--status", status, "Status file (default: <out>/status.any)");
  runCmd->add_option("--session", session, "Run this session instead of the next one");
  runCmd->add_flag("--force", run.force, "Allow re-running a completed --session");
  runCmd->add_flag("--frames-log", run.framesLog, "Also write frames.jsonl");

  AnalyzeOptions analyze;
  double taskDuration = 0.0;
  std::string plot, summaryOut;
  auto* analyzeCmd = app.add_subcommand("analyze", "Summarize a trials.csv");
  analyzeCmd->add_option("results", analyze.resultsPath, "trials.csv")->required();
  analyzeCmd->add_option("--group-size", analyze.groupSize, "Trials per score group")->capture_default_str();
  auto* taskOpt = analyzeCmd->add_option("--task-duration", taskDuration,
                                         "Task duration in seconds (default: from manifest.any, else 6)");
  analyzeCmd->add_option("--plot", plot, "Write an SVG training-curve plot");
  analyzeCmd->add_option("--out", summaryOut, "Also write the JSON summary to this file");

  LatencyOptions latency;
  double refresh = 0.0;
  std::string latencyPlot;
  auto* latencyCmd = app.add_subcommand("latency", "Click-to-photon latency model");
  latencyCmd->add_option("--fps", latency.fps, "Frame rate")->capture_default_str();
  auto* refreshOpt = latencyCmd->add_option("--refresh", refresh, "Display refresh rate (default: --fps)");
  latencyCmd->add_option("--delay-frames", latency.delayFrames, "Added frames of delay")->capture_default_str();
  latencyCmd->add_option("--clicks", latency.clicks, "Number of simulated clicks")->capture_default_str();
  latencyCmd->add_option("--seed", latency.seed, "Seed")->capture_default_str();
  latencyCmd->add_option("--plot", latencyPlot, "Write an SVG histogram");

  CLI11_PARSE(app, argc, argv);

  if (*validateCmd) return cmd_validate(validate, std::cout, std::cerr);
  if (*runCmd) {
    if (!users.empty()) run.usersPath = users;
    if (!status.empty()) run.statusPath = status;
    if (!session.empty()) run.sessionId = session;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*analyzeCmd) {
    if (*taskOpt) analyze.taskDuration = taskDuration;
    if (!plot.empty()) analyze.plotPath = plot;
    if (!summaryOut.empty()) analyze.outPath = summaryOut;
    return cmd_analyze(analyze, std::cout, std::cerr);
  }
  if (*latencyCmd) {
    if (*refreshOpt) latency.refresh = refresh;
    if (!latencyPlot.empty()) latency.plotPath = latencyPlot;
    return cmd_latency(latency, std::cout, std::cerr);
  }
  return kUsage;
}
