#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "aimsim/anyconf.hpp"
#include "aimsim/analysis.hpp"
#include "aimsim/psychophys.hpp"
#include "aimsim/rng.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using aimsim::Rng;
using aimsim::anyconf::Value;

// ---------------------------------------------------------------------------
// Random documents. One pass writes the same tree twice: once as strict
// JSON and once with AnyLite extensions (comments, bare keys, `=`, trailing
// commas), so the JSON text can be checked by a reference parser and both
// texts must give the same tree.

struct DocPair {
  std::string json;
  std::string lite;
};

class DocGenerator {
 public:
  explicit DocGenerator(std::uint64_t seed) : rng_(seed) {}

  DocPair next() {
    DocPair d;
    space(d);
    value(d, 0);
    space(d);
    return d;
  }

 private:
  bool chance(double p) { return rng_.uniform01() < p; }
  int pick(int n) { return static_cast<int>(rng_.below(static_cast<std::uint64_t>(n))); }

  void both(DocPair& d, const std::string& s) {
    d.json += s;
    d.lite += s;
  }

  void space(DocPair& d) {
    static const char* kWs[] = {"", " ", "\n", "\t", "  ", "\r\n", " \n  "};
    const std::string w = kWs[pick(7)];
    d.json += w;
    d.lite += w;
    if (chance(0.15)) {
      if (chance(0.5)) {
        d.lite += "// note, with \"quotes\" { and } ]\n";
      } else {
        d.lite += "/* block ** comment / ";
        d.lite += chance(0.5) ? "spanning\nlines" : "x";
        d.lite += " */";
      }
      if (chance(0.5)) d.lite += " ";
    }
  }

  std::string number() {
    std::string s;
    if (chance(0.4)) s += '-';
    if (chance(0.2)) {
      s += '0';
    } else {
      s += static_cast<char>('1' + pick(9));
      const int digits = pick(chance(0.1) ? 25 : 8);
      for (int i = 0; i < digits; ++i) s += static_cast<char>('0' + pick(10));
    }
    if (chance(0.4)) {
      s += '.';
      const int digits = 1 + pick(17);
      for (int i = 0; i < digits; ++i) s += static_cast<char>('0' + pick(10));
    }
    if (chance(0.3)) {
      s += chance(0.5) ? 'e' : 'E';
      const int r = pick(3);
      if (r == 1) s += '+';
      if (r == 2) s += '-';
      const int digits = 1 + pick(2);
      for (int i = 0; i < digits; ++i) s += static_cast<char>('0' + pick(10));
    }
    return s;
  }

  // Body of a string literal, already escaped for JSON.
  std::string string_body(bool lettersOnly) {
    std::string s;
    const int len = pick(10);
    for (int i = 0; i < len; ++i) {
      if (lettersOnly) {
        s += static_cast<char>((chance(0.5) ? 'a' : 'A') + pick(26));
        continue;
      }
      switch (pick(12)) {
        case 0: s += "\\\""; break;
        case 1: s += "\\\\"; break;
        case 2: s += "\\/"; break;
        case 3: {
          static const char* kEsc[] = {"\\b", "\\f", "\\n", "\\r", "\\t"};
          s += kEsc[pick(5)];
          break;
        }
        case 4: {
          char buf[8];
          const unsigned cp = 1 + static_cast<unsigned>(pick(0xD7FF));
          std::snprintf(buf, sizeof buf, chance(0.5) ? "\\u%04x" : "\\u%04X", cp);
          s += buf;
          break;
        }
        case 5: {
          char buf[16];
          const unsigned hi = 0xD800 + static_cast<unsigned>(pick(0x400));
          const unsigned lo = 0xDC00 + static_cast<unsigned>(pick(0x400));
          std::snprintf(buf, sizeof buf, "\\u%04X\\u%04x", hi, lo);
          s += buf;
          break;
        }
        case 6: {
          static const char* kUtf8[] = {"\xC3\xA9", "\xE2\x82\xAC", "\xF0\x9F\x8E\xAF", "\xCE\xB1", "\xE6\x97\xA5"};
          s += kUtf8[pick(5)];
          break;
        }
        case 7: s += ' '; break;
        case 8: s += "//"; break;
        default: s += static_cast<char>('a' + pick(26)); break;
      }
    }
    return s;
  }

  void value(DocPair& d, int depth) {
    const int kind = depth >= 5 ? pick(4) : pick(6);
    switch (kind) {
      case 0: {
        static const char* kLit[] = {"null", "true", "false"};
        both(d, kLit[pick(3)]);
        break;
      }
      case 1: both(d, number()); break;
      case 2: both(d, "\"" + string_body(false) + "\""); break;
      case 3: both(d, number()); break;
      case 4: {
        both(d, "[");
        const int n = pick(6);
        space(d);
        for (int i = 0; i < n; ++i) {
          if (i > 0) {
            both(d, ",");
            space(d);
          }
          value(d, depth + 1);
          space(d);
        }
        if (n > 0 && chance(0.4)) d.lite += ",";
        both(d, "]");
        break;
      }
      default: {
        both(d, "{");
        const int n = pick(6);
        space(d);
        for (int i = 0; i < n; ++i) {
          if (i > 0) {
            both(d, ",");
            space(d);
          }
          const bool plain = chance(0.5);
          // Unique suffix; the bases never contain '_' or digits.
          const std::string key = (plain ? "k" : "") + string_body(plain) + "_" + std::to_string(i);
          d.json += "\"" + key + "\"";
          d.lite += (plain && chance(0.7)) ? key : "\"" + key + "\"";
          space(d);
          d.json += ":";
          d.lite += chance(0.5) ? "=" : ":";
          space(d);
          value(d, depth + 1);
          space(d);
        }
        if (n > 0 && chance(0.4)) d.lite += ",";
        both(d, "}");
        break;
      }
    }
  }

  Rng rng_;
};

/// Reference tree from nlohmann's parser, in this library's value model.
inline Value from_reference(const nlohmann::ordered_json& j) {
  using aimsim::anyconf::List;
  using aimsim::anyconf::Table;
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::null: return Value(nullptr);
    case nlohmann::ordered_json::value_t::boolean: return Value(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
    case nlohmann::ordered_json::value_t::number_unsigned:
    case nlohmann::ordered_json::value_t::number_float: return Value(j.get<double>());
    case nlohmann::ordered_json::value_t::string: return Value(j.get<std::string>());
    case nlohmann::ordered_json::value_t::array: {
      List out;
      for (const auto& e : j) out.push_back(from_reference(e));
      return Value(std::move(out));
    }
    case nlohmann::ordered_json::value_t::object: {
      Table out;
      for (const auto& [k, v] : j.items()) out.emplace_back(k, from_reference(v));
      return Value(std::move(out));
    }
    default: throw std::runtime_error("unsupported reference value");
  }
}

// ---------------------------------------------------------------------------
// Synthetic trial tables

/// 60 trials with a planted training effect: successful completion times in
/// the first half ~ N(firstMean, sigma), in the second half ~ N(secondMean,
/// sigma). `failures` failures are spread over both halves, the odd one in
/// the first half, so the successes split as floor/ceil.
inline aimsim::analysis::TrialTable planted_trend(std::uint64_t seed, int trials = 60, int failures = 5,
                                                  double firstMean = 1.78, double secondMean = 1.34,
                                                  double sigma = 0.2, double taskDuration = 6.0) {
  Rng rng(seed);
  const int half = trials / 2;
  const int firstFailures = (failures + 1) / 2;
  std::vector<int> firstSlots(static_cast<std::size_t>(half)), secondSlots(static_cast<std::size_t>(trials - half));
  for (int i = 0; i < half; ++i) firstSlots[static_cast<std::size_t>(i)] = i;
  for (int i = half; i < trials; ++i) secondSlots[static_cast<std::size_t>(i - half)] = i;
  rng.shuffle(firstSlots.begin(), firstSlots.end());
  rng.shuffle(secondSlots.begin(), secondSlots.end());
  std::vector<bool> failed(static_cast<std::size_t>(trials), false);
  for (int i = 0; i < firstFailures; ++i) failed[static_cast<std::size_t>(firstSlots[static_cast<std::size_t>(i)])] = true;
  for (int i = 0; i < failures - firstFailures; ++i)
    failed[static_cast<std::size_t>(secondSlots[static_cast<std::size_t>(i)])] = true;

  aimsim::analysis::TrialTable table;
  for (int i = 0; i < trials; ++i) {
    aimsim::TrialRecord r;
    r.trialIndex = i;
    r.sessionId = "demo";
    r.targetMotionId = "wander";
    r.frameDelay = 2;
    r.seedStream = seed;
    if (failed[static_cast<std::size_t>(i)]) {
      r.success = false;
      r.shotsFired = 360;
    } else {
      const double mean = i < half ? firstMean : secondMean;
      r.success = true;
      r.completionTime = std::clamp(mean + sigma * rng.normal(), 0.05, taskDuration);
      r.shotsFired = static_cast<int>(std::ceil(*r.completionTime * 60.0));
      r.shotsHit = 60;
    }
    table.push_back(std::move(r));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Staircase against a simulated observer

/// Logistic psychometric function p(correct | level).
struct LogisticObserver {
  double midpoint = 5.0;  // level at p = 0.5
  double slope = 1.5;     // 1/level units

  double p_correct(double level) const { return 1.0 / (1.0 + std::exp(-slope * (level - midpoint))); }
  /// Level at which p(correct) = p.
  double level_at(double p) const { return midpoint + std::log(p / (1.0 - p)) / slope; }
};

inline double run_logistic_staircase(const LogisticObserver& obs, std::uint64_t seed, double start, double step,
                                     int reversals, double lo, double hi, int maxTrials = 2000) {
  namespace pp = aimsim::psychophys;
  Rng rng(seed);
  auto s = pp::make_staircase(start, step, 1, 2, lo, hi, reversals);
  for (int t = 0; t < maxTrials && !s.complete(); ++t) {
    const bool correct = rng.uniform01() < obs.p_correct(s.currentLevel);
    s = pp::staircase_step(s, correct ? pp::Response::Correct : pp::Response::Incorrect);
  }
  if (!s.complete()) throw std::runtime_error("staircase did not converge");
  return pp::staircase_threshold(s);
}

// ---------------------------------------------------------------------------
// Files

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("aimsim-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline fs::path docs_dir() { return fs::path(AIMSIM_SOURCE_DIR) / "docs"; }

}  // namespace testsupport
