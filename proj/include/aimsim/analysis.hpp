#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aimsim/runner.hpp"

namespace aimsim::analysis {

using TrialTable = std::vector<TrialRecord>;

// ---------------------------------------------------------------------------
// trials.csv

inline constexpr std::array<std::string_view, 11> kTrialColumns = {
    "trialIndex", "sessionId", "sessionKind", "targetMotionId", "frameRate", "frameDelay",
    "outcome",    "completionTimeSec", "shotsFired", "shotsHit", "seedStream"};

class CsvError : public std::runtime_error {
 public:
  CsvError(int line, int column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct Field {
  std::string text;
  int column = 1;
};

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
inline std::vector<Field> split_csv(std::string_view line, int lineNo) {
  std::vector<Field> out;
  std::size_t i = 0;
  while (true) {
    Field f;
    f.column = static_cast<int>(i) + 1;
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (true) {
        if (i >= line.size()) throw CsvError(lineNo, f.column, "unterminated quoted field");
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            f.text += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        f.text += line[i++];
      }
      if (i < line.size() && line[i] != ',')
        throw CsvError(lineNo, static_cast<int>(i) + 1, "unexpected character after quoted field");
    } else {
      while (i < line.size() && line[i] != ',') f.text += line[i++];
    }
    out.push_back(std::move(f));
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return out;
}

template <class T>
T parse_field(const Field& f, int lineNo, const char* what) {
  T v{};
  const char* b = f.text.data();
  const char* e = b + f.text.size();
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (f.text.empty() || ec != std::errc() || ptr != e)
    throw CsvError(lineNo, f.column, std::string("expected ") + what + ", found '" + f.text + "'");
  return v;
}

}  // namespace detail

inline void write_trials_csv(std::ostream& os, const TrialTable& table) {
  for (std::size_t i = 0; i < kTrialColumns.size(); ++i) os << (i ? "," : "") << kTrialColumns[i];
  os << '\n';
  for (const auto& r : table) {
    os << r.trialIndex << ',' << detail::csv_field(r.sessionId) << ',' << detail::csv_field(r.sessionKind) << ','
       << detail::csv_field(r.targetMotionId) << ',' << detail::format_number(r.frameRate) << ',' << r.frameDelay
       << ',' << (r.success ? "success" : "failure") << ','
       << (r.completionTime ? detail::format_number(*r.completionTime) : "") << ',' << r.shotsFired << ','
       << r.shotsHit << ',' << r.seedStream << '\n';
  }
}

/// Reads trials.csv. Errors carry the 1-based line and column.
inline TrialTable read_trials_csv(std::istream& is) {
  std::string line;
  int lineNo = 0;
  const auto next_line = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw CsvError(1, 1, "empty file, expected a header row");
  const auto header = detail::split_csv(line, lineNo);
  for (std::size_t i = 0; i < kTrialColumns.size(); ++i) {
    if (i >= header.size())
      throw CsvError(lineNo, static_cast<int>(line.size()) + 1,
                     "missing column '" + std::string(kTrialColumns[i]) + "'");
    if (header[i].text != kTrialColumns[i])
      throw CsvError(lineNo, header[i].column,
                     "expected column '" + std::string(kTrialColumns[i]) + "', found '" + header[i].text + "'");
  }
  if (header.size() > kTrialColumns.size())
    throw CsvError(lineNo, header[kTrialColumns.size()].column, "unexpected extra column");

  TrialTable out;
  while (next_line()) {
    if (line.empty()) continue;
    const auto f = detail::split_csv(line, lineNo);
    if (f.size() != kTrialColumns.size())
      throw CsvError(lineNo, f.back().column,
                     "expected " + std::to_string(kTrialColumns.size()) + " fields, found " + std::to_string(f.size()));
    TrialRecord r;
    r.trialIndex = detail::parse_field<int>(f[0], lineNo, "an integer trial index");
    r.sessionId = f[1].text;
    r.sessionKind = f[2].text;
    r.targetMotionId = f[3].text;
    r.frameRate = detail::parse_field<double>(f[4], lineNo, "a number");
    r.frameDelay = detail::parse_field<int>(f[5], lineNo, "an integer");
    if (f[6].text == "success") r.success = true;
    else if (f[6].text == "failure") r.success = false;
    else throw CsvError(lineNo, f[6].column, "expected 'success' or 'failure', found '" + f[6].text + "'");
    if (r.success) {
      r.completionTime = detail::parse_field<double>(f[7], lineNo, "a completion time");
      if (!std::isfinite(*r.completionTime) || *r.completionTime < 0.0)
        throw CsvError(lineNo, f[7].column, "completion time must be finite and >= 0");
    } else if (!f[7].text.empty()) {
      throw CsvError(lineNo, f[7].column, "failed trials have no completion time");
    }
    r.shotsFired = detail::parse_field<int>(f[8], lineNo, "an integer");
    r.shotsHit = detail::parse_field<int>(f[9], lineNo, "an integer");
    r.seedStream = detail::parse_field<std::uint64_t>(f[10], lineNo, "an unsigned integer");
    if (!out.empty() && r.trialIndex <= out.back().trialIndex)
      throw CsvError(lineNo, f[0].column, "trial indices must be unique and increasing");
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trial statistics

inline TrialTable filter_failures(const TrialTable& table) {
  TrialTable out;
  std::copy_if(table.begin(), table.end(), std::back_inserter(out), [](const auto& r) { return r.success; });
  return out;
}

/// Score per consecutive group of `groupSize` trials (the last group may be
/// short): round(sum over successes of (taskDuration - completionTime)),
/// each term floored at zero. Failures score nothing.
inline std::vector<long long> group_scores(const TrialTable& table, int groupSize, double taskDuration) {
  if (groupSize < 1) throw std::invalid_argument("group size must be >= 1");
  std::vector<long long> out;
  for (std::size_t start = 0; start < table.size(); start += static_cast<std::size_t>(groupSize)) {
    const std::size_t end = std::min(table.size(), start + static_cast<std::size_t>(groupSize));
    double sum = 0.0;
    for (std::size_t i = start; i < end; ++i)
      if (table[i].success && table[i].completionTime) sum += std::max(0.0, taskDuration - *table[i].completionTime);
    out.push_back(std::llround(sum));
  }
  return out;
}

struct CompletionStats {
  double mean = 0.0;
  double standardError = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
};

inline CompletionStats completion_stats(std::span<const double> times) {
  if (times.size() < 2) throw std::invalid_argument("completion stats need at least 2 successful trials");
  const auto n = static_cast<double>(times.size());
  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / n;
  double ss = 0.0;
  for (double t : times) ss += (t - mean) * (t - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n), times.size()};
}

inline std::vector<double> completion_times(const TrialTable& table) {
  std::vector<double> out;
  for (const auto& r : table)
    if (r.success && r.completionTime) out.push_back(*r.completionTime);
  return out;
}

inline CompletionStats completion_stats(const TrialTable& table) {
  const auto times = completion_times(table);
  return completion_stats(std::span<const double>(times));
}

/// Splits the successful trials in order; with an odd count the second half
/// gets the extra trial (55 -> 27 + 28).
inline std::pair<CompletionStats, CompletionStats> split_halves(const TrialTable& table) {
  const auto times = completion_times(table);
  if (times.size() < 4) throw std::invalid_argument("split halves need at least 4 successful trials");
  const std::size_t first = times.size() / 2;
  const std::span<const double> all(times);
  return {completion_stats(all.first(first)), completion_stats(all.subspan(first))};
}

// ---------------------------------------------------------------------------
// Quadratic least squares

struct FitResult {
  double a = 0.0;  // y = a x^2 + b x + c
  double b = 0.0;
  double c = 0.0;
  double residualSumSquares = 0.0;
  std::size_t n = 0;

  double operator()(double x) const { return (a * x + b) * x + c; }
};

class DegenerateFit : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares parabola through the points, from the 3x3 normal equations
/// solved by Gaussian elimination with partial pivoting. x is centred and
/// scaled first and the coefficients mapped back afterwards.
inline FitResult quadratic_fit(std::span<const std::pair<double, double>> points) {
  const std::size_t n = points.size();
  if (n < 3) throw DegenerateFit("quadratic fit needs at least 3 points");
  std::vector<double> xs;
  for (const auto& p : points) {
    if (!std::isfinite(p.first) || !std::isfinite(p.second))
      throw std::invalid_argument("quadratic fit: non-finite point");
    xs.push_back(p.first);
  }
  std::sort(xs.begin(), xs.end());
  if (std::unique(xs.begin(), xs.end()) - xs.begin() < 3)
    throw DegenerateFit("quadratic fit needs at least 3 distinct x values");

  double mean = 0.0;
  for (const auto& p : points) mean += p.first;
  mean /= static_cast<double>(n);
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, std::abs(p.first - mean));

  // Normal equations in u = (x - mean) / scale, unknowns (c', b', a').
  std::array<double, 5> su{};  // sum u^k, k = 0..4
  std::array<double, 3> sy{};  // sum y u^k, k = 0..2
  for (const auto& [x, y] : points) {
    const double u = (x - mean) / scale;
    double uk = 1.0;
    for (int k = 0; k < 5; ++k) {
      su[k] += uk;
      if (k < 3) sy[k] += y * uk;
      uk *= u;
    }
  }
  std::array<std::array<double, 4>, 3> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r][c] = su[r + c];
    m[r][3] = sy[r];
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) <= 1e-12 * su[0]) throw DegenerateFit("quadratic fit: singular normal equations");
    std::swap(m[col], m[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, 3> coef{};
  for (int r = 2; r >= 0; --r) {
    double v = m[r][3];
    for (int c = r + 1; c < 3; ++c) v -= m[r][c] * coef[c];
    coef[r] = v / m[r][r];
  }

  // y = c' + b' u + a' u^2 with u = (x - mean) / scale.
  const double c0 = coef[0];
  const double b1 = coef[1] / scale;
  const double a2 = coef[2] / (scale * scale);
  FitResult fit;
  fit.a = a2;
  fit.b = b1 - 2.0 * a2 * mean;
  fit.c = c0 - b1 * mean + a2 * mean * mean;
  fit.n = n;
  for (const auto& [x, y] : points) {
    const double u = x - mean;
    const double r = y - (c0 + b1 * u + a2 * u * u);
    fit.residualSumSquares += r * r;
  }
  return fit;
}

inline FitResult quadratic_fit(const std::vector<std::pair<double, double>>& points) {
  return quadratic_fit(std::span<const std::pair<double, double>>(points));
}

// ---------------------------------------------------------------------------
// Latency distributions

struct LatencySummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // sample (n - 1); 0 for a single value
  std::size_t n = 0;
  long long histogramStart = 0;  // ms, lower edge of the first 1 ms bin
  std::vector<std::size_t> histogram;
};

inline LatencySummary latency_summary(std::span<const double> latencies) {
  if (latencies.empty()) throw std::invalid_argument("latency summary of an empty sample");
  LatencySummary s;
  s.n = latencies.size();
  const auto [lo, hi] = std::minmax_element(latencies.begin(), latencies.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(latencies.begin(), latencies.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    // Shifted by the first sample so a constant input gives exactly 0.
    const double shift = latencies.front();
    double sum = 0.0, ss = 0.0;
    for (double v : latencies) {
      sum += v - shift;
      ss += (v - shift) * (v - shift);
    }
    const double n = static_cast<double>(s.n);
    s.stddev = std::sqrt(std::max(0.0, (ss - sum * sum / n) / (n - 1)));
  }
  s.histogramStart = static_cast<long long>(std::floor(s.min));
  const auto last = static_cast<long long>(std::floor(s.max));
  s.histogram.assign(static_cast<std::size_t>(last - s.histogramStart + 1), 0);
  for (double v : latencies) ++s.histogram[static_cast<std::size_t>(static_cast<long long>(std::floor(v)) - s.histogramStart)];
  return s;
}

inline LatencySummary latency_summary(const std::vector<double>& latencies) {
  return latency_summary(std::span<const double>(latencies));
}

}  // namespace aimsim::analysis
