#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "aimsim/analysis.hpp"
#include "support.hpp"

using namespace aimsim;
using namespace aimsim::analysis;

namespace {

TrialRecord success(int i, double t) {
  TrialRecord r;
  r.trialIndex = i;
  r.sessionId = "s";
  r.targetMotionId = "t";
  r.success = true;
  r.completionTime = t;
  return r;
}

TrialRecord failure(int i) {
  TrialRecord r;
  r.trialIndex = i;
  r.sessionId = "s";
  r.targetMotionId = "t";
  return r;
}

struct Coeffs {
  long double a, b, c;
};

// Normal equations in raw (uncentred) power sums, solved by Cramer's rule
// in long double.
Coeffs cramer_fit(const std::vector<std::pair<double, double>>& pts) {
  long double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (const auto& [x, y] : pts) {
    long double p = 1;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += p * y;
      p *= x;
    }
  }
  // Unknowns ordered (c, b, a); matrix M[i][j] = s[i + j].
  const auto det3 = [](long double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  long double m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = s[i + j];
  const long double d = det3(m);
  long double sol[3];
  for (int col = 0; col < 3; ++col) {
    long double mc[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mc[i][j] = j == col ? t[i] : m[i][j];
    sol[col] = det3(mc) / d;
  }
  return {sol[2], sol[1], sol[0]};
}

}  // namespace

TEST(Analysis, FilterFailures) {
  auto table = testsupport::planted_trend(1);
  EXPECT_EQ(table.size(), 60u);
  EXPECT_EQ(filter_failures(table).size(), 55u);
  TrialTable all{success(0, 1), success(1, 2)};
  EXPECT_EQ(filter_failures(all), all);
  EXPECT_TRUE(filter_failures(TrialTable{failure(0), failure(1)}).empty());
}

TEST(Analysis, GroupScores) {
  TrialTable t;
  for (int i = 0; i < 10; ++i) t.push_back(success(i, 1.5));
  for (int i = 10; i < 20; ++i) t.push_back(failure(i));
  for (int i = 20; i < 30; ++i) t.push_back(success(i, 6.0));
  t.push_back(success(30, 5.0));
  EXPECT_EQ(group_scores(t, 10, 6.0), (std::vector<long long>{45, 0, 0, 1}));
  EXPECT_THROW(group_scores(t, 0, 6.0), std::invalid_argument);
}

TEST(Analysis, CompletionStatsExamples) {
  const std::vector<double> same{1, 1, 1};
  auto s = completion_stats(std::span<const double>(same));
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.standardError, 0.0);
  EXPECT_EQ(s.n, 3u);
  const std::vector<double> two{1, 2};
  s = completion_stats(std::span<const double>(two));
  EXPECT_DOUBLE_EQ(s.mean, 1.5);
  // s = 0.7071, so s / sqrt(2) = 0.5.
  EXPECT_NEAR(s.standardError, 0.5, 1e-12);
  EXPECT_THROW(completion_stats(std::span<const double>(two).first(1)), std::invalid_argument);
}

TEST(Analysis, SplitHalvesMatchesSpreadsheet) {
  const auto table = filter_failures(testsupport::planted_trend(2));
  ASSERT_EQ(table.size(), 55u);
  const auto [first, second] = split_halves(table);
  EXPECT_EQ(first.n, 27u);
  EXPECT_EQ(second.n, 28u);
  // Recompute each half as a spreadsheet would: AVERAGE and STDEV.S/SQRT(n).
  const auto column = [&](std::size_t from, std::size_t to, long double& mean, long double& se) {
    long double sum = 0, sumsq = 0;
    for (std::size_t i = from; i < to; ++i) {
      sum += *table[i].completionTime;
      sumsq += static_cast<long double>(*table[i].completionTime) * *table[i].completionTime;
    }
    const long double n = static_cast<long double>(to - from);
    mean = sum / n;
    se = std::sqrt((sumsq - sum * sum / n) / (n - 1)) / std::sqrt(n);
  };
  long double m1, s1, m2, s2;
  column(0, 27, m1, s1);
  column(27, 55, m2, s2);
  EXPECT_NEAR(first.mean, static_cast<double>(m1), 1e-12);
  EXPECT_NEAR(second.mean, static_cast<double>(m2), 1e-12);
  EXPECT_NEAR(first.standardError, static_cast<double>(s1), 1e-12);
  EXPECT_NEAR(second.standardError, static_cast<double>(s2), 1e-12);
}

TEST(Analysis, SplitHalvesEdgeCases) {
  TrialTable t{success(0, 2), success(1, 2), success(2, 2), success(3, 2)};
  const auto [a, b] = split_halves(t);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standardError, 0.0);
  EXPECT_THROW(split_halves(TrialTable{success(0, 1), success(1, 1), success(2, 1)}), std::invalid_argument);
}

TEST(Analysis, PlantedTrendRecovered) {
  const auto table = testsupport::planted_trend(3, 60, 0, 2.0, 1.0, 0.1);
  const auto [a, b] = split_halves(table);
  EXPECT_NEAR(a.mean, 2.0, 0.05);
  EXPECT_NEAR(b.mean, 1.0, 0.05);
}

TEST(QuadraticFit, ExactQuadratic) {
  std::vector<std::pair<double, double>> pts;
  for (int x = -3; x <= 6; ++x) pts.emplace_back(x, 2.0 * x * x - 3.0 * x + 1.0);
  const auto f = quadratic_fit(pts);
  EXPECT_NEAR(f.a, 2, 1e-9);
  EXPECT_NEAR(f.b, -3, 1e-9);
  EXPECT_NEAR(f.c, 1, 1e-9);
  EXPECT_LT(f.residualSumSquares, 1e-9);
  EXPECT_EQ(f.n, 10u);
}

TEST(QuadraticFit, Constant) {
  std::vector<std::pair<double, double>> pts;
  for (int x = 1; x <= 10; ++x) pts.emplace_back(x, 5.0);
  const auto f = quadratic_fit(pts);
  EXPECT_NEAR(f.a, 0, 1e-12);
  EXPECT_NEAR(f.b, 0, 1e-11);
  EXPECT_NEAR(f.c, 5, 1e-10);
}

TEST(QuadraticFit, Degenerate) {
  EXPECT_THROW(quadratic_fit({{1, 1}, {1, 2}, {1, 3}}), DegenerateFit);
  EXPECT_THROW(quadratic_fit({{1, 1}, {2, 2}, {1, 3}, {2, 5}}), DegenerateFit);
  EXPECT_THROW(quadratic_fit({{1, 1}, {2, 2}}), DegenerateFit);
  EXPECT_THROW(quadratic_fit({{1, 1}, {2, std::nan("")}, {3, 3}}), std::invalid_argument);
}

TEST(QuadraticFit, AgreesWithCramer) {
  Rng rng(606);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(60));
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(rng.uniform(-10, 60), rng.uniform(-5, 5));
    const auto f = quadratic_fit(pts);
    const auto r = cramer_fit(pts);
    for (const auto& [got, want] : {std::pair{f.a, r.a}, std::pair{f.b, r.b}, std::pair{f.c, r.c}})
      EXPECT_LE(std::abs(got - static_cast<double>(want)), 1e-9 * std::abs(static_cast<double>(want)) + 1e-13)
          << "trial " << trial;
  }
}

TEST(Latency, SummaryExamples) {
  const std::vector<double> same(2000, 33.3);
  auto s = latency_summary(same);
  EXPECT_NEAR(s.mean, 33.3, 1e-9);
  EXPECT_EQ(s.stddev, 0.0);
  s = latency_summary(std::vector<double>{10, 20});
  EXPECT_EQ(s.mean, 15);
  EXPECT_NEAR(s.stddev, 7.071, 5e-4);
  EXPECT_EQ(s.histogramStart, 10);
  ASSERT_EQ(s.histogram.size(), 11u);
  EXPECT_EQ(s.histogram.front(), 1u);
  EXPECT_EQ(s.histogram.back(), 1u);
  s = latency_summary(std::vector<double>{42});
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_THROW(latency_summary(std::vector<double>{}), std::invalid_argument);
}

TEST(Latency, ModelSamples) {
  const auto s = latency_summary(sim::click_to_photon_model(60, 60, 0, 2000, 9));
  EXPECT_NEAR(s.mean, 33.333, 0.5);
  EXPECT_GE(s.min, 25.0 - 1e-9);
  EXPECT_LE(s.max, 41.667 + 1e-3);
  std::size_t total = 0;
  for (auto c : s.histogram) total += c;
  EXPECT_EQ(total, 2000u);
  // Uniform on a 16.67 ms interval: sd = width / sqrt(12).
  EXPECT_NEAR(s.stddev, (1000.0 / 60) / std::sqrt(12.0), 0.3);
}

TEST(Csv, RoundTrip) {
  auto table = testsupport::planted_trend(4);
  table[3].sessionId = "with,comma \"and quotes\"";
  std::ostringstream os;
  write_trials_csv(os, table);
  std::istringstream is(os.str());
  EXPECT_EQ(read_trials_csv(is), table);
  const auto header = os.str().substr(0, os.str().find('\n'));
  EXPECT_EQ(header,
            "trialIndex,sessionId,sessionKind,targetMotionId,frameRate,frameDelay,outcome,completionTimeSec,"
            "shotsFired,shotsHit,seedStream");
}

TEST(Csv, Errors) {
  const auto read = [](const std::string& text) {
    std::istringstream is(text);
    return read_trials_csv(is);
  };
  const std::string header =
      "trialIndex,sessionId,sessionKind,targetMotionId,frameRate,frameDelay,outcome,completionTimeSec,shotsFired,"
      "shotsHit,seedStream\n";
  EXPECT_TRUE(read(header).empty());
  EXPECT_THROW(read(""), CsvError);
  EXPECT_THROW(read("a,b\n"), CsvError);
  try {
    read(header + "0,s,real,t,60,2,success,1.5,3,3,1\n1,s,real,t,60,2,maybe,,3,3,1\n");
    FAIL() << "bad outcome accepted";
  } catch (const CsvError& e) {
    // Character column where the outcome field starts.
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 17);
  }
  EXPECT_THROW(read(header + "0,s,real,t,60,2,success,,3,3,1\n"), CsvError);
  EXPECT_THROW(read(header + "0,s,real,t,60,2,success,1.5,3,3\n"), CsvError);
  EXPECT_THROW(read(header + "x,s,real,t,60,2,failure,,3,3,1\n"), CsvError);
}
