#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aimsim/analysis.hpp"

namespace aimsim::svg {

namespace detail {

struct Frame {
  double x0, x1, y0, y1;
  static constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline void open(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xLabel,
                 const std::string& yLabel) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::kWidth << "\" height=\"" << Frame::kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << Frame::kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  const double left = Frame::kLeft, bottom = Frame::kHeight - Frame::kBottom;
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << Frame::kWidth - Frame::kRight << "\" y2=\""
     << bottom << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << left << "\" y1=\"" << Frame::kTop << "\" x2=\"" << left << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << Frame::kWidth / 2 << "\" y=\"" << Frame::kHeight - 12 << "\" text-anchor=\"middle\">"
     << xLabel << "</text>\n"
     << "<text x=\"16\" y=\"" << Frame::kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << Frame::kHeight / 2 << ")\">" << yLabel << "</text>\n";
}

}  // namespace detail

/// Completion time per successful trial with the fitted parabola.
inline std::string training_curve(const std::vector<std::pair<double, double>>& points,
                                  const std::optional<analysis::FitResult>& fit) {
  double xMax = 1.0, yMax = 1.0;
  for (const auto& [x, y] : points) {
    xMax = std::max(xMax, x);
    yMax = std::max(yMax, y);
  }
  const detail::Frame f{0.0, std::ceil(xMax), 0.0, std::ceil(yMax * 1.1)};
  std::ostringstream os;
  detail::open(os, f, "Task completion time", "successful trial", "completion time (s)");
  for (const auto& [x, y] : points)
    os << "<circle cx=\"" << detail::num(f.px(x)) << "\" cy=\"" << detail::num(f.py(y))
       << "\" r=\"3\" fill=\"steelblue\"/>\n";
  if (fit) {
    os << "<polyline fill=\"none\" stroke=\"firebrick\" stroke-width=\"2\" points=\"";
    const int steps = 100;
    for (int i = 0; i <= steps; ++i) {
      const double x = 1.0 + (xMax - 1.0) * i / steps;
      const double y = std::clamp((*fit)(x), f.y0, f.y1);
      os << detail::num(f.px(x)) << ',' << detail::num(f.py(y)) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// 1 ms latency histogram.
inline std::string latency_histogram(const analysis::LatencySummary& s) {
  const double x0 = static_cast<double>(s.histogramStart);
  const double x1 = x0 + static_cast<double>(s.histogram.size());
  const auto peak = s.histogram.empty() ? std::size_t{1} : *std::max_element(s.histogram.begin(), s.histogram.end());
  const detail::Frame f{x0, x1, 0.0, static_cast<double>(std::max<std::size_t>(peak, 1))};
  std::ostringstream os;
  detail::open(os, f, "Click-to-photon latency", "latency (ms)", "clicks");
  for (std::size_t i = 0; i < s.histogram.size(); ++i) {
    const double left = f.px(x0 + static_cast<double>(i));
    const double right = f.px(x0 + static_cast<double>(i) + 1.0);
    const double top = f.py(static_cast<double>(s.histogram[i]));
    os << "<rect x=\"" << detail::num(left) << "\" y=\"" << detail::num(top) << "\" width=\""
       << detail::num(std::max(0.0, right - left - 1.0)) << "\" height=\"" << detail::num(f.py(0.0) - top)
       << "\" fill=\"steelblue\"/>\n";
  }
  os << "<line x1=\"" << detail::num(f.px(s.mean)) << "\" y1=\"" << detail::Frame::kTop << "\" x2=\""
     << detail::num(f.px(s.mean)) << "\" y2=\"" << detail::num(f.py(0.0))
     << "\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace aimsim::svg
