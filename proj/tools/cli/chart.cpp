#include "chart.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include "egospeed/error.hpp"

namespace egospeed::cli {
namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 40.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Line {
  std::string label;
  std::string color;
  std::vector<std::pair<int, double>> points;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_chart(const std::vector<ChartSeries>& series, const std::string& title) {
  if (series.empty()) throw Error(ErrorCode::kEmptySeries, "no traces to chart");
  std::vector<Line> lines;
  for (const auto& s : series) {
    if (s.rows.empty()) throw Error(ErrorCode::kEmptySeries, "trace '" + s.label + "' has no rows");
  }
  for (const auto& s : series) {
    if (std::none_of(s.rows.begin(), s.rows.end(), [](const TraceRow& r) { return r.gt.has_value(); })) {
      continue;
    }
    Line gt{"ground truth", "#000000", {}};
    for (const auto& r : s.rows) {
      if (r.gt) gt.points.emplace_back(r.frame_index, *r.gt);
    }
    lines.push_back(std::move(gt));
    break;
  }
  std::size_t color = 0;
  for (const auto& s : series) {
    const bool scaled = std::any_of(s.rows.begin(), s.rows.end(),
                                    [](const TraceRow& r) { return r.scaled.has_value(); });
    Line line{s.label, kPalette[color++ % std::size(kPalette)], {}};
    for (const auto& r : s.rows) {
      const auto& v = scaled ? r.scaled : r.smoothed;
      if (v) line.points.emplace_back(r.frame_index, *v);
    }
    lines.push_back(std::move(line));
  }

  int x_min = std::numeric_limits<int>::max();
  int x_max = std::numeric_limits<int>::min();
  double y_max = 0.0;
  for (const auto& l : lines) {
    for (const auto& [x, y] : l.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (x_min > x_max) x_min = x_max = 0;
  if (x_max == x_min) ++x_max;
  if (!(y_max > 0.0)) y_max = 1.0;
  y_max *= 1.05;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](int x) { return kLeft + plot_w * (x - x_min) / (x_max - x_min); };
  const auto py = [&](double y) { return kTop + plot_h * (1.0 - y / y_max); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  svg << "<g stroke=\"#888888\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
      << num(kLeft + plot_w) << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 8)
      << "\" text-anchor=\"middle\">frame</text>\n";
  svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(kTop + plot_h)
      << "\" text-anchor=\"end\">0</text>\n";
  svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(kTop + 4)
      << "\" text-anchor=\"end\">" << num(y_max) << "</text>\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kTop + plot_h + 16) << "\">" << x_min
      << "</text>\n";
  svg << "<text x=\"" << num(kLeft + plot_w) << "\" y=\"" << num(kTop + plot_h + 16)
      << "\" text-anchor=\"end\">" << x_max << "</text>\n";
  svg << "<text x=\"16\" y=\"" << num(kTop + plot_h / 2) << "\">m/s</text>\n";
  svg << "</g>\n";

  for (const auto& l : lines) {
    svg << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < l.points.size(); ++i) {
      if (i) svg << ' ';
      svg << num(px(l.points[i].first)) << ',' << num(py(l.points[i].second));
    }
    svg << "\"/>\n";
  }

  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double y = kTop + 10 + 18.0 * i;
    const double x = kLeft + plot_w + 16;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20) << "\" y2=\""
        << num(y) << "\" stroke=\"" << lines[i].color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">" << escape(lines[i].label)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace egospeed::cli
