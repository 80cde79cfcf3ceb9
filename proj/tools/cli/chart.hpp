#pragma once

#include <string>
#include <vector>

#include "egospeed/report.hpp"

namespace egospeed::cli {

struct ChartSeries {
  std::string label;
  std::vector<TraceRow> rows;
};

// One polyline for ground truth (taken from the first trace that has it) and
// one per trace for its scaled column, or the smoothed column when unscaled.
// Throws EmptySeries when a trace has no rows.
std::string render_chart(const std::vector<ChartSeries>& series, const std::string& title);

}  // namespace egospeed::cli
