#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egospeed/calibrate.hpp"
#include "egospeed/metrics.hpp"
#include "egospeed/pipeline.hpp"

namespace egospeed {

// Reports use a dot decimal and exactly six decimals; a missing value is an
// empty field and a non-finite one is "nan".
std::string format_fixed(double value);
std::string format_fixed(const std::optional<double>& value);

// frame_index,raw,smoothed,scaled,gt,tc_triggered
void write_trace_csv(std::ostream& out, const RecordingEstimate& estimate,
                     const std::optional<SpeedSeries>& scaled, const SpeedSeries& ground_truth);

struct TraceRow {
  int frame_index = 0;
  std::optional<double> raw;
  std::optional<double> smoothed;
  std::optional<double> scaled;
  std::optional<double> gt;
  bool tc_triggered = false;
};

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

// config,crop,mode,tc,k,rmse_pooled,rmse_<id>... ; rows must share recording ids.
// Text fields holding a comma or quote are quoted.
void write_evaluation_csv(std::ostream& out, std::span<const EvaluationRow> rows);

// name,aepe,fl_all,n_pixels; aggregate rows are ordinary named entries.
void write_flow_metrics_csv(std::ostream& out,
                            std::span<const std::pair<std::string, FlowMetrics>> rows);
// name,rmse,rmse_log,abs_rel,sq_rel,log10,scale_inv,n_pixels
void write_depth_metrics_csv(std::ostream& out,
                             std::span<const std::pair<std::string, DepthMetrics>> rows);

}  // namespace egospeed
