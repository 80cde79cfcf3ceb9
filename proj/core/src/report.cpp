#include "egospeed/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "egospeed/error.hpp"

namespace egospeed {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<double> parse_optional(const std::string& s, const std::filesystem::path& path) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (*end != '\0') throw Error(ErrorCode::kNonNumericField, path.string() + ": '" + s + "'");
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

std::string format_fixed(double value) {
  if (!std::isfinite(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  // "-0.000000" and "0.000000" must not differ between runs.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string format_fixed(const std::optional<double>& value) {
  return value ? format_fixed(*value) : std::string();
}

void write_trace_csv(std::ostream& out, const RecordingEstimate& estimate,
                     const std::optional<SpeedSeries>& scaled, const SpeedSeries& ground_truth) {
  out << "frame_index,raw,smoothed,scaled,gt,tc_triggered\n";
  for (std::size_t t = 0; t < estimate.frames.size(); ++t) {
    const FrameEstimate& f = estimate.frames[t];
    const long gi = static_cast<long>(t) + estimate.smoothed.frame_index_offset -
                    ground_truth.frame_index_offset;
    std::optional<double> gt;
    if (gi >= 0 && gi < static_cast<long>(ground_truth.size())) gt = ground_truth.values[gi];
    out << (estimate.smoothed.frame_index_offset + static_cast<long>(t)) << ','
        << format_fixed(f.raw_value) << ',' << format_fixed(estimate.smoothed.values[t]) << ','
        << (scaled ? format_fixed(scaled->values[t]) : std::string()) << ',' << format_fixed(gt)
        << ',' << (f.tc_triggered ? 1 : 0) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("frame_index,", 0) != 0) {
    throw Error(ErrorCode::kBadHeader, path.string() + ": not a speed trace CSV");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw Error(ErrorCode::kTooFewFields, path.string() + ": expected 6 columns in '" + line + "'");
    }
    TraceRow r;
    const auto index = parse_optional(f[0], path);
    if (!index) throw Error(ErrorCode::kNonNumericField, path.string() + ": empty frame index");
    r.frame_index = static_cast<int>(*index);
    r.raw = parse_optional(f[1], path);
    r.smoothed = parse_optional(f[2], path);
    r.scaled = parse_optional(f[3], path);
    r.gt = parse_optional(f[4], path);
    r.tc_triggered = f[5] == "1";
    rows.push_back(r);
  }
  return rows;
}

void write_evaluation_csv(std::ostream& out, std::span<const EvaluationRow> rows) {
  out << "config,crop,mode,tc,k,rmse_pooled";
  if (!rows.empty()) {
    for (const auto& [id, value] : rows.front().rmse_per_recording) out << ",rmse_" << id;
  }
  out << '\n';
  for (const auto& row : rows) {
    out << csv_field(row.label) << ',' << csv_field(row.crop_name) << ',' << to_string(row.config.mode) << ','
        << (row.config.turning_compensation ? 1 : 0) << ',' << format_fixed(row.fit.k) << ','
        << format_fixed(row.rmse_pooled);
    for (const auto& [id, value] : row.rmse_per_recording) out << ',' << format_fixed(value);
    out << '\n';
  }
}

void write_flow_metrics_csv(std::ostream& out,
                            std::span<const std::pair<std::string, FlowMetrics>> rows) {
  out << "name,aepe,fl_all,n_pixels\n";
  for (const auto& [name, m] : rows) {
    out << name << ',' << format_fixed(m.aepe) << ',' << format_fixed(m.fl_all) << ','
        << m.n_pixels << '\n';
  }
}

void write_depth_metrics_csv(std::ostream& out,
                             std::span<const std::pair<std::string, DepthMetrics>> rows) {
  out << "name,rmse,rmse_log,abs_rel,sq_rel,log10,scale_inv,n_pixels\n";
  for (const auto& [name, m] : rows) {
    out << name << ',' << format_fixed(m.rmse) << ',' << format_fixed(m.rmse_log) << ','
        << format_fixed(m.abs_rel) << ',' << format_fixed(m.sq_rel) << ','
        << format_fixed(m.log10) << ',' << format_fixed(m.scale_inv) << ',' << m.n_pixels
        << '\n';
  }
}

}  // namespace egospeed
