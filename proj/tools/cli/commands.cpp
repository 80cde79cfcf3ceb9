#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "chart.hpp"
#include "egospeed/error.hpp"
#include "egospeed/metrics.hpp"
#include "egospeed/pipeline.hpp"
#include "egospeed/report.hpp"
#include "egospeed/synth.hpp"

namespace egospeed::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

std::optional<CropRect> parse_rect(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) return std::nullopt;
  int v[4];
  for (int i = 0; i < 4; ++i) {
    char* end = nullptr;
    const long x = std::strtol(parts[i].c_str(), &end, 10);
    if (parts[i].empty() || *end != '\0' || x < 0 || x > std::numeric_limits<int>::max()) {
      return std::nullopt;
    }
    v[i] = static_cast<int>(x);
  }
  if (v[2] < 1 || v[3] < 1) return std::nullopt;
  return CropRect{v[0], v[1], v[2], v[3]};
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) make_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

DatasetManifest load_nonempty_manifest(const std::filesystem::path& path) {
  DatasetManifest manifest = load_manifest(path);
  if (manifest.recordings.empty()) {
    throw Error(ErrorCode::kBadManifest, "no recordings in " + path.string());
  }
  return manifest;
}

void check_fit_ids(const RunConfig& run, const DatasetManifest& manifest) {
  for (const auto& id : run.fit_ids) manifest.entry(id);
}

struct Estimates {
  std::vector<Recording> recordings;
  std::vector<RecordingEstimate> estimates;
  std::optional<EvaluationRow> scale;  // absent without ground truth or k
};

Estimates run_estimates(const RunConfig& run, std::optional<double> k, std::ostream& log) {
  const DatasetManifest manifest = load_nonempty_manifest(run.manifest);
  const EstimatorConfig config = make_estimator_config(run, manifest);
  const FitMethod method = make_fit_method(run.fit);
  check_fit_ids(run, manifest);
  if (k && !(*k > 0.0 && std::isfinite(*k))) {
    throw Error(ErrorCode::kInvalidArgument, "k must be a positive number");
  }

  Estimates result;
  for (const auto& entry : manifest.recordings) {
    result.recordings.push_back(load_recording(manifest, entry.id));
    result.estimates.push_back(
        estimate_recording(result.recordings.back(), config, EstimateOptions{run.threads}));
    log << entry.id << ": " << result.estimates.back().smoothed.present_count() << " of "
        << result.estimates.back().smoothed.size() << " frames estimated\n";
  }

  std::vector<SpeedSeries> pred, gt;
  for (std::size_t r = 0; r < result.recordings.size(); ++r) {
    if (!result.recordings[r].ground_truth) continue;
    pred.push_back(result.estimates[r].smoothed);
    gt.push_back(ground_truth_series(result.recordings[r]));
  }
  EvaluationRow row;
  if (k) {
    row.fit = ScaleFit{*k, method, 0};
    row.rmse_pooled = std::numeric_limits<double>::quiet_NaN();
    std::vector<SpeedSeries> scaled;
    for (const auto& s : pred) scaled.push_back(apply_scale(s, *k));
    if (!collect_pairs(scaled, gt).empty()) row.rmse_pooled = rmse(scaled, gt);
    for (std::size_t r = 0; r < scaled.size(); ++r) {
      double value = std::numeric_limits<double>::quiet_NaN();
      if (!collect_pairs(std::span(&scaled[r], 1), std::span(&gt[r], 1)).empty()) {
        value = rmse(scaled[r], gt[r]);
      }
      row.rmse_per_recording.emplace_back(scaled[r].recording_id, value);
    }
  } else if (!pred.empty()) {
    EvaluationOptions options;
    options.method = method;
    options.fit_ids = run.fit_ids;
    row = evaluate_series(pred, gt, options);
  } else {
    log << "no ground truth and no --k: output is unscaled\n";
    return result;
  }
  row.label = run.mode;
  row.crop_name = run.crop;
  row.config = config;
  result.scale = row;
  return result;
}

void write_scale(const EvaluationRow& row, const std::filesystem::path& out_dir) {
  const auto path = out_dir / "scale.csv";
  auto out = open_output(path);
  write_evaluation_csv(out, std::span(&row, 1));
  finish(out, path);
}

EstimatorConfig variant_config(const std::string& variant, const RunConfig& run,
                               const DatasetManifest& manifest) {
  RunConfig base = run;
  base.mode = "base";
  base.pixel_smooth = false;
  base.tc = false;
  for (const auto& token : split(variant, '+')) {
    if (token == "base") {
      base.mode = "base";
    } else if (token == "e1" || token == "e2") {
      base.mode = token;
    } else if (token == "e3") {
      base.pixel_smooth = true;
    } else if (token == "tc") {
      base.tc = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + variant + "'");
    }
  }
  return make_estimator_config(base, manifest);
}

std::vector<std::filesystem::path> list_by_format(const std::filesystem::path& dir,
                                                  const std::string& kind,
                                                  const std::string& format) {
  if (kind == "flow") {
    const auto f = parse_flow_format(format);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "unknown flow format '" + format + "'");
    return list_frame_files(dir, file_extension(*f));
  }
  const auto f = parse_disp_format(format);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "unknown depth format '" + format + "'");
  return list_frame_files(dir, file_extension(*f));
}

ScalarField read_depth_input(const std::filesystem::path& path, DispFormat format, double scale,
                             bool is_disparity, const MetricsConfig& config) {
  if (is_disparity) {
    return disp_to_depth(read_disparity(path, format, scale), config.focal, config.baseline);
  }
  return read_scalar_map(path, format, scale);
}

}  // namespace

std::optional<CropRect> resolve_crop(const std::string& name, const DatasetManifest& manifest) {
  const auto it = manifest.crops.find(name);
  if (it != manifest.crops.end()) return it->second;
  if (name == "full") return std::nullopt;
  if (name == "cropB") return kCropB;
  if (name == "cropG") return kCropG;
  if (name == "cropR") return kCropR;
  if (const auto rect = parse_rect(name)) return rect;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown crop '" + name + "' (expected cropB, cropG, cropR, full or x,y,w,h)");
}

EstimatorConfig make_estimator_config(const RunConfig& run, const DatasetManifest& manifest) {
  EstimatorConfig config;
  const auto mode = parse_mode(run.mode);
  if (!mode) throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + run.mode + "'");
  config.mode = *mode;
  config.crop = resolve_crop(run.crop, manifest);
  config.thresholds = ValidityThresholds{run.of_min, run.disp_min};
  config.thresholds.validate();
  config.smoothing_window = run.window;
  config.pixel_level_smoothing = run.pixel_smooth;
  config.turning_compensation = run.tc;
  config.validate();
  return config;
}

FitMethod make_fit_method(const std::string& name) {
  const auto method = parse_fit_method(name);
  if (!method) throw Error(ErrorCode::kInvalidArgument, "unknown fit method '" + name + "'");
  return *method;
}

unsigned resolve_threads() {
  if (const char* env = std::getenv("EGOSPEED_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("EGOSPEED_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void cmd_estimate(const RunConfig& run, std::optional<double> k, std::ostream& log) {
  const Estimates est = run_estimates(run, k, log);
  make_dir(run.out);
  for (std::size_t r = 0; r < est.recordings.size(); ++r) {
    const Recording& rec = est.recordings[r];
    std::optional<SpeedSeries> scaled;
    if (est.scale) scaled = apply_scale(est.estimates[r].smoothed, est.scale->fit.k);
    const SpeedSeries gt = rec.ground_truth ? ground_truth_series(rec) : SpeedSeries{};
    const auto path = run.out / (rec.id + ".csv");
    auto out = open_output(path);
    write_trace_csv(out, est.estimates[r], scaled, gt);
    finish(out, path);
  }
  if (est.scale) write_scale(*est.scale, run.out);
}

void cmd_calibrate(const RunConfig& run, std::ostream& out, std::ostream& log) {
  const Estimates est = run_estimates(run, std::nullopt, log);
  if (!est.scale) throw Error(ErrorCode::kDegenerateFit, "no recording has ground truth");
  make_dir(run.out);
  write_scale(*est.scale, run.out);
  out << "k = " << format_fixed(est.scale->fit.k) << " (" << to_string(est.scale->fit.method)
      << ", " << est.scale->fit.n_samples << " samples), rmse = "
      << format_fixed(est.scale->rmse_pooled) << " m/s\n";
}

void cmd_evaluate(const EvaluateConfig& config, std::ostream& log) {
  const RunConfig& run = config.run;
  const DatasetManifest manifest = load_nonempty_manifest(run.manifest);
  EvaluationOptions options;
  options.method = make_fit_method(run.fit);
  options.fit_ids = run.fit_ids;
  options.estimate.max_threads = run.threads;
  check_fit_ids(run, manifest);
  if (config.variants.empty() || config.crops.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evaluate needs at least one variant and one crop");
  }

  std::vector<std::pair<std::string, EstimatorConfig>> grid;
  for (const auto& variant : config.variants) {
    for (const auto& crop : config.crops) {
      RunConfig cell = run;
      cell.crop = crop;
      const bool tc = std::ranges::count(split(variant, '+'), std::string("tc")) > 0;
      if (tc && resolve_crop(crop, manifest)) {
        log << "skipping " << variant << " on " << crop << ": turning compensation needs the full frame\n";
        continue;
      }
      grid.emplace_back(variant + "@" + crop, variant_config(variant, cell, manifest));
    }
  }

  std::vector<Recording> recordings;
  for (const auto& entry : manifest.recordings) recordings.push_back(load_recording(manifest, entry.id));

  std::vector<EvaluationRow> rows;
  for (const auto& [key, estimator] : grid) {
    const auto at = key.rfind('@');
    const std::string variant = key.substr(0, at);
    EvaluationRow row = evaluate_configuration(recordings, estimator, options);
    row.label = config.label.empty() ? variant : config.label + "/" + variant;
    row.crop_name = key.substr(at + 1);
    log << row.label << " " << row.crop_name << ": k = " << format_fixed(row.fit.k)
        << ", rmse = " << format_fixed(row.rmse_pooled) << '\n';
    rows.push_back(std::move(row));
  }
  make_dir(run.out);
  const auto path = run.out / "evaluation.csv";
  auto out = open_output(path);
  write_evaluation_csv(out, rows);
  finish(out, path);
}

void cmd_metrics(const MetricsConfig& config, std::ostream& out) {
  if (config.kind != "flow" && config.kind != "depth") {
    throw Error(ErrorCode::kInvalidArgument, "--kind must be flow or depth");
  }
  const bool flow = config.kind == "flow";
  const std::string pred_format =
      !config.pred_format.empty() ? config.pred_format : (flow ? "flo" : "pfm");
  const std::string gt_format = !config.gt_format.empty() ? config.gt_format : pred_format;
  const auto gt_files = list_by_format(config.gt_dir, config.kind, gt_format);
  const auto pred_files = list_by_format(config.pred_dir, config.kind, pred_format);
  if (gt_files.empty()) throw Error(ErrorCode::kMissingFrameFile, "no ground-truth files in " + config.gt_dir.string());
  std::map<std::string, std::filesystem::path> by_stem;
  for (const auto& p : pred_files) by_stem[p.stem().string()] = p;

  std::ostringstream csv;
  if (flow) {
    const FlowFormat pf = *parse_flow_format(pred_format);
    const FlowFormat gf = *parse_flow_format(gt_format);
    std::vector<std::pair<std::string, FlowMetrics>> rows;
    std::vector<FlowMetrics> per_image;
    FlowErrorAccumulator pooled;
    for (const auto& g : gt_files) {
      const auto it = by_stem.find(g.stem().string());
      if (it == by_stem.end()) {
        throw Error(ErrorCode::kMissingFrameFile, "no prediction for " + g.filename().string());
      }
      const FlowField pred = read_flow(it->second, pf);
      const FlowField gt = read_flow(g, gf);
      rows.emplace_back(g.stem().string(), flow_metrics(pred, gt));
      per_image.push_back(rows.back().second);
      pooled.add(pred, gt);
    }
    rows.emplace_back("mean", mean_over_images(per_image));
    rows.emplace_back("pooled", pooled.result());
    write_flow_metrics_csv(csv, rows);
  } else {
    const DispFormat pf = *parse_disp_format(pred_format);
    const DispFormat gf = *parse_disp_format(gt_format);
    std::vector<std::pair<std::string, DepthMetrics>> rows;
    std::vector<DepthMetrics> per_image;
    DepthErrorAccumulator pooled;
    for (const auto& g : gt_files) {
      const auto it = by_stem.find(g.stem().string());
      if (it == by_stem.end()) {
        throw Error(ErrorCode::kMissingFrameFile, "no prediction for " + g.filename().string());
      }
      const ScalarField pred =
          read_depth_input(it->second, pf, config.pred_scale, config.pred_is_disparity, config);
      const ScalarField gt = read_depth_input(g, gf, config.gt_scale, config.gt_is_disparity, config);
      rows.emplace_back(g.stem().string(), depth_metrics(pred, gt));
      per_image.push_back(rows.back().second);
      pooled.add(pred, gt);
    }
    rows.emplace_back("mean", mean_over_images(per_image));
    rows.emplace_back("pooled", pooled.result());
    write_depth_metrics_csv(csv, rows);
  }
  if (config.out.empty()) {
    out << csv.str();
  } else {
    auto file = open_output(config.out);
    file << csv.str();
    finish(file, config.out);
  }
}

void cmd_synth(const SynthConfig& config, std::ostream& log) {
  if (config.out.empty()) throw Error(ErrorCode::kInvalidArgument, "synth needs --out");
  if (config.frames < 2) throw Error(ErrorCode::kInvalidArgument, "--frames must be at least 2");
  if (config.width < 2 || config.height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "--width and --height must be positive");
  }
  CameraModel camera;
  if (config.width != camera.width || config.height != camera.height) {
    camera = camera.resized(config.width, config.height);
  }
  const auto flow_format = parse_flow_format(config.flow_format);
  const auto disp_format = parse_disp_format(config.disp_format);
  if (!flow_format) throw Error(ErrorCode::kInvalidArgument, "unknown flow format '" + config.flow_format + "'");
  if (!disp_format) throw Error(ErrorCode::kInvalidArgument, "unknown disparity format '" + config.disp_format + "'");

  const int n = config.frames;
  const double v = config.speed;
  struct Plan {
    std::string id;
    std::uint64_t seed;
    std::vector<MotionSample> motion;
  };
  std::vector<Plan> plans;
  const auto cruise = [&](std::string id, std::uint64_t seed, double speed) {
    plans.push_back({std::move(id), seed, constant_motion(n, speed)});
  };
  const auto stop_and_go = [&](std::uint64_t seed) {
    plans.push_back({"stop_and_go", seed, stop_and_go_motion(n, 0.25 * v, v)});
  };
  if (config.scenario == "cruise") {
    cruise("cruise", config.seed, v);
  } else if (config.scenario == "stop-and-go") {
    stop_and_go(config.seed);
  } else if (config.scenario == "turn") {
    plans.push_back({"turn", config.seed, turn_motion(n, v, config.yaw_rate, n / 3, 2 * n / 3)});
  } else if (config.scenario == "suite") {
    cruise("cruise", config.seed, v);
    cruise("cruise_fast", config.seed + 1, 2.0 * v);
    stop_and_go(config.seed + 2);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown scenario '" + config.scenario +
                                                 "' (cruise, stop-and-go, turn, suite)");
  }

  DatasetManifest manifest;
  manifest.root = config.out;
  manifest.flow_format = *flow_format;
  manifest.disp_format = *disp_format;
  make_dir(config.out);
  for (auto& plan : plans) {
    SyntheticScene scene{random_smooth_depth(camera, plan.seed, 8.0, 60.0), std::move(plan.motion)};
    GenerateOptions options;
    options.dir = config.out;
    options.id = plan.id;
    options.k_true = config.k_true;
    options.calibration_region = resolve_crop(config.calibration_crop, manifest);
    options.flow_format = *flow_format;
    options.disp_format = *disp_format;
    const SyntheticRecording rec = generate_recording(scene, camera, n, options);
    manifest.recordings.push_back(rec.entry);
    log << plan.id << ": " << n << " frames, disparity gain " << format_fixed(rec.disparity_gain)
        << '\n';
  }
  std::sort(manifest.recordings.begin(), manifest.recordings.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  write_manifest(manifest, config.out / "manifest.txt");
}

void cmd_chart(const ChartConfig& config, std::ostream& out) {
  if (config.traces.empty()) throw Error(ErrorCode::kInvalidArgument, "chart needs at least one CSV");
  if (!config.labels.empty() && config.labels.size() != config.traces.size()) {
    throw Error(ErrorCode::kInvalidArgument, "--labels needs one label per CSV");
  }
  std::vector<ChartSeries> series;
  for (std::size_t i = 0; i < config.traces.size(); ++i) {
    const auto& path = config.traces[i];
    const std::string label = config.labels.empty() ? path.stem().string() : config.labels[i];
    std::vector<TraceRow> rows;
    try {
      rows = read_trace_csv(path);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBadHeader) {
        throw Error(ErrorCode::kEmptySeries, path.string() + ": empty or not a speed trace");
      }
      throw;
    }
    series.push_back({label, std::move(rows)});
  }
  const std::string svg = render_chart(series, config.title);
  if (config.out.empty()) {
    out << svg;
  } else {
    auto file = open_output(config.out);
    file << svg;
    finish(file, config.out);
  }
}

}  // namespace egospeed::cli
