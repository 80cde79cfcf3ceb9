#include <CLI11.hpp>

#include <ostream>

#include "commands.hpp"
#include "egospeed/error.hpp"

namespace egospeed::cli {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

void add_run_options(CLI::App& cmd, RunConfig& run) {
  cmd.add_option("--manifest", run.manifest, "Dataset manifest")->required();
  cmd.add_option("--crop", run.crop, "cropB | cropG | cropR | full | x,y,w,h")
      ->capture_default_str();
  cmd.add_option("--mode", run.mode, "base | e1 | e2 (or of_over_disp, of_only, horiz_of_over_disp)")
      ->capture_default_str();
  cmd.add_option("--window", run.window, "Box filter length in frames (odd)")->capture_default_str();
  cmd.add_flag("--pixel-smooth", run.pixel_smooth, "Smooth flow and disparity per pixel over time");
  cmd.add_flag("--tc", run.tc, "Turning compensation (full frame only)");
  cmd.add_option("--of-min", run.of_min, "Minimum flow magnitude of a valid pixel")
      ->capture_default_str();
  cmd.add_option("--disp-min", run.disp_min, "Minimum disparity of a valid pixel")
      ->capture_default_str();
  cmd.add_option("--fit", run.fit, "Scale fit")
      ->check(CLI::IsMember({"lsq", "median"}))
      ->capture_default_str();
  cmd.add_option("--fit-ids", run.fit_ids, "Recordings used to fit k (default: all)")
      ->delimiter(',');
  cmd.add_option("--out", run.out, "Output directory")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ego-speed estimation from dense optical flow and disparity"};
  app.name("egospeed");
  app.require_subcommand(1);

  RunConfig estimate_run;
  std::optional<double> k;
  auto* estimate = app.add_subcommand("estimate", "Per-recording speed traces");
  add_run_options(*estimate, estimate_run);
  estimate->add_option("--k", k, "Use this scale instead of fitting it");

  RunConfig calibrate_run;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the global scale factor");
  add_run_options(*calibrate, calibrate_run);

  EvaluateConfig evaluate_cfg;
  auto* evaluate = app.add_subcommand("evaluate", "RMSE table over variants and crops");
  add_run_options(*evaluate, evaluate_cfg.run);
  evaluate->add_option("--variants", evaluate_cfg.variants,
                       "Variants: base, e1, e2, e3, tc, or combinations such as e2+tc")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--crops", evaluate_cfg.crops,
                       "Crops separated by ';' (cropB, cropG, cropR, full or x,y,w,h)")
      ->delimiter(';')
      ->capture_default_str();
  evaluate->add_option("--label", evaluate_cfg.label, "Prefix for the config column");

  MetricsConfig metrics_cfg;
  auto* metrics = app.add_subcommand("metrics", "Flow or depth error metrics");
  metrics->add_option("--pred", metrics_cfg.pred_dir, "Prediction directory")->required();
  metrics->add_option("--gt", metrics_cfg.gt_dir, "Ground-truth directory")->required();
  metrics->add_option("--kind", metrics_cfg.kind, "flow | depth")
      ->check(CLI::IsMember({"flow", "depth"}))
      ->capture_default_str();
  metrics->add_option("--pred-format", metrics_cfg.pred_format,
                      "flo | kitti_png | pfm | png16 | float_raw");
  metrics->add_option("--gt-format", metrics_cfg.gt_format, "Defaults to --pred-format");
  metrics->add_option("--pred-scale", metrics_cfg.pred_scale)->capture_default_str();
  metrics->add_option("--gt-scale", metrics_cfg.gt_scale)->capture_default_str();
  metrics->add_flag("--pred-disparity", metrics_cfg.pred_is_disparity,
                    "Prediction maps hold disparity");
  metrics->add_flag("--gt-disparity", metrics_cfg.gt_is_disparity, "Ground-truth maps hold disparity");
  metrics->add_option("--focal", metrics_cfg.focal, "Focal length in pixels")->capture_default_str();
  metrics->add_option("--baseline", metrics_cfg.baseline, "Stereo baseline in meters")
      ->capture_default_str();
  metrics->add_option("--out", metrics_cfg.out, "Output CSV (default: stdout)");

  SynthConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->alias("synthesize");
  synth->add_option("--scenario", synth_cfg.scenario, "cruise | stop-and-go | turn | suite")
      ->capture_default_str();
  synth->add_option("--out", synth_cfg.out, "Output directory")->required();
  synth->add_option("--seed", synth_cfg.seed)->capture_default_str();
  synth->add_option("--frames", synth_cfg.frames)->capture_default_str();
  synth->add_option("--width", synth_cfg.width)->capture_default_str();
  synth->add_option("--height", synth_cfg.height)->capture_default_str();
  synth->add_option("--speed", synth_cfg.speed, "Cruise speed in m/s")->capture_default_str();
  synth->add_option("--yaw-rate", synth_cfg.yaw_rate, "Yaw rate of the turn in rad/s")
      ->capture_default_str();
  synth->add_option("--k-true", synth_cfg.k_true, "Injected scale factor");
  synth->add_option("--calib-crop", synth_cfg.calibration_crop, "Region where k-true holds")
      ->capture_default_str();
  synth->add_option("--flow-format", synth_cfg.flow_format)->capture_default_str();
  synth->add_option("--disp-format", synth_cfg.disp_format)->capture_default_str();

  ChartConfig chart_cfg;
  auto* chart = app.add_subcommand("chart", "SVG chart of speed traces");
  chart->add_option("traces", chart_cfg.traces, "Trace CSVs written by estimate")->required();
  chart->add_option("--labels", chart_cfg.labels, "Legend labels, one per CSV")->delimiter(',');
  chart->add_option("--title", chart_cfg.title)->capture_default_str();
  chart->add_option("--out", chart_cfg.out, "Output SVG (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*estimate) {
      estimate_run.threads = resolve_threads();
      cmd_estimate(estimate_run, k, err);
    } else if (*calibrate) {
      calibrate_run.threads = resolve_threads();
      cmd_calibrate(calibrate_run, out, err);
    } else if (*evaluate) {
      evaluate_cfg.run.threads = resolve_threads();
      cmd_evaluate(evaluate_cfg, err);
    } else if (*metrics) {
      cmd_metrics(metrics_cfg, out);
    } else if (*synth) {
      cmd_synth(synth_cfg, err);
    } else if (*chart) {
      cmd_chart(chart_cfg, out);
    }
  } catch (const Error& e) {
    err << "egospeed: " << e.what() << '\n';
    return is_configuration_error(e.code()) ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    err << "egospeed: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}

}  // namespace egospeed::cli
