#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "egospeed/calibrate.hpp"
#include "egospeed/ingest.hpp"
#include "egospeed/types.hpp"

namespace egospeed::cli {

// Estimator settings shared by estimate, calibrate and evaluate.
struct RunConfig {
  std::filesystem::path manifest;
  std::string crop = "full";  // cropB | cropG | cropR | full | x,y,w,h
  std::string mode = "base";
  int window = 25;
  bool pixel_smooth = false;
  bool tc = false;
  double of_min = 0.2;
  double disp_min = 0.01;
  std::string fit = "lsq";
  std::vector<std::string> fit_ids;
  std::filesystem::path out = ".";
  unsigned threads = 1;
};

// Named crops resolve through the manifest overrides first; "full" is the
// whole frame. Throws InvalidArgument for an unknown name.
std::optional<CropRect> resolve_crop(const std::string& name, const DatasetManifest& manifest);

EstimatorConfig make_estimator_config(const RunConfig& run, const DatasetManifest& manifest);
FitMethod make_fit_method(const std::string& name);

// Worker cap from EGOSPEED_THREADS, else the hardware concurrency.
unsigned resolve_threads();

// Writes <out>/<id>.csv for every recording and <out>/scale.csv.
void cmd_estimate(const RunConfig& run, std::optional<double> k, std::ostream& log);

// Writes <out>/scale.csv and prints k.
void cmd_calibrate(const RunConfig& run, std::ostream& out, std::ostream& log);

struct EvaluateConfig {
  RunConfig run;
  std::vector<std::string> variants = {"base", "e1", "e2", "e3", "tc"};
  std::vector<std::string> crops = {"full"};
  std::string label;
};

// Writes <out>/evaluation.csv, one row per (variant, crop); tc only runs on
// the full frame.
void cmd_evaluate(const EvaluateConfig& config, std::ostream& log);

struct MetricsConfig {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  std::string kind = "flow";  // flow | depth
  std::string pred_format;    // flo | kitti_png | pfm | png16 | float_raw
  std::string gt_format;
  double pred_scale = 1.0;
  double gt_scale = 1.0;
  // Depth inputs given as disparity are converted with focal * baseline / d.
  bool pred_is_disparity = false;
  bool gt_is_disparity = false;
  double focal = 721.5377;
  double baseline = 0.54;
  std::filesystem::path out;  // empty: stdout
};

// Per-image rows in filename order, then "mean" and "pooled".
void cmd_metrics(const MetricsConfig& config, std::ostream& out);

struct SynthConfig {
  std::string scenario = "cruise";  // cruise | stop-and-go | turn | suite
  std::filesystem::path out;
  std::uint64_t seed = 1;
  int frames = 60;
  int width = kKittiWidth;
  int height = kKittiHeight;
  double speed = 10.0;
  double yaw_rate = 0.1;
  std::optional<double> k_true;
  std::string calibration_crop = "full";
  std::string flow_format = "flo";
  std::string disp_format = "pfm";
};

// Writes the recordings and <out>/manifest.txt.
void cmd_synth(const SynthConfig& config, std::ostream& log);

struct ChartConfig {
  std::vector<std::filesystem::path> traces;
  std::vector<std::string> labels;  // defaults to file stems
  std::string title = "speed";
  std::filesystem::path out;  // empty: stdout
};

void cmd_chart(const ChartConfig& config, std::ostream& out);

// Full command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace egospeed::cli
