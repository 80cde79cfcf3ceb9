#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "egospeed/metrics.hpp"
#include "egospeed/pipeline.hpp"
#include "egospeed/types.hpp"

// Naive reference implementations written straight from the definitions,
// plus seeded generators for property tests. Nothing here calls into the
// library's numerics.
namespace egospeed::oracle {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

FlowField random_flow(Rng& rng, int w, int h, double max_abs, double invalid_fraction);
DisparityMap random_disparity(Rng& rng, int w, int h, double lo, double hi,
                              double invalid_fraction);
ScalarField random_positive_map(Rng& rng, int w, int h, double lo, double hi,
                                double invalid_fraction);
std::vector<std::optional<double>> random_series(Rng& rng, int n, double lo, double hi,
                                                 double missing_fraction);
SpeedSeries to_series(const std::vector<std::optional<double>>& values, std::string id = {},
                      int offset = 0);

// Mean motion over mean disparity with independent gates, looping over the crop.
std::optional<double> frame_speed(const FlowField& flow, const DisparityMap& disp,
                                  const EstimatorConfig& config);

struct TcResult {
  std::optional<double> value;
  bool triggered = false;
};
TcResult frame_speed_tc(const FlowField& flow, const DisparityMap& disp,
                        const EstimatorConfig& config);

// Centered equal-weight average over present samples in [i - w/2, i + w/2].
std::vector<std::optional<double>> box_average(const std::vector<std::optional<double>>& values,
                                               int window);

// Same average per pixel over time; samples count only where the mask is set,
// and invalid pixels keep their original value.
std::vector<ScalarField> pixelwise_average(const std::vector<ScalarField>& frames, int window);

double pooled_rmse(const std::vector<std::vector<std::optional<double>>>& pred,
                   const std::vector<std::vector<std::optional<double>>>& gt);

double least_squares_k(const std::vector<std::pair<double, double>>& pairs);
double median_ratio_k(const std::vector<std::pair<double, double>>& pairs);

FlowMetrics flow_metrics(const FlowField& pred, const FlowField& gt);
DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt);

bool close_rel(double a, double b, double rel);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::string read_text(const std::filesystem::path& path);

}  // namespace egospeed::oracle
