#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egospeed/ingest.hpp"
#include "egospeed/types.hpp"

namespace egospeed {

// Pinhole camera; defaults follow the KITTI left color camera.
struct CameraModel {
  double fx = 721.5377;
  double fy = 721.5377;
  double cx = 609.5593;
  double cy = 172.854;
  double baseline = 0.54;  // meters
  int width = kKittiWidth;
  int height = kKittiHeight;
  double dt = 0.1;  // seconds per frame

  void validate() const;
  // Same field of view at another resolution.
  CameraModel resized(int new_width, int new_height) const;
};

struct MotionSample {
  double forward_speed = 0.0;  // m/s
  double yaw_rate = 0.0;       // rad/s
};

inline constexpr double kDefaultDepthFloor = 2.0;

struct SyntheticScene {
  ScalarField depth;                // meters per pixel, static over time
  std::vector<MotionSample> motion;  // motion[t] drives flow from frame t to t+1
  double depth_floor = kDefaultDepthFloor;

  void validate(const CameraModel& camera) const;
};

ScalarField constant_depth(const CameraModel& camera, double depth);
// Fronto-parallel vertical bands of equal width, left to right.
ScalarField step_depth(const CameraModel& camera, std::span<const double> band_depths);
// Smooth sum of seeded sinusoids spanning [near, far].
ScalarField random_smooth_depth(const CameraModel& camera, std::uint64_t seed, double near,
                                double far);
// Every depth multiplied by `factor`.
ScalarField scale_depth(const ScalarField& depth, double factor);

std::vector<MotionSample> constant_motion(int frames, double forward_speed, double yaw_rate = 0.0);
// Accelerate linearly from `low` to `peak`, cruise, then brake back to `low`,
// in roughly equal thirds.
std::vector<MotionSample> stop_and_go_motion(int frames, double low, double peak);
// Cruise at `speed`, then pure yaw (zero forward speed) on frames
// [yaw_begin, yaw_end), then cruise again.
std::vector<MotionSample> turn_motion(int frames, double speed, double yaw_rate, int yaw_begin,
                                      int yaw_end);

// First-order ego-motion flow: u = (x - cx) Vz dt / Z + fx w dt, v = (y - cy) Vz dt / Z.
FlowField render_flow(const ScalarField& depth, const CameraModel& camera,
                      const MotionSample& motion);
FlowField render_flow(const SyntheticScene& scene, const CameraModel& camera, int frame);

// d = fx * baseline / Z.
DisparityMap render_disparity(const ScalarField& depth, const CameraModel& camera);
DisparityMap render_disparity(const SyntheticScene& scene, const CameraModel& camera);

// Base-mode pre-scale estimate per m/s of pure forward motion over `region`
// (full frame when nullopt), assuming every pixel passes the thresholds:
// dt * mean(r / Z) / mean(fx B / Z), r the distance to the principal point.
double forward_gain(const ScalarField& depth, const CameraModel& camera,
                    const std::optional<CropRect>& region);

struct GenerateOptions {
  std::filesystem::path dir;  // recording lands in dir / id
  std::string id = "synthetic";
  // Disparity is rescaled so that base-mode estimates over
  // `calibration_region` equal forward speed / k_true.
  std::optional<double> k_true;
  std::optional<CropRect> calibration_region;
  FlowFormat flow_format = FlowFormat::kFlo;
  DispFormat disp_format = DispFormat::kPfm;
};

struct SyntheticRecording {
  Recording recording;
  ManifestEntry entry;  // directories under options.dir / id
  std::vector<double> ground_truth;
  double disparity_gain = 1.0;
};

// Writes n_frames disparity maps, n_frames - 1 flow fields and n_frames oxts
// records; ground truth is motion[t].forward_speed.
SyntheticRecording generate_recording(const SyntheticScene& scene, const CameraModel& camera,
                                      int n_frames, const GenerateOptions& options);

// In-memory frames of the same scene.
struct SyntheticFrames {
  std::vector<FlowField> flows;
  std::vector<DisparityMap> disparities;
  std::vector<double> ground_truth;
};
SyntheticFrames render_frames(const SyntheticScene& scene, const CameraModel& camera, int n_frames,
                              double disparity_gain = 1.0);

}  // namespace egospeed
