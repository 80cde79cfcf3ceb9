#include "egospeed/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "egospeed/error.hpp"

namespace egospeed {
namespace {

// Uniform in [0, 1) from the raw engine output, identical on every platform.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string frame_name(int index, int digits, std::string_view extension) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", digits, index);
  return std::string(buf) + std::string(extension);
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !(baseline > 0.0) || !(dt > 0.0) || width < 1 ||
      height < 1 || !(cx >= 0.0) || !(cx < width) || !(cy >= 0.0) || !(cy < height)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid camera model");
  }
}

CameraModel CameraModel::resized(int new_width, int new_height) const {
  CameraModel c = *this;
  const double sx = static_cast<double>(new_width) / width;
  const double sy = static_cast<double>(new_height) / height;
  c.fx *= sx;
  c.cx *= sx;
  c.fy *= sy;
  c.cy *= sy;
  c.width = new_width;
  c.height = new_height;
  return c;
}

void SyntheticScene::validate(const CameraModel& camera) const {
  camera.validate();
  if (depth.width() != camera.width || depth.height() != camera.height) {
    throw Error(ErrorCode::kExtentMismatch, "scene depth does not match the camera resolution");
  }
  const auto z = depth.values();
  if (std::any_of(z.begin(), z.end(), [&](double v) { return !(v >= depth_floor) || !std::isfinite(v); })) {
    throw Error(ErrorCode::kInvalidArgument,
                "scene depth must be finite and at least " + std::to_string(depth_floor) + " m");
  }
}

ScalarField constant_depth(const CameraModel& camera, double depth) {
  return ScalarField::filled(camera.width, camera.height, depth);
}

ScalarField step_depth(const CameraModel& camera, std::span<const double> band_depths) {
  if (band_depths.empty()) throw Error(ErrorCode::kInvalidArgument, "no depth bands");
  std::vector<double> z(static_cast<std::size_t>(camera.width) * camera.height);
  const auto bands = static_cast<long>(band_depths.size());
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const long band = std::min(bands - 1, static_cast<long>(x) * bands / camera.width);
      z[static_cast<std::size_t>(y) * camera.width + x] = band_depths[band];
    }
  }
  return ScalarField(camera.width, camera.height, std::move(z));
}

ScalarField random_smooth_depth(const CameraModel& camera, std::uint64_t seed, double near,
                                double far) {
  if (!(near > 0.0) || !(far >= near)) {
    throw Error(ErrorCode::kInvalidArgument, "depth range must satisfy 0 < near <= far");
  }
  constexpr int kWaves = 4;
  std::mt19937_64 rng(seed);
  struct Wave {
    double amplitude, fx, fy, phase;
  };
  Wave waves[kWaves];
  double total = 0.0;
  for (auto& w : waves) {
    w.amplitude = 0.25 + unit_uniform(rng);
    w.fx = 0.5 + 2.5 * unit_uniform(rng);
    w.fy = 0.5 + 1.5 * unit_uniform(rng);
    w.phase = 2.0 * std::numbers::pi * unit_uniform(rng);
    total += w.amplitude;
  }
  std::vector<double> z(static_cast<std::size_t>(camera.width) * camera.height);
  for (int y = 0; y < camera.height; ++y) {
    const double ny = static_cast<double>(y) / camera.height;
    for (int x = 0; x < camera.width; ++x) {
      const double nx = static_cast<double>(x) / camera.width;
      double s = 0.0;
      for (const auto& w : waves) {
        s += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * nx + w.fy * ny) + w.phase);
      }
      const double t = 0.5 * (s / total + 1.0);  // [0, 1]
      z[static_cast<std::size_t>(y) * camera.width + x] = near + (far - near) * t;
    }
  }
  return ScalarField(camera.width, camera.height, std::move(z));
}

ScalarField scale_depth(const ScalarField& depth, double factor) {
  std::vector<double> z(depth.values().begin(), depth.values().end());
  for (auto& v : z) v *= factor;
  return ScalarField(depth.width(), depth.height(), std::move(z),
                     Mask(depth.mask().begin(), depth.mask().end()));
}

std::vector<MotionSample> constant_motion(int frames, double forward_speed, double yaw_rate) {
  return std::vector<MotionSample>(static_cast<std::size_t>(std::max(frames, 0)),
                                   MotionSample{forward_speed, yaw_rate});
}

std::vector<MotionSample> stop_and_go_motion(int frames, double low, double peak) {
  std::vector<MotionSample> m(static_cast<std::size_t>(std::max(frames, 0)));
  const double third = std::max(1.0, frames / 3.0);
  for (int t = 0; t < frames; ++t) {
    const double rise = std::clamp(t / third, 0.0, 1.0);
    const double fall = std::clamp((frames - 1 - t) / third, 0.0, 1.0);
    m[t].forward_speed = low + (peak - low) * std::min(rise, fall);
  }
  return m;
}

std::vector<MotionSample> turn_motion(int frames, double speed, double yaw_rate, int yaw_begin,
                                      int yaw_end) {
  auto m = constant_motion(frames, speed);
  for (int t = std::max(0, yaw_begin); t < std::min(frames, yaw_end); ++t) {
    m[t] = MotionSample{0.0, yaw_rate};
  }
  return m;
}

FlowField render_flow(const ScalarField& depth, const CameraModel& camera,
                      const MotionSample& motion) {
  if (depth.width() != camera.width || depth.height() != camera.height) {
    throw Error(ErrorCode::kExtentMismatch, "depth map does not match the camera resolution");
  }
  const std::size_t n = depth.size();
  std::vector<double> u(n), v(n);
  const double travel = motion.forward_speed * camera.dt;
  const double yaw_shift = camera.fx * motion.yaw_rate * camera.dt;
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const std::size_t i = depth.index(x, y);
      const double z = depth.values()[i];
      u[i] = (x - camera.cx) * travel / z + yaw_shift;
      v[i] = (y - camera.cy) * travel / z;
    }
  }
  return FlowField(camera.width, camera.height, std::move(u), std::move(v));
}

FlowField render_flow(const SyntheticScene& scene, const CameraModel& camera, int frame) {
  if (frame < 0 || frame >= static_cast<int>(scene.motion.size())) {
    throw Error(ErrorCode::kInvalidArgument, "frame " + std::to_string(frame) + " has no motion");
  }
  return render_flow(scene.depth, camera, scene.motion[frame]);
}

DisparityMap render_disparity(const ScalarField& depth, const CameraModel& camera) {
  std::vector<double> d(depth.size());
  const auto z = depth.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = camera.fx * camera.baseline / z[i];
  return DisparityMap(depth.width(), depth.height(), std::move(d));
}

DisparityMap render_disparity(const SyntheticScene& scene, const CameraModel& camera) {
  return render_disparity(scene.depth, camera);
}

double forward_gain(const ScalarField& depth, const CameraModel& camera,
                    const std::optional<CropRect>& region) {
  const CropRect r = region.value_or(CropRect{0, 0, depth.width(), depth.height()});
  if (!r.fits(depth.width(), depth.height())) {
    throw Error(ErrorCode::kCropOutOfBounds, "calibration region exceeds the frame");
  }
  double radial = 0.0;
  double inverse_depth = 0.0;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const double z = depth.at(x, y);
      radial += std::hypot(x - camera.cx, y - camera.cy) / z;
      inverse_depth += camera.fx * camera.baseline / z;
    }
  }
  return camera.dt * radial / inverse_depth;
}

SyntheticFrames render_frames(const SyntheticScene& scene, const CameraModel& camera, int n_frames,
                              double disparity_gain) {
  scene.validate(camera);
  if (n_frames < 2 || n_frames > static_cast<int>(scene.motion.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "need 2 <= n_frames <= " + std::to_string(scene.motion.size()));
  }
  SyntheticFrames out;
  const DisparityMap base = render_disparity(scene, camera);
  std::vector<double> d(base.values().begin(), base.values().end());
  for (auto& v : d) v *= disparity_gain;
  const DisparityMap disparity(camera.width, camera.height, std::move(d));
  for (int t = 0; t < n_frames; ++t) {
    if (t + 1 < n_frames) out.flows.push_back(render_flow(scene, camera, t));
    out.disparities.push_back(disparity);
    out.ground_truth.push_back(scene.motion[t].forward_speed);
  }
  return out;
}

SyntheticRecording generate_recording(const SyntheticScene& scene, const CameraModel& camera,
                                      int n_frames, const GenerateOptions& options) {
  SyntheticRecording out;
  if (options.k_true) {
    if (!(*options.k_true > 0.0)) throw Error(ErrorCode::kInvalidArgument, "k_true must be positive");
    out.disparity_gain = *options.k_true * forward_gain(scene.depth, camera, options.calibration_region);
  }
  const SyntheticFrames frames = render_frames(scene, camera, n_frames, out.disparity_gain);

  const auto base = options.dir / options.id;
  out.entry = {options.id, base / "flow", base / "disp", base / "oxts" / "data"};
  make_dir(out.entry.flow_dir);
  make_dir(out.entry.disp_dir);
  make_dir(out.entry.oxts_dir);

  Recording& rec = out.recording;
  rec.id = options.id;
  rec.frame_count = n_frames;
  rec.flow_format = options.flow_format;
  rec.disp_format = options.disp_format;
  rec.disp_scale = 1.0;
  for (int t = 0; t < n_frames; ++t) {
    if (t + 1 < n_frames) {
      const auto path = out.entry.flow_dir / frame_name(t, 6, file_extension(options.flow_format));
      if (options.flow_format == FlowFormat::kFlo) {
        write_flo(frames.flows[t], path);
      } else {
        write_kitti_flow_png(frames.flows[t], path);
      }
      rec.flow_paths.push_back(path);
    }
    const auto disp_path = out.entry.disp_dir / frame_name(t, 6, file_extension(options.disp_format));
    write_disparity(frames.disparities[t], disp_path, options.disp_format);
    rec.disp_paths.push_back(disp_path);
    write_oxts_frame(out.entry.oxts_dir / frame_name(t, 10, ".txt"), frames.ground_truth[t]);
  }
  out.ground_truth = frames.ground_truth;
  rec.ground_truth = frames.ground_truth;
  rec.validate();
  return out;
}

}  // namespace egospeed
