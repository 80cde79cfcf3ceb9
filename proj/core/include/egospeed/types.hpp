#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace egospeed {

using Mask = std::vector<std::uint8_t>;

// Axis-aligned pixel rectangle; (x, y) is the upper-left corner.
struct CropRect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  friend bool operator==(const CropRect&, const CropRect&) = default;

  bool fits(int width, int height) const noexcept {
    return w >= 1 && h >= 1 && x >= 0 && y >= 0 &&
           static_cast<long>(x) + w <= width &&
           static_cast<long>(y) + h <= height;
  }
};

// Crops on the 1242x375 KITTI frame.
inline constexpr CropRect kCropB{720, 180, 200, 120};
inline constexpr CropRect kCropG{700, 100, 400, 240};
inline constexpr CropRect kCropR{640, 20, 580, 340};
inline constexpr int kKittiWidth = 1242;
inline constexpr int kKittiHeight = 375;

// Rectangle `inner` given relative to `outer`, expressed in outer's parent frame.
CropRect compose(const CropRect& outer, const CropRect& inner) noexcept;

// Dense scalar image with a validity mask, row-major, origin top-left.
// Non-finite samples are demoted to invalid at construction.
class ScalarField {
 public:
  ScalarField(int width, int height, std::vector<double> values, Mask valid);
  ScalarField(int width, int height, std::vector<double> values);

  static ScalarField filled(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  double at(int x, int y) const noexcept { return values_[index(x, y)]; }
  bool valid_at(int x, int y) const noexcept { return valid_[index(x, y)] != 0; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint8_t> mask() const noexcept { return valid_; }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
  Mask valid_;
};

// Dense optical flow in pixels per frame interval.
class FlowField {
 public:
  FlowField(int width, int height, std::vector<double> u, std::vector<double> v, Mask valid);
  FlowField(int width, int height, std::vector<double> u, std::vector<double> v);

  static FlowField uniform(int width, int height, double u, double v);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return u_.size(); }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  double u_at(int x, int y) const noexcept { return u_[index(x, y)]; }
  double v_at(int x, int y) const noexcept { return v_[index(x, y)]; }
  bool valid_at(int x, int y) const noexcept { return valid_[index(x, y)] != 0; }

  std::span<const double> u() const noexcept { return u_; }
  std::span<const double> v() const noexcept { return v_; }
  std::span<const std::uint8_t> mask() const noexcept { return valid_; }

 private:
  int width_;
  int height_;
  std::vector<double> u_;
  std::vector<double> v_;
  Mask valid_;
};

// Non-negative disparity; negative or non-finite samples are demoted to invalid.
class DisparityMap {
 public:
  DisparityMap(int width, int height, std::vector<double> d, Mask valid);
  DisparityMap(int width, int height, std::vector<double> d);

  static DisparityMap filled(int width, int height, double d);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return d_.size(); }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  double at(int x, int y) const noexcept { return d_[index(x, y)]; }
  bool valid_at(int x, int y) const noexcept { return valid_[index(x, y)] != 0; }

  std::span<const double> values() const noexcept { return d_; }
  std::span<const std::uint8_t> mask() const noexcept { return valid_; }

  ScalarField as_scalar() const { return ScalarField(width_, height_, d_, valid_); }

 private:
  int width_;
  int height_;
  std::vector<double> d_;
  Mask valid_;
};

struct ValidityThresholds {
  double of_min = 0.2;
  double disp_min = 0.01;

  void validate() const;
};

enum class EstimatorMode {
  kOfOnly,          // mean flow magnitude, depth ignored
  kOfOverDisp,      // base pipeline
  kHorizOfOverDisp  // mean |u| over mean disparity
};

std::string_view to_string(EstimatorMode mode) noexcept;
std::optional<EstimatorMode> parse_mode(std::string_view name) noexcept;

inline bool uses_disparity(EstimatorMode mode) noexcept { return mode != EstimatorMode::kOfOnly; }

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::kOfOverDisp;
  std::optional<CropRect> crop;  // nullopt: full frame
  ValidityThresholds thresholds;
  int smoothing_window = 25;
  bool pixel_level_smoothing = false;
  // Series-level smoothing after pixel-level smoothing; off only for ablations.
  bool series_smoothing_after_pixel = true;
  bool turning_compensation = false;
  // Require a pixel to pass both thresholds to count in either mean.
  bool joint_thresholds = false;

  void validate() const;
};

// Per-frame speed trace; a disengaged entry is a missing estimate.
struct SpeedSeries {
  std::vector<std::optional<double>> values;
  int frame_index_offset = 0;
  std::string recording_id;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t present_count() const noexcept;
};

SpeedSeries make_series(std::span<const double> values, std::string recording_id = {},
                        int frame_index_offset = 0);

enum class FlowFormat { kFlo, kKittiPng };
enum class DispFormat { kPfm, kPng16, kFloatRaw };

std::string_view to_string(FlowFormat format) noexcept;
std::string_view to_string(DispFormat format) noexcept;
std::optional<FlowFormat> parse_flow_format(std::string_view name) noexcept;
std::optional<DispFormat> parse_disp_format(std::string_view name) noexcept;

// Frames of one drive. Flow i is between frames i and i+1.
struct Recording {
  std::string id;
  int frame_count = 0;
  std::vector<std::filesystem::path> flow_paths;
  std::vector<std::filesystem::path> disp_paths;
  std::optional<std::vector<double>> ground_truth;  // m/s per frame
  FlowFormat flow_format = FlowFormat::kFlo;
  DispFormat disp_format = DispFormat::kPfm;
  double disp_scale = 1.0;

  void validate() const;
};

// Per-pixel sqrt(u^2 + v^2); mask copied from the flow.
ScalarField flow_magnitude(const FlowField& flow);

ScalarField apply_crop(const ScalarField& field, const CropRect& crop);
FlowField apply_crop(const FlowField& field, const CropRect& crop);
DisparityMap apply_crop(const DisparityMap& field, const CropRect& crop);

}  // namespace egospeed
