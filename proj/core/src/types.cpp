#include "egospeed/types.hpp"

#include <algorithm>
#include <cmath>

#include "egospeed/error.hpp"

namespace egospeed {
namespace {

void check_extent(int width, int height, std::size_t n, std::string_view what) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " extent must be at least 1x1");
  }
  if (n != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " sample count does not match width*height");
  }
}

void check_crop(const CropRect& crop, int width, int height) {
  if (!crop.fits(width, height)) {
    throw Error(ErrorCode::kCropOutOfBounds,
                "crop (" + std::to_string(crop.x) + "," + std::to_string(crop.y) + "," +
                    std::to_string(crop.w) + "," + std::to_string(crop.h) +
                    ") exceeds " + std::to_string(width) + "x" + std::to_string(height));
  }
}

template <typename T>
std::vector<T> crop_plane(std::span<const T> src, int width, const CropRect& crop) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(crop.w) * static_cast<std::size_t>(crop.h));
  for (int y = crop.y; y < crop.y + crop.h; ++y) {
    const auto row = src.subspan(static_cast<std::size_t>(y) * width + crop.x, crop.w);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace

CropRect compose(const CropRect& outer, const CropRect& inner) noexcept {
  return {outer.x + inner.x, outer.y + inner.y, inner.w, inner.h};
}

ScalarField::ScalarField(int width, int height, std::vector<double> values, Mask valid)
    : width_(width), height_(height), values_(std::move(values)), valid_(std::move(valid)) {
  check_extent(width_, height_, values_.size(), "scalar field");
  check_extent(width_, height_, valid_.size(), "scalar field mask");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) valid_[i] = 0;
  }
}

ScalarField::ScalarField(int width, int height, std::vector<double> values)
    : ScalarField(width, height, values, Mask(values.size(), 1)) {}

ScalarField ScalarField::filled(int width, int height, double value) {
  const auto n = static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0));
  return ScalarField(width, height, std::vector<double>(n, value));
}

FlowField::FlowField(int width, int height, std::vector<double> u, std::vector<double> v,
                     Mask valid)
    : width_(width), height_(height), u_(std::move(u)), v_(std::move(v)), valid_(std::move(valid)) {
  check_extent(width_, height_, u_.size(), "flow u");
  check_extent(width_, height_, v_.size(), "flow v");
  check_extent(width_, height_, valid_.size(), "flow mask");
  for (std::size_t i = 0; i < u_.size(); ++i) {
    if (!std::isfinite(u_[i]) || !std::isfinite(v_[i])) valid_[i] = 0;
  }
}

FlowField::FlowField(int width, int height, std::vector<double> u, std::vector<double> v)
    : FlowField(width, height, u, v, Mask(u.size(), 1)) {}

FlowField FlowField::uniform(int width, int height, double u, double v) {
  const auto n = static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0));
  return FlowField(width, height, std::vector<double>(n, u), std::vector<double>(n, v));
}

DisparityMap::DisparityMap(int width, int height, std::vector<double> d, Mask valid)
    : width_(width), height_(height), d_(std::move(d)), valid_(std::move(valid)) {
  check_extent(width_, height_, d_.size(), "disparity");
  check_extent(width_, height_, valid_.size(), "disparity mask");
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (!std::isfinite(d_[i]) || d_[i] < 0.0) valid_[i] = 0;
  }
}

DisparityMap::DisparityMap(int width, int height, std::vector<double> d)
    : DisparityMap(width, height, d, Mask(d.size(), 1)) {}

DisparityMap DisparityMap::filled(int width, int height, double d) {
  const auto n = static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0));
  return DisparityMap(width, height, std::vector<double>(n, d));
}

void ValidityThresholds::validate() const {
  if (!(of_min >= 0.0) || !(disp_min >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "validity thresholds must be non-negative");
  }
}

std::string_view to_string(EstimatorMode mode) noexcept {
  switch (mode) {
    case EstimatorMode::kOfOnly: return "of_only";
    case EstimatorMode::kOfOverDisp: return "of_over_disp";
    case EstimatorMode::kHorizOfOverDisp: return "horiz_of_over_disp";
  }
  return "unknown";
}

std::optional<EstimatorMode> parse_mode(std::string_view name) noexcept {
  if (name == "of_only" || name == "e1") return EstimatorMode::kOfOnly;
  if (name == "of_over_disp" || name == "base") return EstimatorMode::kOfOverDisp;
  if (name == "horiz_of_over_disp" || name == "e2") return EstimatorMode::kHorizOfOverDisp;
  return std::nullopt;
}

void EstimatorConfig::validate() const {
  thresholds.validate();
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "smoothing window must be a positive odd integer, got " +
                    std::to_string(smoothing_window));
  }
  if (turning_compensation && crop.has_value()) {
    throw Error(ErrorCode::kTcRequiresFullFrame,
                "turning compensation needs the full frame, not a crop");
  }
}

std::size_t SpeedSeries::present_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

SpeedSeries make_series(std::span<const double> values, std::string recording_id,
                        int frame_index_offset) {
  SpeedSeries s;
  s.values.assign(values.begin(), values.end());
  s.recording_id = std::move(recording_id);
  s.frame_index_offset = frame_index_offset;
  return s;
}

std::string_view to_string(FlowFormat format) noexcept {
  return format == FlowFormat::kFlo ? "flo" : "kitti_png";
}

std::string_view to_string(DispFormat format) noexcept {
  switch (format) {
    case DispFormat::kPfm: return "pfm";
    case DispFormat::kPng16: return "png16";
    case DispFormat::kFloatRaw: return "float_raw";
  }
  return "unknown";
}

std::optional<FlowFormat> parse_flow_format(std::string_view name) noexcept {
  if (name == "flo") return FlowFormat::kFlo;
  if (name == "kitti_png" || name == "png") return FlowFormat::kKittiPng;
  return std::nullopt;
}

std::optional<DispFormat> parse_disp_format(std::string_view name) noexcept {
  if (name == "pfm") return DispFormat::kPfm;
  if (name == "png16" || name == "png") return DispFormat::kPng16;
  if (name == "float_raw" || name == "raw") return DispFormat::kFloatRaw;
  return std::nullopt;
}

void Recording::validate() const {
  const auto n = static_cast<std::size_t>(frame_count);
  if (frame_count < 2) {
    throw Error(ErrorCode::kCountMismatch, "recording " + id + " needs at least 2 frames");
  }
  if (disp_paths.size() != n || flow_paths.size() + 1 != n ||
      (ground_truth && ground_truth->size() != n)) {
    throw Error(ErrorCode::kCountMismatch,
                "recording " + id + ": " + std::to_string(flow_paths.size()) + " flow, " +
                    std::to_string(disp_paths.size()) + " disparity, " +
                    std::to_string(ground_truth ? ground_truth->size() : 0) +
                    " ground-truth entries for " + std::to_string(frame_count) + " frames");
  }
  if (!(disp_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "disp_scale must be positive");
  }
}

ScalarField flow_magnitude(const FlowField& flow) {
  std::vector<double> mag(flow.size());
  const auto u = flow.u();
  const auto v = flow.v();
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::sqrt(u[i] * u[i] + v[i] * v[i]);
  return ScalarField(flow.width(), flow.height(), std::move(mag),
                     Mask(flow.mask().begin(), flow.mask().end()));
}

ScalarField apply_crop(const ScalarField& field, const CropRect& crop) {
  check_crop(crop, field.width(), field.height());
  return ScalarField(crop.w, crop.h, crop_plane(field.values(), field.width(), crop),
                     crop_plane(field.mask(), field.width(), crop));
}

FlowField apply_crop(const FlowField& field, const CropRect& crop) {
  check_crop(crop, field.width(), field.height());
  return FlowField(crop.w, crop.h, crop_plane(field.u(), field.width(), crop),
                   crop_plane(field.v(), field.width(), crop),
                   crop_plane(field.mask(), field.width(), crop));
}

DisparityMap apply_crop(const DisparityMap& field, const CropRect& crop) {
  check_crop(crop, field.width(), field.height());
  return DisparityMap(crop.w, crop.h, crop_plane(field.values(), field.width(), crop),
                      crop_plane(field.mask(), field.width(), crop));
}

}  // namespace egospeed
