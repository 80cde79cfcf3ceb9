#pragma once

#include <cstddef>
#include <span>

#include "egospeed/types.hpp"

namespace egospeed {

struct FlowMetrics {
  double aepe = 0.0;    // pixels
  double fl_all = 0.0;  // fraction of outliers in [0, 1]
  std::size_t n_pixels = 0;
};

struct DepthMetrics {
  double rmse = 0.0;
  double rmse_log = 0.0;
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double log10 = 0.0;
  double scale_inv = 0.0;
  std::size_t n_pixels = 0;
};

// A flow pixel is an outlier when its endpoint error is >= 3 px and >= 5% of
// the ground-truth magnitude.
inline constexpr double kFlOutlierPixels = 3.0;
inline constexpr double kFlOutlierRelative = 0.05;

// Running sums over pixels; result() gives pixel-pooled metrics.
class FlowErrorAccumulator {
 public:
  void add(const FlowField& pred, const FlowField& gt);
  FlowMetrics result() const;

 private:
  double epe_sum_ = 0.0;
  std::size_t outliers_ = 0;
  std::size_t n_ = 0;
};

class DepthErrorAccumulator {
 public:
  void add(const ScalarField& pred, const ScalarField& gt);
  DepthMetrics result() const;

 private:
  double sq_ = 0.0;
  double log_sq_ = 0.0;
  double abs_rel_ = 0.0;
  double sq_rel_ = 0.0;
  double log10_ = 0.0;
  double log_sum_ = 0.0;
  std::size_t n_ = 0;
};

// Evaluated over ground-truth-valid pixels that are also valid in pred.
FlowMetrics flow_metrics(const FlowField& pred, const FlowField& gt);

// Evaluated over pixels valid in both maps with positive depth on both sides.
// scale_inv = mean(z^2) - mean(z)^2 with z = log(pred) - log(gt).
DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt);

// depth = focal * baseline / d; d <= disp_min is invalid.
ScalarField disp_to_depth(const DisparityMap& disparity, double focal, double baseline,
                          double disp_min = 0.01);

// Mean over images of per-image metrics.
FlowMetrics mean_over_images(std::span<const FlowMetrics> per_image);
DepthMetrics mean_over_images(std::span<const DepthMetrics> per_image);

}  // namespace egospeed
