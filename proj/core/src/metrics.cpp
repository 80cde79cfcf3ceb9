#include "egospeed/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "egospeed/error.hpp"

namespace egospeed {
namespace {

template <typename A, typename B>
void require_same_extent(const A& a, const B& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kExtentMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

}  // namespace

void FlowErrorAccumulator::add(const FlowField& pred, const FlowField& gt) {
  require_same_extent(pred, gt);
  const auto pu = pred.u();
  const auto pv = pred.v();
  const auto gu = gt.u();
  const auto gv = gt.v();
  const auto pm = pred.mask();
  const auto gm = gt.mask();
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gm[i] || !pm[i]) continue;
    const double du = pu[i] - gu[i];
    const double dv = pv[i] - gv[i];
    const double epe = std::sqrt(du * du + dv * dv);
    const double gt_mag = std::sqrt(gu[i] * gu[i] + gv[i] * gv[i]);
    epe_sum_ += epe;
    if (epe >= kFlOutlierPixels && epe >= kFlOutlierRelative * gt_mag) ++outliers_;
    ++n_;
  }
}

FlowMetrics FlowErrorAccumulator::result() const {
  if (n_ == 0) throw Error(ErrorCode::kNoValidPixels, "no ground-truth-valid flow pixels");
  const double n = static_cast<double>(n_);
  return {epe_sum_ / n, static_cast<double>(outliers_) / n, n_};
}

void DepthErrorAccumulator::add(const ScalarField& pred, const ScalarField& gt) {
  require_same_extent(pred, gt);
  const auto p = pred.values();
  const auto g = gt.values();
  const auto pm = pred.mask();
  const auto gm = gt.mask();
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!pm[i] || !gm[i] || !(p[i] > 0.0) || !(g[i] > 0.0)) continue;
    const double diff = p[i] - g[i];
    const double z = std::log(p[i]) - std::log(g[i]);
    sq_ += diff * diff;
    log_sq_ += z * z;
    abs_rel_ += std::abs(diff) / g[i];
    sq_rel_ += diff * diff / g[i];
    log10_ += std::abs(std::log10(p[i]) - std::log10(g[i]));
    log_sum_ += z;
    ++n_;
  }
}

DepthMetrics DepthErrorAccumulator::result() const {
  if (n_ == 0) throw Error(ErrorCode::kNoValidPixels, "no pixels with positive depth in both maps");
  const double n = static_cast<double>(n_);
  DepthMetrics m;
  m.rmse = std::sqrt(sq_ / n);
  m.rmse_log = std::sqrt(log_sq_ / n);
  m.abs_rel = abs_rel_ / n;
  m.sq_rel = sq_rel_ / n;
  m.log10 = log10_ / n;
  m.scale_inv = std::max(0.0, log_sq_ / n - (log_sum_ * log_sum_) / (n * n));
  m.n_pixels = n_;
  return m;
}

FlowMetrics flow_metrics(const FlowField& pred, const FlowField& gt) {
  FlowErrorAccumulator acc;
  acc.add(pred, gt);
  return acc.result();
}

DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt) {
  DepthErrorAccumulator acc;
  acc.add(pred, gt);
  return acc.result();
}

ScalarField disp_to_depth(const DisparityMap& disparity, double focal, double baseline,
                          double disp_min) {
  if (!(focal > 0.0) || !(baseline > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal length and baseline must be positive");
  }
  std::vector<double> depth(disparity.size(), 0.0);
  Mask valid(disparity.size(), 0);
  const auto d = disparity.values();
  const auto m = disparity.mask();
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (m[i] && d[i] > disp_min) {
      depth[i] = focal * baseline / d[i];
      valid[i] = 1;
    }
  }
  return ScalarField(disparity.width(), disparity.height(), std::move(depth), std::move(valid));
}

FlowMetrics mean_over_images(std::span<const FlowMetrics> per_image) {
  if (per_image.empty()) throw Error(ErrorCode::kNoValidPixels, "no images to aggregate");
  FlowMetrics m;
  for (const auto& x : per_image) {
    m.aepe += x.aepe;
    m.fl_all += x.fl_all;
    m.n_pixels += x.n_pixels;
  }
  const double n = static_cast<double>(per_image.size());
  m.aepe /= n;
  m.fl_all /= n;
  return m;
}

DepthMetrics mean_over_images(std::span<const DepthMetrics> per_image) {
  if (per_image.empty()) throw Error(ErrorCode::kNoValidPixels, "no images to aggregate");
  DepthMetrics m;
  for (const auto& x : per_image) {
    m.rmse += x.rmse;
    m.rmse_log += x.rmse_log;
    m.abs_rel += x.abs_rel;
    m.sq_rel += x.sq_rel;
    m.log10 += x.log10;
    m.scale_inv += x.scale_inv;
    m.n_pixels += x.n_pixels;
  }
  const double n = static_cast<double>(per_image.size());
  m.rmse /= n;
  m.rmse_log /= n;
  m.abs_rel /= n;
  m.sq_rel /= n;
  m.log10 /= n;
  m.scale_inv /= n;
  return m;
}

}  // namespace egospeed
