#include "egospeed/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "egospeed/error.hpp"

namespace egospeed {

std::string_view to_string(FitMethod method) noexcept {
  return method == FitMethod::kLeastSquares ? "lsq" : "median";
}

std::optional<FitMethod> parse_fit_method(std::string_view name) noexcept {
  if (name == "lsq" || name == "least_squares") return FitMethod::kLeastSquares;
  if (name == "median" || name == "median_ratio") return FitMethod::kMedianRatio;
  return std::nullopt;
}

ScaleFit fit_scale(std::span<const ScalePair> pairs, FitMethod method) {
  ScaleFit fit;
  fit.method = method;
  if (method == FitMethod::kLeastSquares) {
    double pg = 0.0;
    double pp = 0.0;
    for (const auto& [pred, gt] : pairs) {
      pg += pred * gt;
      pp += pred * pred;
    }
    if (pairs.empty() || !(pp > 0.0)) {
      throw Error(ErrorCode::kDegenerateFit, "least-squares fit needs a nonzero prediction");
    }
    fit.k = pg / pp;
    fit.n_samples = pairs.size();
    return fit;
  }

  std::vector<double> ratios;
  ratios.reserve(pairs.size());
  for (const auto& [pred, gt] : pairs) {
    if (pred > 0.0) ratios.push_back(gt / pred);
  }
  if (ratios.empty()) {
    throw Error(ErrorCode::kDegenerateFit, "median-ratio fit needs a positive prediction");
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t mid = ratios.size() / 2;
  fit.k = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  fit.n_samples = ratios.size();
  return fit;
}

std::vector<ScalePair> collect_pairs(std::span<const SpeedSeries> pred,
                                     std::span<const SpeedSeries> gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::to_string(pred.size()) + " prediction series vs " +
                    std::to_string(gt.size()) + " ground-truth series");
  }
  std::vector<ScalePair> pairs;
  for (std::size_t r = 0; r < pred.size(); ++r) {
    const SpeedSeries& p = pred[r];
    const SpeedSeries& g = gt[r];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const long j = static_cast<long>(i) + p.frame_index_offset - g.frame_index_offset;
      if (j < 0 || j >= static_cast<long>(g.size())) continue;
      const auto& pv = p.values[i];
      const auto& gv = g.values[static_cast<std::size_t>(j)];
      if (pv && gv) pairs.push_back({*pv, *gv});
    }
  }
  return pairs;
}

SpeedSeries apply_scale(const SpeedSeries& series, double k) {
  SpeedSeries out = series;
  for (auto& v : out.values) {
    if (v) *v *= k;
  }
  return out;
}

double rmse(std::span<const SpeedSeries> pred, std::span<const SpeedSeries> gt) {
  const auto pairs = collect_pairs(pred, gt);
  if (pairs.empty()) throw Error(ErrorCode::kNoOverlap, "no overlapping samples for RMSE");
  double sq = 0.0;
  for (const auto& [p, g] : pairs) sq += (p - g) * (p - g);
  return std::sqrt(sq / static_cast<double>(pairs.size()));
}

double rmse(const SpeedSeries& pred, const SpeedSeries& gt) {
  return rmse(std::span(&pred, 1), std::span(&gt, 1));
}

EvaluationRow evaluate_series(std::span<const SpeedSeries> pre_scale,
                              std::span<const SpeedSeries> ground_truth,
                              const EvaluationOptions& options) {
  if (pre_scale.size() != ground_truth.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction and ground-truth series counts differ");
  }
  std::vector<SpeedSeries> fit_pred, fit_gt;
  for (std::size_t r = 0; r < pre_scale.size(); ++r) {
    const auto& ids = options.fit_ids;
    if (ids.empty() || std::find(ids.begin(), ids.end(), pre_scale[r].recording_id) != ids.end()) {
      fit_pred.push_back(pre_scale[r]);
      fit_gt.push_back(ground_truth[r]);
    }
  }
  if (fit_pred.empty()) {
    throw Error(ErrorCode::kDegenerateFit, "none of the fit recordings are present");
  }

  EvaluationRow row;
  row.fit = fit_scale(collect_pairs(fit_pred, fit_gt), options.method);
  std::vector<SpeedSeries> scaled;
  scaled.reserve(pre_scale.size());
  for (const auto& s : pre_scale) scaled.push_back(apply_scale(s, row.fit.k));
  row.rmse_pooled = rmse(scaled, ground_truth);
  for (std::size_t r = 0; r < scaled.size(); ++r) {
    double value = std::numeric_limits<double>::quiet_NaN();
    if (!collect_pairs(std::span(&scaled[r], 1), std::span(&ground_truth[r], 1)).empty()) {
      value = rmse(scaled[r], ground_truth[r]);
    }
    row.rmse_per_recording.emplace_back(scaled[r].recording_id, value);
  }
  return row;
}

EvaluationRow evaluate_configuration(std::span<const Recording> recordings,
                                     const EstimatorConfig& config,
                                     const EvaluationOptions& options) {
  if (recordings.empty()) throw Error(ErrorCode::kInvalidArgument, "no recordings to evaluate");
  std::vector<SpeedSeries> pred, gt;
  for (const auto& rec : recordings) {
    if (!rec.ground_truth) {
      throw Error(ErrorCode::kInvalidArgument, "recording " + rec.id + " has no ground truth");
    }
    pred.push_back(estimate_recording(rec, config, options.estimate).smoothed);
    gt.push_back(ground_truth_series(rec));
  }
  EvaluationRow row = evaluate_series(pred, gt, options);
  row.config = config;
  return row;
}

}  // namespace egospeed
