#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "egospeed/pipeline.hpp"
#include "egospeed/types.hpp"

namespace egospeed {

enum class FitMethod {
  kLeastSquares,  // k = sum(pred*gt) / sum(pred^2)
  kMedianRatio    // k = median(gt / pred) over pred > 0
};

std::string_view to_string(FitMethod method) noexcept;
std::optional<FitMethod> parse_fit_method(std::string_view name) noexcept;

struct ScalePair {
  double pred;  // pre-scale estimate
  double gt;    // m/s
};

struct ScaleFit {
  double k = 0.0;  // m/s per image-domain unit
  FitMethod method = FitMethod::kLeastSquares;
  std::size_t n_samples = 0;
};

ScaleFit fit_scale(std::span<const ScalePair> pairs, FitMethod method = FitMethod::kLeastSquares);

// Pairs predictions with ground truth by frame index; missing entries on
// either side are skipped. Series are matched by position.
std::vector<ScalePair> collect_pairs(std::span<const SpeedSeries> pred,
                                     std::span<const SpeedSeries> gt);

SpeedSeries apply_scale(const SpeedSeries& series, double k);

// Pooled RMSE over every retained (pred, gt) pair of all recordings.
double rmse(std::span<const SpeedSeries> pred, std::span<const SpeedSeries> gt);
double rmse(const SpeedSeries& pred, const SpeedSeries& gt);

struct EvaluationOptions {
  FitMethod method = FitMethod::kLeastSquares;
  // When non-empty, k is fitted on these recordings only and RMSE is still
  // reported over all of them.
  std::vector<std::string> fit_ids;
  EstimateOptions estimate;
};

struct EvaluationRow {
  std::string label;
  std::string crop_name = "full";
  EstimatorConfig config;
  ScaleFit fit;
  double rmse_pooled = 0.0;
  std::vector<std::pair<std::string, double>> rmse_per_recording;  // by recording id
};

// Fits one global k over the pre-scale series and reports pooled and
// per-recording RMSE of the scaled series.
EvaluationRow evaluate_series(std::span<const SpeedSeries> pre_scale,
                              std::span<const SpeedSeries> ground_truth,
                              const EvaluationOptions& options = {});

EvaluationRow evaluate_configuration(std::span<const Recording> recordings,
                                     const EstimatorConfig& config,
                                     const EvaluationOptions& options = {});

}  // namespace egospeed
