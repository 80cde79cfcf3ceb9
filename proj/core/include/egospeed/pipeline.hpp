#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "egospeed/types.hpp"

namespace egospeed {

struct FrameEstimate {
  int frame_index = 0;
  std::optional<double> raw_value;  // disengaged: no valid pixels
  std::size_t valid_pixel_count = 0;
  bool tc_triggered = false;
};

// Per-pixel inputs of one frame pair after mode selection:
//   motion     flow magnitude, or |u| in horizontal mode
//   horizontal signed u, used by turning compensation
//   disparity  disparity of the first frame of the pair
struct FrameChannels {
  ScalarField motion;
  ScalarField horizontal;
  DisparityMap disparity;
};

// Throws ExtentMismatch when flow and disparity extents differ.
FrameChannels make_channels(const FlowField& flow, const DisparityMap& disparity,
                            EstimatorMode mode);

// Mean motion over the crop divided by mean disparity over the crop. A pixel
// enters the motion mean iff it is valid and above of_min; it enters the
// disparity mean iff it is valid and above disp_min.
FrameEstimate frame_speed(const FlowField& flow, const DisparityMap& disparity,
                          const EstimatorConfig& config);
FrameEstimate frame_speed(const FrameChannels& channels, const EstimatorConfig& config);

// Turning compensation on the full frame. When the mean horizontal flow of the
// left half [0, w/2) and of the right half [w/2, w) share a strict sign, the
// estimate is |mL - mR| / mean disparity; otherwise frame_speed.
FrameEstimate frame_speed_tc(const FlowField& flow, const DisparityMap& disparity,
                             const EstimatorConfig& config);
FrameEstimate frame_speed_tc(const FrameChannels& channels, const EstimatorConfig& config);

// Dispatches on config.turning_compensation.
FrameEstimate estimate_frame(const FrameChannels& channels, const EstimatorConfig& config);

// Centered box filter with equal weights. The window shrinks at the ends, and
// missing entries are dropped from both sum and divisor; an entry that is
// missing on input stays missing.
SpeedSeries smooth_series(const SpeedSeries& series, int window);

// Same filter over raw samples; `present[i] == 0` marks a missing sample.
void box_filter(std::span<const double> values, std::span<const std::uint8_t> present, int window,
                std::span<double> out);

// Pixel-level temporal smoothing of every channel. Each pixel's time series is
// filtered as smooth_series does, using only samples valid at their frame;
// validity masks are unchanged.
std::vector<FrameChannels> smooth_fields_pixelwise(std::span<const FrameChannels> frames,
                                                   int window);

// Smoothed channels for frame `center` from the frames of its (possibly
// shrunk) window, given in temporal order.
FrameChannels smooth_channels_at(std::span<const FrameChannels* const> window_frames,
                                 std::size_t center);

struct RecordingEstimate {
  std::vector<FrameEstimate> frames;
  SpeedSeries raw;       // per-frame values before temporal smoothing
  SpeedSeries smoothed;  // pre-scale series
};

// Produces the channels of frame pair t (flow t->t+1, disparity t).
using ChannelSource = std::function<FrameChannels(int pair_index)>;

struct EstimateOptions {
  unsigned max_threads = 1;
};

RecordingEstimate estimate_sequence(int pair_count, const ChannelSource& source,
                                    const EstimatorConfig& config, std::string recording_id,
                                    const EstimateOptions& options = {});

// In-memory frames; flows.size() pairs are evaluated, disparities needs at
// least as many entries.
RecordingEstimate estimate_frames(std::span<const FlowField> flows,
                                  std::span<const DisparityMap> disparities,
                                  const EstimatorConfig& config, std::string recording_id = {},
                                  const EstimateOptions& options = {});

// Loads maps from disk; returns frame_count - 1 values.
RecordingEstimate estimate_recording(const Recording& recording, const EstimatorConfig& config,
                                     const EstimateOptions& options = {});

// Ground truth of a recording as a series aligned with frame indices.
SpeedSeries ground_truth_series(const Recording& recording);

}  // namespace egospeed
