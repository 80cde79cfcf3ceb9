#include "egospeed/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <thread>

#include "egospeed/error.hpp"
#include "egospeed/ingest.hpp"

namespace egospeed {
namespace {

struct Region {
  int x0, y0, x1, y1;  // half-open
};

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) noexcept {
    sum += v;
    ++count;
  }
  double mean() const noexcept { return sum / static_cast<double>(count); }
};

struct Gates {
  bool motion;
  bool disparity;
};

class PixelGate {
 public:
  PixelGate(const FrameChannels& ch, const EstimatorConfig& config)
      : motion_(ch.motion.values()),
        motion_mask_(ch.motion.mask()),
        disp_(ch.disparity.values()),
        disp_mask_(ch.disparity.mask()),
        thresholds_(config.thresholds),
        joint_(config.joint_thresholds) {}

  Gates operator()(std::size_t i) const noexcept {
    const bool m = motion_mask_[i] && motion_[i] > thresholds_.of_min;
    const bool d = disp_mask_[i] && disp_[i] > thresholds_.disp_min;
    if (joint_) return {m && d, m && d};
    return {m, d};
  }

 private:
  std::span<const double> motion_;
  std::span<const std::uint8_t> motion_mask_;
  std::span<const double> disp_;
  std::span<const std::uint8_t> disp_mask_;
  ValidityThresholds thresholds_;
  bool joint_;
};

Region region_for(const FrameChannels& ch, const std::optional<CropRect>& crop) {
  const int w = ch.motion.width();
  const int h = ch.motion.height();
  if (!crop) return {0, 0, w, h};
  if (!crop->fits(w, h)) {
    throw Error(ErrorCode::kCropOutOfBounds,
                "crop (" + std::to_string(crop->x) + "," + std::to_string(crop->y) + "," +
                    std::to_string(crop->w) + "," + std::to_string(crop->h) + ") exceeds " +
                    std::to_string(w) + "x" + std::to_string(h));
  }
  return {crop->x, crop->y, crop->x + crop->w, crop->y + crop->h};
}

FrameEstimate base_estimate(const FrameChannels& ch, const EstimatorConfig& config,
                            const Region& r) {
  const PixelGate gate(ch, config);
  const auto motion = ch.motion.values();
  const auto disp = ch.disparity.values();
  Accumulator of, dp;
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      const std::size_t i = ch.motion.index(x, y);
      const Gates g = gate(i);
      if (g.motion) of.add(motion[i]);
      if (g.disparity) dp.add(disp[i]);
    }
  }
  FrameEstimate e;
  e.valid_pixel_count = of.count;
  if (of.count == 0) return e;
  if (!uses_disparity(config.mode)) {
    e.raw_value = of.mean();
  } else if (dp.count > 0) {
    e.raw_value = of.mean() / dp.mean();
  }
  return e;
}

void check_window(int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "smoothing window must be a positive odd integer, got " + std::to_string(window));
  }
}

bool same_extent(const FrameChannels& a, const FrameChannels& b) noexcept {
  return a.motion.width() == b.motion.width() && a.motion.height() == b.motion.height();
}

std::vector<double> smooth_plane(std::span<const FrameChannels* const> frames, std::size_t center,
                                 std::span<const double> (*values)(const FrameChannels&),
                                 std::span<const std::uint8_t> (*mask)(const FrameChannels&)) {
  const auto center_values = values(*frames[center]);
  const auto center_mask = mask(*frames[center]);
  std::vector<double> out(center_values.begin(), center_values.end());
  std::vector<double> sum(out.size(), 0.0);
  std::vector<std::uint32_t> count(out.size(), 0);
  for (const FrameChannels* f : frames) {
    const auto v = values(*f);
    const auto m = mask(*f);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (m[i]) {
        sum[i] += v[i];
        ++count[i];
      }
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (center_mask[i]) out[i] = sum[i] / static_cast<double>(count[i]);
  }
  return out;
}

unsigned resolve_threads(unsigned requested, int work) {
  const unsigned n = std::max(1u, requested);
  return std::min<unsigned>(n, static_cast<unsigned>(std::max(work, 1)));
}

}  // namespace

FrameChannels make_channels(const FlowField& flow, const DisparityMap& disparity,
                            EstimatorMode mode) {
  if (flow.width() != disparity.width() || flow.height() != disparity.height()) {
    throw Error(ErrorCode::kExtentMismatch,
                "flow is " + std::to_string(flow.width()) + "x" + std::to_string(flow.height()) +
                    " but disparity is " + std::to_string(disparity.width()) + "x" +
                    std::to_string(disparity.height()));
  }
  const Mask mask(flow.mask().begin(), flow.mask().end());
  std::vector<double> u(flow.u().begin(), flow.u().end());
  ScalarField motion = [&] {
    if (mode != EstimatorMode::kHorizOfOverDisp) return flow_magnitude(flow);
    std::vector<double> abs_u(u.size());
    std::transform(u.begin(), u.end(), abs_u.begin(), [](double x) { return std::abs(x); });
    return ScalarField(flow.width(), flow.height(), std::move(abs_u), mask);
  }();
  return FrameChannels{std::move(motion), ScalarField(flow.width(), flow.height(), std::move(u), mask),
                       disparity};
}

FrameEstimate frame_speed(const FlowField& flow, const DisparityMap& disparity,
                          const EstimatorConfig& config) {
  return frame_speed(make_channels(flow, disparity, config.mode), config);
}

FrameEstimate frame_speed(const FrameChannels& channels, const EstimatorConfig& config) {
  return base_estimate(channels, config, region_for(channels, config.crop));
}

FrameEstimate frame_speed_tc(const FlowField& flow, const DisparityMap& disparity,
                             const EstimatorConfig& config) {
  return frame_speed_tc(make_channels(flow, disparity, config.mode), config);
}

FrameEstimate frame_speed_tc(const FrameChannels& channels, const EstimatorConfig& config) {
  if (config.crop) {
    throw Error(ErrorCode::kTcRequiresFullFrame,
                "turning compensation needs the full frame, not a crop");
  }
  const int w = channels.motion.width();
  const int h = channels.motion.height();
  const int split = w / 2;  // odd widths: middle column belongs to the right half
  const PixelGate gate(channels, config);
  const auto u = channels.horizontal.values();
  const auto disp = channels.disparity.values();
  Accumulator left, right, dp;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = channels.motion.index(x, y);
      const Gates g = gate(i);
      if (g.motion) (x < split ? left : right).add(u[i]);
      if (g.disparity) dp.add(disp[i]);
    }
  }
  if (left.count == 0 || right.count == 0 || !(left.mean() * right.mean() > 0.0)) {
    return base_estimate(channels, config, {0, 0, w, h});
  }
  FrameEstimate e;
  e.tc_triggered = true;
  e.valid_pixel_count = left.count + right.count;
  const double spread = std::abs(left.mean() - right.mean());
  if (!uses_disparity(config.mode)) {
    e.raw_value = spread;
  } else if (dp.count > 0) {
    e.raw_value = spread / dp.mean();
  }
  return e;
}

FrameEstimate estimate_frame(const FrameChannels& channels, const EstimatorConfig& config) {
  return config.turning_compensation ? frame_speed_tc(channels, config)
                                     : frame_speed(channels, config);
}

void box_filter(std::span<const double> values, std::span<const std::uint8_t> present, int window,
                std::span<double> out) {
  check_window(window);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!present[i]) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half);
         j <= std::min<std::ptrdiff_t>(n - 1, i + half); ++j) {
      if (present[j]) {
        sum += values[j];
        ++count;
      }
    }
    out[i] = sum / static_cast<double>(count);
  }
}

SpeedSeries smooth_series(const SpeedSeries& series, int window) {
  if (series.values.empty()) {
    throw Error(ErrorCode::kEmptySeries, "cannot smooth an empty series " + series.recording_id);
  }
  check_window(window);
  const std::size_t n = series.size();
  std::vector<double> values(n, 0.0);
  std::vector<std::uint8_t> present(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (series.values[i]) {
      values[i] = *series.values[i];
      present[i] = 1;
    }
  }
  std::vector<double> out(n);
  box_filter(values, present, window, out);
  SpeedSeries result;
  result.recording_id = series.recording_id;
  result.frame_index_offset = series.frame_index_offset;
  result.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (present[i]) result.values[i] = out[i];
  }
  return result;
}

FrameChannels smooth_channels_at(std::span<const FrameChannels* const> window_frames,
                                 std::size_t center) {
  if (window_frames.empty() || center >= window_frames.size()) {
    throw Error(ErrorCode::kEmptySequence, "smoothing window has no center frame");
  }
  const FrameChannels& c = *window_frames[center];
  for (const FrameChannels* f : window_frames) {
    if (!same_extent(*f, c)) {
      throw Error(ErrorCode::kExtentMismatch, "pixel-level smoothing needs equal frame extents");
    }
  }
  const int w = c.motion.width();
  const int h = c.motion.height();
  auto motion = smooth_plane(
      window_frames, center, [](const FrameChannels& f) { return f.motion.values(); },
      [](const FrameChannels& f) { return f.motion.mask(); });
  auto horizontal = smooth_plane(
      window_frames, center, [](const FrameChannels& f) { return f.horizontal.values(); },
      [](const FrameChannels& f) { return f.horizontal.mask(); });
  auto disparity = smooth_plane(
      window_frames, center, [](const FrameChannels& f) { return f.disparity.values(); },
      [](const FrameChannels& f) { return f.disparity.mask(); });
  return FrameChannels{
      ScalarField(w, h, std::move(motion), Mask(c.motion.mask().begin(), c.motion.mask().end())),
      ScalarField(w, h, std::move(horizontal),
                  Mask(c.horizontal.mask().begin(), c.horizontal.mask().end())),
      DisparityMap(w, h, std::move(disparity),
                   Mask(c.disparity.mask().begin(), c.disparity.mask().end()))};
}

std::vector<FrameChannels> smooth_fields_pixelwise(std::span<const FrameChannels> frames,
                                                   int window) {
  if (frames.empty()) throw Error(ErrorCode::kEmptySequence, "no frames to smooth");
  check_window(window);
  for (const auto& f : frames) {
    if (!same_extent(f, frames.front())) {
      throw Error(ErrorCode::kExtentMismatch, "pixel-level smoothing needs equal frame extents");
    }
  }
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(frames.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<FrameChannels> out;
  out.reserve(frames.size());
  std::vector<const FrameChannels*> span_frames;
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, t + half);
    span_frames.clear();
    for (std::ptrdiff_t j = lo; j <= hi; ++j) span_frames.push_back(&frames[j]);
    out.push_back(smooth_channels_at(span_frames, static_cast<std::size_t>(t - lo)));
  }
  return out;
}

RecordingEstimate estimate_sequence(int pair_count, const ChannelSource& source,
                                    const EstimatorConfig& config, std::string recording_id,
                                    const EstimateOptions& options) {
  config.validate();
  if (pair_count < 1) {
    throw Error(ErrorCode::kEmptySequence, "recording " + recording_id + " has no frame pairs");
  }
  RecordingEstimate result;
  result.frames.resize(static_cast<std::size_t>(pair_count));

  if (!config.pixel_level_smoothing) {
    const unsigned threads = resolve_threads(options.max_threads, pair_count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(pair_count));
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int t = next++; t < pair_count; t = next++) {
        try {
          result.frames[t] = estimate_frame(source(t), config);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    // Report the earliest failing frame regardless of scheduling.
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    const int half = config.smoothing_window / 2;
    std::deque<FrameChannels> buffer;  // frames [first, first + size)
    int first = 0;
    std::vector<const FrameChannels*> window;
    for (int t = 0; t < pair_count; ++t) {
      const int lo = std::max(0, t - half);
      const int hi = std::min(pair_count - 1, t + half);
      while (first < lo) {
        buffer.pop_front();
        ++first;
      }
      while (first + static_cast<int>(buffer.size()) <= hi) {
        buffer.push_back(source(first + static_cast<int>(buffer.size())));
      }
      window.clear();
      for (int j = lo; j <= hi; ++j) window.push_back(&buffer[static_cast<std::size_t>(j - first)]);
      result.frames[t] =
          estimate_frame(smooth_channels_at(window, static_cast<std::size_t>(t - lo)), config);
    }
  }

  result.raw.recording_id = recording_id;
  result.raw.values.resize(result.frames.size());
  for (std::size_t t = 0; t < result.frames.size(); ++t) {
    result.frames[t].frame_index = static_cast<int>(t);
    result.raw.values[t] = result.frames[t].raw_value;
  }
  const bool series_smoothing =
      !config.pixel_level_smoothing || config.series_smoothing_after_pixel;
  result.smoothed =
      series_smoothing ? smooth_series(result.raw, config.smoothing_window) : result.raw;
  return result;
}

RecordingEstimate estimate_frames(std::span<const FlowField> flows,
                                  std::span<const DisparityMap> disparities,
                                  const EstimatorConfig& config, std::string recording_id,
                                  const EstimateOptions& options) {
  if (disparities.size() < flows.size()) {
    throw Error(ErrorCode::kCountMismatch,
                std::to_string(flows.size()) + " flow fields but only " +
                    std::to_string(disparities.size()) + " disparity maps");
  }
  const ChannelSource source = [&](int t) {
    return make_channels(flows[t], disparities[t], config.mode);
  };
  return estimate_sequence(static_cast<int>(flows.size()), source, config,
                           std::move(recording_id), options);
}

RecordingEstimate estimate_recording(const Recording& recording, const EstimatorConfig& config,
                                     const EstimateOptions& options) {
  recording.validate();
  const ChannelSource source = [&](int t) {
    return make_channels(read_flow(recording.flow_paths[t], recording.flow_format),
                         read_disparity(recording.disp_paths[t], recording.disp_format,
                                        recording.disp_scale),
                         config.mode);
  };
  return estimate_sequence(recording.frame_count - 1, source, config, recording.id, options);
}

SpeedSeries ground_truth_series(const Recording& recording) {
  SpeedSeries s;
  s.recording_id = recording.id;
  if (recording.ground_truth) s.values.assign(recording.ground_truth->begin(), recording.ground_truth->end());
  return s;
}

}  // namespace egospeed
