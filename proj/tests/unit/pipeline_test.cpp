#include <gtest/gtest.h>

#include <cmath>

#include "egospeed/error.hpp"
#include "egospeed/ingest.hpp"
#include "egospeed/pipeline.hpp"
#include "egospeed/synth.hpp"
#include "oracles.hpp"

namespace egospeed {
namespace {

using oracle::close_rel;
using oracle::Rng;

EstimatorConfig base_config(EstimatorMode mode = EstimatorMode::kOfOverDisp) {
  EstimatorConfig c;
  c.mode = mode;
  c.smoothing_window = 1;
  return c;
}

TEST(FrameSpeed, UniformFields) {
  const auto e = frame_speed(FlowField::uniform(6, 4, 3.0, 4.0), DisparityMap::filled(6, 4, 0.5),
                             base_config());
  ASSERT_TRUE(e.raw_value);
  EXPECT_EQ(*e.raw_value, 10.0);
  EXPECT_EQ(e.valid_pixel_count, 24u);
  EXPECT_FALSE(e.tc_triggered);
}

TEST(FrameSpeed, BelowFlowThresholdIsMissing) {
  const auto e = frame_speed(FlowField::uniform(6, 4, 0.1, 0.0), DisparityMap::filled(6, 4, 0.5),
                             base_config());
  EXPECT_FALSE(e.raw_value);
  EXPECT_EQ(e.valid_pixel_count, 0u);
}

TEST(FrameSpeed, ThresholdIsStrict) {
  const auto e = frame_speed(FlowField::uniform(2, 2, 0.2, 0.0), DisparityMap::filled(2, 2, 1.0),
                             base_config());
  EXPECT_FALSE(e.raw_value);
  const auto d = frame_speed(FlowField::uniform(2, 2, 1.0, 0.0), DisparityMap::filled(2, 2, 0.01),
                             base_config());
  EXPECT_FALSE(d.raw_value);
  const auto e1 = frame_speed(FlowField::uniform(2, 2, 1.0, 0.0), DisparityMap::filled(2, 2, 0.01),
                              base_config(EstimatorMode::kOfOnly));
  ASSERT_TRUE(e1.raw_value);
  EXPECT_EQ(*e1.raw_value, 1.0);
}

TEST(FrameSpeed, ModesOnKnownField) {
  // u = -3, v = 4: |OF| = 5, |u| = 3.
  const auto flow = FlowField::uniform(4, 4, -3.0, 4.0);
  const auto disp = DisparityMap::filled(4, 4, 2.0);
  EXPECT_EQ(*frame_speed(flow, disp, base_config(EstimatorMode::kOfOnly)).raw_value, 5.0);
  EXPECT_EQ(*frame_speed(flow, disp, base_config(EstimatorMode::kOfOverDisp)).raw_value, 2.5);
  EXPECT_EQ(*frame_speed(flow, disp, base_config(EstimatorMode::kHorizOfOverDisp)).raw_value, 1.5);
}

TEST(FrameSpeed, IndependentVersusJointGates) {
  // Pixel 0 passes only the flow gate, pixel 1 only the disparity gate.
  FlowField flow(2, 1, {4.0, 0.0}, {0.0, 0.0});
  DisparityMap disp(2, 1, {0.0, 2.0});
  auto c = base_config();
  EXPECT_EQ(*frame_speed(flow, disp, c).raw_value, 2.0);
  c.joint_thresholds = true;
  EXPECT_FALSE(frame_speed(flow, disp, c).raw_value);
}

TEST(FrameSpeed, CropRestrictsPixels) {
  FlowField flow(4, 1, {1.0, 2.0, 3.0, 100.0}, {0, 0, 0, 0});
  auto c = base_config(EstimatorMode::kOfOnly);
  c.crop = CropRect{1, 0, 2, 1};
  EXPECT_EQ(*frame_speed(flow, DisparityMap::filled(4, 1, 1.0), c).raw_value, 2.5);
  c.crop = CropRect{3, 0, 2, 1};
  try {
    frame_speed(flow, DisparityMap::filled(4, 1, 1.0), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCropOutOfBounds);
  }
}

TEST(FrameSpeed, ExtentMismatch) {
  try {
    frame_speed(FlowField::uniform(3, 2, 1, 1), DisparityMap::filled(2, 3, 1), base_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExtentMismatch);
  }
}

TEST(FrameSpeed, MatchesBruteForce) {
  Rng rng(101);
  const EstimatorMode modes[] = {EstimatorMode::kOfOnly, EstimatorMode::kOfOverDisp,
                                 EstimatorMode::kHorizOfOverDisp};
  for (int trial = 0; trial < 300; ++trial) {
    const int w = rng.integer(1, 16), h = rng.integer(1, 16);
    const auto flow = oracle::random_flow(rng, w, h, rng.uniform(0.1, 10.0), 0.2);
    const auto disp = oracle::random_disparity(rng, w, h, 0.0, rng.uniform(0.005, 3.0), 0.2);
    auto c = base_config(modes[trial % 3]);
    c.joint_thresholds = trial % 5 == 0;
    if (rng.chance(0.5)) {
      CropRect r;
      r.w = rng.integer(1, w);
      r.h = rng.integer(1, h);
      r.x = rng.integer(0, w - r.w);
      r.y = rng.integer(0, h - r.h);
      c.crop = r;
    }
    const auto expected = oracle::frame_speed(flow, disp, c);
    const auto got = frame_speed(flow, disp, c);
    ASSERT_EQ(got.raw_value.has_value(), expected.has_value()) << trial;
    if (expected) EXPECT_TRUE(close_rel(*got.raw_value, *expected, 1e-12)) << trial;
  }
}

TEST(FrameSpeed, FlowHomogeneity) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.integer(2, 12), h = rng.integer(2, 12);
    // Components in [1, 5] keep every magnitude above of_min after scaling.
    std::vector<double> u(w * h), v(w * h);
    for (auto& x : u) x = rng.uniform(1.0, 5.0) * (rng.chance(0.5) ? 1 : -1);
    for (auto& x : v) x = rng.uniform(1.0, 5.0) * (rng.chance(0.5) ? 1 : -1);
    const double lambda = rng.uniform(0.5, 4.0);
    std::vector<double> su(u), sv(v);
    for (auto& x : su) x *= lambda;
    for (auto& x : sv) x *= lambda;
    const FlowField f(w, h, u, v), g(w, h, su, sv);
    const auto disp = oracle::random_disparity(rng, w, h, 0.05, 2.0, 0.0);
    for (auto mode : {EstimatorMode::kOfOnly, EstimatorMode::kOfOverDisp,
                      EstimatorMode::kHorizOfOverDisp}) {
      const double a = *frame_speed(f, disp, base_config(mode)).raw_value;
      const double b = *frame_speed(g, disp, base_config(mode)).raw_value;
      EXPECT_TRUE(close_rel(b, lambda * a, 1e-12));
    }
  }
}

TEST(FrameSpeed, InverseDisparityHomogeneity) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.integer(2, 12), h = rng.integer(2, 12);
    const auto flow = oracle::random_flow(rng, w, h, 5.0, 0.1);
    const auto disp = oracle::random_disparity(rng, w, h, 0.1, 2.0, 0.1);
    const double mu = rng.uniform(0.2, 5.0);
    std::vector<double> d(disp.values().begin(), disp.values().end());
    for (auto& x : d) x *= mu;
    const DisparityMap scaled(w, h, d, Mask(disp.mask().begin(), disp.mask().end()));
    const auto a = frame_speed(flow, disp, base_config()).raw_value;
    const auto b = frame_speed(flow, scaled, base_config()).raw_value;
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_TRUE(close_rel(*b, *a / mu, 1e-12));
  }
}

TEST(FrameSpeed, HorizontalSignFlipInvariance) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.integer(1, 10), h = rng.integer(1, 10);
    const auto flow = oracle::random_flow(rng, w, h, 3.0, 0.2);
    std::vector<double> u(flow.u().begin(), flow.u().end());
    for (auto& x : u) x = -x;
    const FlowField flipped(w, h, u, std::vector<double>(flow.v().begin(), flow.v().end()),
                            Mask(flow.mask().begin(), flow.mask().end()));
    const auto disp = oracle::random_disparity(rng, w, h, 0.0, 1.0, 0.1);
    for (auto mode : {EstimatorMode::kOfOnly, EstimatorMode::kOfOverDisp,
                      EstimatorMode::kHorizOfOverDisp}) {
      EXPECT_EQ(frame_speed(flow, disp, base_config(mode)).raw_value,
                frame_speed(flipped, disp, base_config(mode)).raw_value);
    }
  }
}

EstimatorConfig tc_config() {
  auto c = base_config();
  c.turning_compensation = true;
  return c;
}

TEST(TurningCompensation, PureYawGivesZero) {
  const auto e = frame_speed_tc(FlowField::uniform(8, 4, 2.0, 0.0), DisparityMap::filled(8, 4, 0.5),
                                tc_config());
  EXPECT_TRUE(e.tc_triggered);
  ASSERT_TRUE(e.raw_value);
  EXPECT_EQ(*e.raw_value, 0.0);
}

TEST(TurningCompensation, ConstructedHalves) {
  // Left half u = 2, right half u = 5, mean disparity 0.5.
  std::vector<double> u(8 * 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 8; ++x) u[y * 8 + x] = x < 4 ? 2.0 : 5.0;
  const FlowField flow(8, 2, u, std::vector<double>(16, 0.0));
  const auto e = frame_speed_tc(flow, DisparityMap::filled(8, 2, 0.5), tc_config());
  EXPECT_TRUE(e.tc_triggered);
  EXPECT_EQ(*e.raw_value, 6.0);
  EXPECT_EQ(e.valid_pixel_count, 16u);
}

TEST(TurningCompensation, OddWidthMiddleColumnGoesRight) {
  // Width 5: left = columns 0..1, right = 2..4.
  const FlowField flow(5, 1, {1.0, 1.0, -9.0, 4.0, 4.0}, {0, 0, 0, 0, 0});
  const auto e = frame_speed_tc(flow, DisparityMap::filled(5, 1, 1.0), tc_config());
  EXPECT_FALSE(e.tc_triggered);  // mR = -1/3
  const FlowField flow2(5, 1, {1.0, 1.0, 1.0, 4.0, 4.0}, {0, 0, 0, 0, 0});
  const auto e2 = frame_speed_tc(flow2, DisparityMap::filled(5, 1, 1.0), tc_config());
  EXPECT_TRUE(e2.tc_triggered);
  EXPECT_DOUBLE_EQ(*e2.raw_value, 2.0);
}

TEST(TurningCompensation, ForwardTranslationFallsBack) {
  CameraModel cam;
  cam = cam.resized(124, 38);
  const auto depth = random_smooth_depth(cam, 4, 5.0, 30.0);
  const auto flow = render_flow(depth, cam, MotionSample{10.0, 0.0});
  const auto disp = render_disparity(depth, cam);
  const auto tc = frame_speed_tc(flow, disp, tc_config());
  const auto base = frame_speed(flow, disp, base_config());
  EXPECT_FALSE(tc.tc_triggered);
  EXPECT_EQ(tc.raw_value, base.raw_value);
  EXPECT_EQ(tc.valid_pixel_count, base.valid_pixel_count);
}

TEST(TurningCompensation, RequiresFullFrame) {
  auto c = tc_config();
  c.crop = CropRect{0, 0, 2, 2};
  try {
    frame_speed_tc(FlowField::uniform(4, 4, 1, 0), DisparityMap::filled(4, 4, 1), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTcRequiresFullFrame);
  }
}

TEST(TurningCompensation, MatchesBruteForce) {
  Rng rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = rng.integer(1, 16), h = rng.integer(1, 16);
    // Bias u so that both same-sign and mixed-sign halves occur.
    const double bias = rng.uniform(-3.0, 3.0);
    auto f = oracle::random_flow(rng, w, h, 2.0, 0.2);
    std::vector<double> u(f.u().begin(), f.u().end());
    for (auto& x : u) x += bias;
    const FlowField flow(w, h, u, std::vector<double>(f.v().begin(), f.v().end()),
                         Mask(f.mask().begin(), f.mask().end()));
    const auto disp = oracle::random_disparity(rng, w, h, 0.0, 2.0, 0.2);
    auto c = tc_config();
    c.mode = static_cast<EstimatorMode>(trial % 3);
    const auto expected = oracle::frame_speed_tc(flow, disp, c);
    const auto got = frame_speed_tc(flow, disp, c);
    ASSERT_EQ(got.tc_triggered, expected.triggered) << trial;
    ASSERT_EQ(got.raw_value.has_value(), expected.value.has_value()) << trial;
    if (expected.value) EXPECT_TRUE(close_rel(*got.raw_value, *expected.value, 1e-12)) << trial;
  }
}

SpeedSeries series(std::vector<std::optional<double>> v) { return oracle::to_series(v); }

TEST(SmoothSeries, ConstantStaysConstant) {
  for (int window : {1, 3, 25, 101}) {
    const auto s = smooth_series(series(std::vector<std::optional<double>>(40, 7.5)), window);
    for (const auto& v : s.values) EXPECT_DOUBLE_EQ(*v, 7.5);
  }
}

TEST(SmoothSeries, SpikeSpreadsOverWindow) {
  std::vector<std::optional<double>> v(80, 0.0);
  v[40] = 25.0;
  const auto s = smooth_series(series(v), 25);
  for (int i = 0; i < 80; ++i) {
    const double expected = std::abs(i - 40) <= 12 ? 1.0 : 0.0;
    EXPECT_DOUBLE_EQ(*s.values[i], expected) << i;
  }
}

TEST(SmoothSeries, ShrinksAtBoundaries) {
  const auto s = smooth_series(series({1.0, 2.0, 3.0, 4.0}), 3);
  EXPECT_DOUBLE_EQ(*s.values[0], 1.5);
  EXPECT_DOUBLE_EQ(*s.values[1], 2.0);
  EXPECT_DOUBLE_EQ(*s.values[3], 3.5);
}

TEST(SmoothSeries, MissingExcludedAndPreserved) {
  const auto s = smooth_series(series({1.0, std::nullopt, 3.0}), 3);
  EXPECT_DOUBLE_EQ(*s.values[0], 1.0);
  EXPECT_FALSE(s.values[1]);
  EXPECT_DOUBLE_EQ(*s.values[2], 3.0);
}

TEST(SmoothSeries, WindowOneIsIdentity) {
  Rng rng(12);
  const auto v = oracle::random_series(rng, 150, 0.0, 30.0, 0.1);
  const auto s = smooth_series(series(v), 1);
  EXPECT_EQ(s.values, v);
}

TEST(SmoothSeries, WindowThreeIsNotIdempotent) {
  const auto once = smooth_series(series({0.0, 0.0, 9.0, 0.0, 0.0}), 3);
  const auto twice = smooth_series(once, 3);
  EXPECT_NE(once.values, twice.values);
}

TEST(SmoothSeries, Errors) {
  EXPECT_THROW(smooth_series(series({}), 3), Error);
  EXPECT_THROW(smooth_series(series({1.0}), 4), Error);
  EXPECT_THROW(smooth_series(series({1.0}), 0), Error);
}

TEST(SmoothSeries, MatchesBruteForce) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 200);
    const int window = 2 * rng.integer(0, 20) + 1;
    const auto v = oracle::random_series(rng, n, 0.0, 50.0, rng.uniform(0.0, 0.3));
    const auto expected = oracle::box_average(v, window);
    const auto got = smooth_series(series(v), window);
    ASSERT_EQ(got.values.size(), expected.size());
    for (int i = 0; i < n; ++i) {
      ASSERT_EQ(got.values[i].has_value(), expected[i].has_value());
      if (expected[i]) EXPECT_TRUE(close_rel(*got.values[i], *expected[i], 1e-12));
    }
  }
}

std::vector<FrameChannels> random_channels(Rng& rng, int n, int w, int h) {
  std::vector<FrameChannels> out;
  for (int t = 0; t < n; ++t) {
    out.push_back(make_channels(oracle::random_flow(rng, w, h, 4.0, 0.2),
                                oracle::random_disparity(rng, w, h, 0.0, 2.0, 0.2),
                                EstimatorMode::kOfOverDisp));
  }
  return out;
}

TEST(PixelSmoothing, IdenticalFramesUnchanged) {
  Rng rng(1);
  const auto one = random_channels(rng, 1, 5, 4);
  std::vector<FrameChannels> frames(7, one[0]);
  const auto out = smooth_fields_pixelwise(frames, 5);
  for (const auto& f : out) {
    for (std::size_t i = 0; i < f.motion.size(); ++i) {
      if (!f.motion.mask()[i]) continue;
      EXPECT_DOUBLE_EQ(f.motion.values()[i], one[0].motion.values()[i]);
      EXPECT_DOUBLE_EQ(f.horizontal.values()[i], one[0].horizontal.values()[i]);
    }
  }
}

TEST(PixelSmoothing, SingleFrameUnchanged) {
  Rng rng(2);
  const auto frames = random_channels(rng, 1, 6, 3);
  const auto out = smooth_fields_pixelwise(frames, 25);
  for (std::size_t i = 0; i < frames[0].motion.size(); ++i) {
    EXPECT_EQ(out[0].motion.values()[i], frames[0].motion.values()[i]);
    EXPECT_EQ(out[0].disparity.values()[i], frames[0].disparity.values()[i]);
  }
}

TEST(PixelSmoothing, Errors) {
  Rng rng(3);
  EXPECT_THROW(smooth_fields_pixelwise(std::vector<FrameChannels>{}, 3), Error);
  auto frames = random_channels(rng, 2, 3, 3);
  frames.push_back(random_channels(rng, 1, 4, 3)[0]);
  try {
    smooth_fields_pixelwise(frames, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExtentMismatch);
  }
}

TEST(PixelSmoothing, MatchesPerPixelSeriesOracle) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.integer(1, 8), h = rng.integer(1, 8), n = rng.integer(1, 30);
    const int window = 2 * rng.integer(0, 6) + 1;
    const auto frames = random_channels(rng, n, w, h);
    const auto got = smooth_fields_pixelwise(frames, window);
    std::vector<ScalarField> motion, horizontal, disparity;
    for (const auto& f : frames) {
      motion.push_back(f.motion);
      horizontal.push_back(f.horizontal);
      disparity.push_back(f.disparity.as_scalar());
    }
    const auto em = oracle::pixelwise_average(motion, window);
    const auto eh = oracle::pixelwise_average(horizontal, window);
    const auto ed = oracle::pixelwise_average(disparity, window);
    for (int t = 0; t < n; ++t) {
      for (std::size_t i = 0; i < em[t].size(); ++i) {
        ASSERT_EQ(got[t].motion.mask()[i], em[t].mask()[i]);
        ASSERT_EQ(got[t].disparity.mask()[i], ed[t].mask()[i]);
        if (em[t].mask()[i]) {
          EXPECT_TRUE(close_rel(got[t].motion.values()[i], em[t].values()[i], 1e-12));
          EXPECT_TRUE(close_rel(got[t].horizontal.values()[i], eh[t].values()[i], 1e-12));
        }
        if (ed[t].mask()[i]) {
          EXPECT_TRUE(close_rel(got[t].disparity.values()[i], ed[t].values()[i], 1e-12));
        }
      }
    }
  }
}

SyntheticFrames cruise_frames(int n, double speed, std::uint64_t seed, int w = 124, int h = 38) {
  CameraModel cam = CameraModel{}.resized(w, h);
  SyntheticScene scene{random_smooth_depth(cam, seed, 5.0, 30.0), constant_motion(n, speed)};
  return render_frames(scene, cam, n);
}

TEST(EstimateSequence, ConstantSpeedGivesConstantSeries) {
  const auto frames = cruise_frames(60, 10.0, 3);
  EstimatorConfig c;
  const auto est = estimate_frames(frames.flows, frames.disparities, c, "r");
  ASSERT_EQ(est.smoothed.size(), 59u);
  const double first = *est.smoothed.values[0];
  for (const auto& v : est.smoothed.values) EXPECT_TRUE(close_rel(*v, first, 1e-9));
  EXPECT_EQ(est.smoothed.recording_id, "r");
}

TEST(EstimateSequence, AllInvalidFrameIsMissingNeighborsUnaffected) {
  auto frames = cruise_frames(7, 10.0, 3);
  const auto& f = frames.flows[3];
  frames.flows[3] = FlowField(f.width(), f.height(), std::vector<double>(f.u().begin(), f.u().end()),
                              std::vector<double>(f.v().begin(), f.v().end()), Mask(f.size(), 0));
  auto c = base_config();
  const auto est = estimate_frames(frames.flows, frames.disparities, c);
  EXPECT_FALSE(est.raw.values[3]);
  EXPECT_TRUE(est.raw.values[2] && est.raw.values[4]);
  c.smoothing_window = 3;
  const auto smoothed = estimate_frames(frames.flows, frames.disparities, c);
  EXPECT_FALSE(smoothed.smoothed.values[3]);
  EXPECT_DOUBLE_EQ(*smoothed.smoothed.values[2], 0.5 * (*est.raw.values[1] + *est.raw.values[2]));
}

TEST(EstimateSequence, DeterministicAcrossThreadCounts) {
  Rng rng(4);
  std::vector<FlowField> flows;
  std::vector<DisparityMap> disps;
  for (int t = 0; t < 40; ++t) {
    flows.push_back(oracle::random_flow(rng, 20, 10, 5.0, 0.1));
    disps.push_back(oracle::random_disparity(rng, 20, 10, 0.0, 2.0, 0.1));
  }
  for (bool e3 : {false, true}) {
    for (bool tc : {false, true}) {
      EstimatorConfig c;
      c.smoothing_window = 5;
      c.pixel_level_smoothing = e3;
      c.turning_compensation = tc;
      const auto a = estimate_frames(flows, disps, c, "x", EstimateOptions{1});
      const auto b = estimate_frames(flows, disps, c, "x", EstimateOptions{8});
      const auto again = estimate_frames(flows, disps, c, "x", EstimateOptions{1});
      EXPECT_EQ(a.smoothed.values, b.smoothed.values);
      EXPECT_EQ(a.raw.values, again.raw.values);
      for (std::size_t i = 0; i < a.frames.size(); ++i) {
        EXPECT_EQ(a.frames[i].tc_triggered, b.frames[i].tc_triggered);
      }
    }
  }
}

TEST(EstimateSequence, PixelSmoothingMatchesBatchDefinition) {
  Rng rng(5);
  std::vector<FlowField> flows;
  std::vector<DisparityMap> disps;
  for (int t = 0; t < 15; ++t) {
    flows.push_back(oracle::random_flow(rng, 9, 7, 5.0, 0.1));
    disps.push_back(oracle::random_disparity(rng, 9, 7, 0.0, 2.0, 0.1));
  }
  EstimatorConfig c;
  c.smoothing_window = 5;
  c.pixel_level_smoothing = true;
  c.series_smoothing_after_pixel = false;
  const auto est = estimate_frames(flows, disps, c);
  std::vector<FrameChannels> channels;
  for (int t = 0; t < 15; ++t) channels.push_back(make_channels(flows[t], disps[t], c.mode));
  const auto smoothed = smooth_fields_pixelwise(channels, 5);
  for (int t = 0; t < 15; ++t) {
    EXPECT_EQ(est.smoothed.values[t], frame_speed(smoothed[t], c).raw_value) << t;
  }
  c.series_smoothing_after_pixel = true;
  const auto both = estimate_frames(flows, disps, c);
  EXPECT_EQ(both.smoothed.values, smooth_series(est.smoothed, 5).values);
}

TEST(EstimateSequence, ErrorsPropagate) {
  const auto frames = cruise_frames(5, 10.0, 1);
  EstimatorConfig c;
  c.crop = CropRect{0, 0, 1000, 10};
  try {
    estimate_frames(frames.flows, frames.disparities, c, {}, EstimateOptions{4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCropOutOfBounds);
  }
}

TEST(EstimateSequence, LinearityInForwardSpeed) {
  const auto slow = cruise_frames(10, 5.0, 6);
  const auto fast = cruise_frames(10, 10.0, 6);
  EstimatorConfig c;
  c.smoothing_window = 1;
  c.crop = CropRect{90, 0, 34, 38};  // far enough from the principal point
  const auto a = estimate_frames(slow.flows, slow.disparities, c);
  const auto b = estimate_frames(fast.flows, fast.disparities, c);
  for (std::size_t i = 0; i < a.smoothed.size(); ++i) {
    EXPECT_EQ(a.frames[i].valid_pixel_count, b.frames[i].valid_pixel_count);
    EXPECT_TRUE(close_rel(*b.smoothed.values[i], 2.0 * *a.smoothed.values[i], 1e-6));
  }
}

TEST(EstimateRecording, FromDiskMatchesInMemoryWithinFloatPrecision) {
  oracle::TempDir dir;
  CameraModel cam = CameraModel{}.resized(124, 38);
  SyntheticScene scene{random_smooth_depth(cam, 2, 5.0, 30.0), constant_motion(8, 10.0)};
  GenerateOptions opts;
  opts.dir = dir.path();
  opts.id = "r";
  const auto rec = generate_recording(scene, cam, 8, opts);
  EstimatorConfig c;
  c.smoothing_window = 3;
  const auto disk = estimate_recording(rec.recording, c);
  const auto frames = render_frames(scene, cam, 8);
  const auto mem = estimate_frames(frames.flows, frames.disparities, c);
  ASSERT_EQ(disk.smoothed.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_TRUE(close_rel(*disk.smoothed.values[i], *mem.smoothed.values[i], 1e-6));
  }
  const auto twice = estimate_recording(rec.recording, c);
  EXPECT_EQ(disk.smoothed.values, twice.smoothed.values);
  const auto gt = ground_truth_series(rec.recording);
  EXPECT_EQ(gt.size(), 8u);
  EXPECT_EQ(*gt.values[0], 10.0);
}

}  // namespace
}  // namespace egospeed
