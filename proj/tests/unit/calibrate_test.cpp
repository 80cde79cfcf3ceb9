#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "egospeed/calibrate.hpp"
#include "egospeed/error.hpp"
#include "oracles.hpp"

namespace egospeed {
namespace {

using oracle::close_rel;
using oracle::Rng;

std::vector<ScalePair> pairs_of(std::initializer_list<std::pair<double, double>> list) {
  std::vector<ScalePair> out;
  for (auto [p, g] : list) out.push_back({p, g});
  return out;
}

TEST(FitScale, ExactProportionality) {
  const auto pairs = pairs_of({{1, 2}, {2, 4}, {3, 6}});
  EXPECT_DOUBLE_EQ(fit_scale(pairs, FitMethod::kLeastSquares).k, 2.0);
  EXPECT_DOUBLE_EQ(fit_scale(pairs, FitMethod::kMedianRatio).k, 2.0);
  EXPECT_EQ(fit_scale(pairs).n_samples, 3u);
}

TEST(FitScale, ClosedFormAndEvenMedian) {
  const auto pairs = pairs_of({{1, 1}, {1, 3}});
  EXPECT_DOUBLE_EQ(fit_scale(pairs, FitMethod::kLeastSquares).k, 2.0);
  EXPECT_DOUBLE_EQ(fit_scale(pairs, FitMethod::kMedianRatio).k, 2.0);
}

TEST(FitScale, MedianSkipsNonPositivePredictions) {
  const auto pairs = pairs_of({{0, 5}, {1, 3}, {2, 2}, {4, 4}});
  const auto fit = fit_scale(pairs, FitMethod::kMedianRatio);
  EXPECT_DOUBLE_EQ(fit.k, 1.0);
  EXPECT_EQ(fit.n_samples, 3u);
}

TEST(FitScale, Degenerate) {
  for (auto method : {FitMethod::kLeastSquares, FitMethod::kMedianRatio}) {
    try {
      fit_scale({}, method);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerateFit);
    }
    EXPECT_THROW(fit_scale(pairs_of({{0, 1}, {0, 2}}), method), Error);
  }
}

TEST(FitScale, MatchesOracles) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScalePair> pairs;
    std::vector<std::pair<double, double>> raw;
    const int n = rng.integer(1, 200);
    for (int i = 0; i < n; ++i) {
      const double p = rng.uniform(0.01, 10.0), g = rng.uniform(0.0, 30.0);
      pairs.push_back({p, g});
      raw.emplace_back(p, g);
    }
    EXPECT_TRUE(close_rel(fit_scale(pairs, FitMethod::kLeastSquares).k,
                          oracle::least_squares_k(raw), 1e-12));
    EXPECT_TRUE(close_rel(fit_scale(pairs, FitMethod::kMedianRatio).k,
                          oracle::median_ratio_k(raw), 1e-12));
  }
}

TEST(FitScale, LeastSquaresIsLocalMinimum) {
  Rng rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScalePair> pairs;
    for (int i = 0; i < 50; ++i) pairs.push_back({rng.uniform(0.1, 5), rng.uniform(0, 20)});
    const double k = fit_scale(pairs).k;
    const auto residual = [&](double kk) {
      double s = 0;
      for (auto [p, g] : pairs) s += (g - kk * p) * (g - kk * p);
      return s;
    };
    EXPECT_LE(residual(k), residual(k * (1 + 1e-6)));
    EXPECT_LE(residual(k), residual(k * (1 - 1e-6)));
  }
}

TEST(FitScale, ScaleEquivariance) {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = rng.uniform(0.1, 10.0);
    std::vector<ScalePair> a, b;
    for (int i = 0; i < 30; ++i) {
      const double p = rng.uniform(0.1, 5), g = rng.uniform(0, 20);
      a.push_back({p, g});
      b.push_back({lambda * p, g});
    }
    for (auto m : {FitMethod::kLeastSquares, FitMethod::kMedianRatio}) {
      EXPECT_TRUE(close_rel(fit_scale(b, m).k, fit_scale(a, m).k / lambda, 1e-12));
    }
    std::vector<std::optional<double>> pa, pb, gt;
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa.push_back(a[i].pred);
      pb.push_back(b[i].pred);
      gt.push_back(a[i].gt);
    }
    const auto sa = apply_scale(oracle::to_series(pa), fit_scale(a).k);
    const auto sb = apply_scale(oracle::to_series(pb), fit_scale(b).k);
    EXPECT_TRUE(close_rel(rmse(sa, oracle::to_series(gt)), rmse(sb, oracle::to_series(gt)), 1e-9));
  }
}

TEST(ApplyScale, Examples) {
  const auto s = apply_scale(oracle::to_series({10.0, std::nullopt, 10.0}), 0.5);
  EXPECT_EQ(*s.values[0], 5.0);
  EXPECT_FALSE(s.values[1]);
  Rng rng(20);
  const auto v = oracle::random_series(rng, 100, 0, 10, 0.1);
  EXPECT_EQ(apply_scale(oracle::to_series(v), 1.0).values, v);
  const double k = rng.uniform(0.1, 3.0);
  const auto scaled = apply_scale(oracle::to_series(v), k);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) EXPECT_EQ(*scaled.values[i], *v[i] * k);
  }
}

TEST(Rmse, Examples) {
  const auto gt = oracle::to_series({1.0, 2.0, 3.0});
  EXPECT_EQ(rmse(gt, gt), 0.0);
  EXPECT_DOUBLE_EQ(rmse(oracle::to_series({2.0, 3.0, 4.0}), gt), 1.0);
  std::vector<SpeedSeries> pred = {oracle::to_series({1, 1, 1}), oracle::to_series({2, 2})};
  std::vector<SpeedSeries> truth = {oracle::to_series({0, 0, 0}), oracle::to_series({0, 0})};
  EXPECT_NEAR(rmse(pred, truth), 1.4832, 1e-4);
  EXPECT_DOUBLE_EQ(rmse(pred, truth), std::sqrt(2.2));
}

TEST(Rmse, NoOverlap) {
  try {
    rmse(oracle::to_series({std::nullopt, 1.0}), oracle::to_series({1.0, std::nullopt}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoOverlap);
  }
}

TEST(Rmse, AlignsByFrameOffset) {
  // pred covers frames 2..3, gt covers 0..3.
  const auto pred = oracle::to_series({5.0, 6.0}, "r", 2);
  const auto gt = oracle::to_series({0.0, 0.0, 5.0, 7.0}, "r", 0);
  EXPECT_DOUBLE_EQ(rmse(pred, gt), std::sqrt(0.5));
}

TEST(Rmse, MatchesPooledOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const int recs = rng.integer(1, 4);
    std::vector<std::vector<std::optional<double>>> p, g;
    std::vector<SpeedSeries> ps, gs;
    for (int r = 0; r < recs; ++r) {
      const int n = rng.integer(1, 200);
      p.push_back(oracle::random_series(rng, n, 0, 30, 0.1));
      g.push_back(oracle::random_series(rng, n, 0, 30, 0.05));
      ps.push_back(oracle::to_series(p.back()));
      gs.push_back(oracle::to_series(g.back()));
    }
    double expected;
    try {
      expected = oracle::pooled_rmse(p, g);
    } catch (...) {
      EXPECT_THROW(rmse(ps, gs), Error);
      continue;
    }
    EXPECT_TRUE(close_rel(rmse(ps, gs), expected, 1e-12));
  }
}

TEST(Rmse, PermutationInvariantAndZeroSamplesShrinkIt) {
  Rng rng(22);
  std::vector<std::optional<double>> p, g;
  for (int i = 0; i < 50; ++i) {
    p.push_back(rng.uniform(0, 10));
    g.push_back(rng.uniform(0, 10));
  }
  const double base = rmse(oracle::to_series(p), oracle::to_series(g));
  std::vector<int> order(50);
  for (int i = 0; i < 50; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(3));
  std::vector<std::optional<double>> pp, gg;
  for (int i : order) {
    pp.push_back(p[i]);
    gg.push_back(g[i]);
  }
  EXPECT_TRUE(close_rel(rmse(oracle::to_series(pp), oracle::to_series(gg)), base, 1e-12));
  pp.push_back(3.0);
  gg.push_back(3.0);
  EXPECT_LT(rmse(oracle::to_series(pp), oracle::to_series(gg)), base);
}

TEST(EvaluateSeries, PooledFitAndBreakdown) {
  std::vector<SpeedSeries> pred = {oracle::to_series({1, 2, 3}, "a"), oracle::to_series({4, 5}, "b")};
  std::vector<SpeedSeries> gt = {oracle::to_series({3, 6, 9}, "a"), oracle::to_series({12, 15}, "b")};
  const auto row = evaluate_series(pred, gt);
  EXPECT_DOUBLE_EQ(row.fit.k, 3.0);
  EXPECT_NEAR(row.rmse_pooled, 0.0, 1e-12);
  ASSERT_EQ(row.rmse_per_recording.size(), 2u);
  EXPECT_EQ(row.rmse_per_recording[1].first, "b");
}

TEST(EvaluateSeries, FitIdsRestrictTheFit) {
  std::vector<SpeedSeries> pred = {oracle::to_series({1, 1}, "a"), oracle::to_series({1, 1}, "b")};
  std::vector<SpeedSeries> gt = {oracle::to_series({2, 2}, "a"), oracle::to_series({4, 4}, "b")};
  EvaluationOptions opts;
  opts.fit_ids = {"a"};
  const auto row = evaluate_series(pred, gt, opts);
  EXPECT_DOUBLE_EQ(row.fit.k, 2.0);
  EXPECT_DOUBLE_EQ(row.rmse_per_recording[0].second, 0.0);
  EXPECT_DOUBLE_EQ(row.rmse_per_recording[1].second, 2.0);
  opts.fit_ids = {"zzz"};
  EXPECT_THROW(evaluate_series(pred, gt, opts), Error);
}

TEST(FitMethodNames, RoundTrip) {
  EXPECT_EQ(parse_fit_method("lsq"), FitMethod::kLeastSquares);
  EXPECT_EQ(parse_fit_method("median"), FitMethod::kMedianRatio);
  EXPECT_EQ(to_string(FitMethod::kMedianRatio), "median");
  EXPECT_FALSE(parse_fit_method("mean"));
}

}  // namespace
}  // namespace egospeed
