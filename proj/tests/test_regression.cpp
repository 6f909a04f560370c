//------------------------------------------------------------------------------
//
//   Copyright 2026 The science-index Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "science_index/regression.hpp"
#include "test_support.hpp"

using namespace science_index;
using namespace science_index::testing;

namespace {

// Independent least-squares route: Householder QR on the design matrix.
std::vector<double> qr_least_squares(const std::vector<FeatureVector>& data) {
  const Eigen::Index d = data.front().share_count ? 5 : 4;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), d);
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto& fv = data[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = fv.career_length;
    x(i, 2) = fv.paper_count;
    x(i, 3) = fv.citation_count;
    if (d == 5) x(i, 4) = fv.share_sq();
    y(i) = fv.actual_h;
  }
  const Eigen::VectorXd w = x.householderQr().solve(y);
  return {w.data(), w.data() + w.size()};
}

FeatureVector point(double a1, double a2, double a3, double h) { return FeatureVector{a1, a2, a3, std::nullopt, h}; }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(FitBatch, RecoversPublishedCoefficientsFromNoiselessData) {
  const auto data = linear_dataset(100, 42);
  const ModelState m = fit_batch(ModelConfig{}, data);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(m.weights[i], kPaperWeights[i], 1e-6) << "w" << i;
}

TEST(FitBatch, AgreesWithQrOnNoisyData) {
  const auto data = linear_dataset(500, 3, 2.0);
  const ModelState m = fit_batch(ModelConfig{FeatureSet::Base, 0.0}, data);
  const auto qr = qr_least_squares(data);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(relative_error(m.weights[i], qr[i]), 1e-8) << "w" << i;
}

TEST(FitBatch, AugmentedAgreesWithQr) {
  const auto data = linear_dataset(400, 5, 1.0, true);
  const ModelState m = fit_batch(ModelConfig{FeatureSet::Augmented, 0.0}, data);
  ASSERT_EQ(m.weights.size(), 5u);
  const auto qr = qr_least_squares(data);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_LT(relative_error(m.weights[i], qr[i]), 1e-8) << "w" << i;
}

TEST(FitBatch, ExactInterpolationOfDeterminedSystem) {
  const std::vector<FeatureVector> data{point(0, 0, 0, 2), point(1, 0, 0, 3), point(0, 1, 0, 5),
                                        point(0, 0, 1, 7)};
  const ModelState m = fit_batch(ModelConfig{FeatureSet::Base, 0.0}, data);
  for (const auto& fv : data) EXPECT_NEAR(predict(m, fv), fv.actual_h, 1e-12);
}

TEST(FitBatch, NoiselessResidualsVanishWithoutRidge) {
  const auto data = linear_dataset(300, 9);
  const ModelState m = fit_batch(ModelConfig{FeatureSet::Base, 0.0}, data);
  for (const auto& fv : data) ASSERT_LE(std::abs(predict(m, fv) - fv.actual_h), 1e-9);
}

TEST(FitBatch, TooFewRowsIsInsufficientData) {
  const std::vector<FeatureVector> rows(3, point(5, 10, 100, 3));
  EXPECT_EQ(code_of([&] { fit_batch(ModelConfig{}, rows); }), ErrorCode::InsufficientData);
}

TEST(FitBatch, RankDeficientWithoutRidgeIsSingular) {
  const std::vector<FeatureVector> rows(10, point(5, 10, 100, 3));
  EXPECT_EQ(code_of([&] { fit_batch(ModelConfig{FeatureSet::Base, 0.0}, rows); }), ErrorCode::SingularSystem);
}

TEST(FitBatch, DeltaStatsCoverEveryPointUnderFinalWeights) {
  const auto data = linear_dataset(200, 17, 1.5);
  const ModelState m = fit_batch(ModelConfig{}, data);
  std::vector<double> deltas;
  for (const auto& fv : data) deltas.push_back(raw_delta(m, fv));
  const auto oracle = two_pass(deltas);
  const auto [mean, std] = delta_statistics(m);
  EXPECT_EQ(m.delta_stats.count, data.size());
  EXPECT_NEAR(mean, oracle.mean, 1e-10);
  EXPECT_NEAR(std, oracle.std, 1e-10);
}

TEST(UpdateOnline, AccumulatesSameStatisticsAsBatch) {
  auto data = linear_dataset(50, 21, 1.0);
  const FeatureVector extra = point(12, 40, 800, 9);
  const ModelState streamed = update_online(fit_batch(ModelConfig{}, data), extra);
  data.push_back(extra);
  const ModelState batch = fit_batch(ModelConfig{}, data);
  EXPECT_EQ(streamed.stats, batch.stats);
  EXPECT_EQ(streamed.version, 1u);
}

TEST(UpdateOnline, StreamMatchesBatchFit) {
  const auto data = linear_dataset(1000, 23, 2.0);
  ModelState m = fit_batch(ModelConfig{}, std::span(data).first(4));
  for (std::size_t i = 4; i < data.size(); ++i) m = update_online(m, data[i]);
  const ModelState batch = fit_batch(ModelConfig{}, data);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(relative_error(m.weights[i], batch.weights[i]), 1e-8);
  EXPECT_EQ(m.version, 996u);
}

TEST(UpdateOnline, ZeroPointOnlyTouchesIntercept) {
  const ModelState before = fit_batch(ModelConfig{}, linear_dataset(20, 29, 1.0));
  const ModelState after = update_online(before, point(0, 0, 0, 0));
  EXPECT_EQ(after.stats.count(), before.stats.count() + 1);
  EXPECT_EQ(after.stats.xtx(0, 0), before.stats.xtx(0, 0) + 1.0);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(after.stats.xty(r), before.stats.xty(r));
    for (std::size_t c = 0; c < 4; ++c) {
      if (r == 0 && c == 0) continue;
      EXPECT_EQ(after.stats.xtx(r, c), before.stats.xtx(r, c));
    }
  }
}

TEST(UpdateOnline, StreamingDeltaMatchesTwoPassOverRecordedDeltas) {
  const auto data = linear_dataset(600, 31, 2.5);
  ModelState m = fit_batch(ModelConfig{}, std::span(data).first(10));
  std::vector<double> recorded;
  for (std::size_t i = 0; i < 10; ++i) recorded.push_back(raw_delta(m, data[i]));
  for (std::size_t i = 10; i < data.size(); ++i) {
    m = update_online(m, data[i]);
    recorded.push_back(raw_delta(m, data[i]));  // under the post-update weights
  }
  const auto oracle = two_pass(recorded);
  const auto [mean, std] = delta_statistics(m);
  EXPECT_NEAR(mean, oracle.mean, 1e-10);
  EXPECT_NEAR(std, oracle.std, 1e-10);
}

TEST(UpdateOnline, PermutationInvariantStatistics) {
  auto data = linear_dataset(1000, 37, 1.0);
  SufficientStats a(4);
  SufficientStats b(4);
  for (const auto& fv : data) a.add(std::vector<double>{1, fv.career_length, fv.paper_count, fv.citation_count}, fv.actual_h);
  std::mt19937_64 rng(5);
  std::shuffle(data.begin(), data.end(), rng);
  for (const auto& fv : data) b.add(std::vector<double>{1, fv.career_length, fv.paper_count, fv.citation_count}, fv.actual_h);
  EXPECT_EQ(a.count(), b.count());
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_LE(relative_error(a.xty(r), b.xty(r)), 1e-12);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_LE(relative_error(a.xtx(r, c), b.xtx(r, c)), 1e-12);
  }
}

TEST(UpdateOnline, PinnedPresetKeepsWeightsButCountsObservations) {
  const ModelState preset = paper_preset(0.0, 1.0);
  const ModelState next = update_online(preset, point(10, 20, 300, 6));
  EXPECT_EQ(next.weights, preset.weights);
  EXPECT_EQ(next.delta_stats, preset.delta_stats);
  EXPECT_EQ(next.stats.count(), 1u);
  EXPECT_EQ(next.version, 1u);
}

TEST(UpdateOnline, RejectsMismatchedFeatureSet) {
  const ModelState m = fit_batch(ModelConfig{}, linear_dataset(20, 1, 1.0));
  FeatureVector augmented = point(1, 2, 3, 1);
  augmented.share_count = 2;
  EXPECT_EQ(code_of([&] { update_online(m, augmented); }), ErrorCode::DimensionMismatch);
}

TEST(Predict, PublishedEquation) {
  const ModelState m = paper_preset();
  EXPECT_EQ(predict(m, point(0, 0, 0, 0)), 1.71933);
  EXPECT_NEAR(predict(m, point(20, 50, 1000, 0)), 11.57323, 1e-9);
  EXPECT_NEAR(predict(m, point(1, 0, 0, 0)), 1.78835, 1e-12);
}

TEST(Predict, DimensionMismatch) {
  FeatureVector fv = point(1, 1, 1, 1);
  fv.share_count = 3;
  EXPECT_EQ(code_of([&] { predict(paper_preset(), fv); }), ErrorCode::DimensionMismatch);
}

TEST(DeltaStatistics, SmallStreams) {
  RunningDeltaStats s;
  s.push(4.0);
  EXPECT_EQ(s.stddev(), 0.0);
  RunningDeltaStats t;
  for (double x : {1.0, 2.0, 3.0}) t.push(x);
  EXPECT_DOUBLE_EQ(t.mean, 2.0);
  EXPECT_NEAR(t.stddev(), std::sqrt(2.0 / 3.0), 1e-15);
  RunningDeltaStats u;
  for (int i = 0; i < 100; ++i) u.push(0.1);
  EXPECT_NEAR(u.stddev(), 0.0, 1e-15);
}

TEST(DeltaStatistics, WelfordMatchesTwoPassOnRandomStreams) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> dist(3.0, 7.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(1 + rng() % 2000);
    RunningDeltaStats s;
    for (auto& x : xs) {
      x = dist(rng);
      s.push(x);
    }
    const auto oracle = two_pass(xs);
    ASSERT_NEAR(s.mean, oracle.mean, 1e-10);
    ASSERT_NEAR(s.stddev(), oracle.std, 1e-10);
  }
}

TEST(DeltaStatistics, NoObservations) {
  ModelState m = paper_preset();
  m.delta_stats = {};
  EXPECT_EQ(code_of([&] { delta_statistics(m); }), ErrorCode::NoObservations);
}

TEST(Canonical, RoundTripIsExactAndByteStable) {
  ModelState m = fit_batch(ModelConfig{}, linear_dataset(300, 41, 2.0));
  for (int i = 0; i < 5; ++i) m = update_online(m, point(i, 10 * i, 100 * i, i));
  const std::string text = to_canonical(m);
  const ModelState back = model_from_canonical(text);
  EXPECT_EQ(back, m);
  EXPECT_EQ(to_canonical(back), text);
  EXPECT_EQ(text.find('\n'), std::string::npos);
}

TEST(Validate, AcceptsFitsAndPresetRejectsTampering) {
  ModelState m = fit_batch(ModelConfig{}, linear_dataset(100, 43, 1.0));
  EXPECT_NO_THROW(validate(m));
  EXPECT_NO_THROW(validate(paper_preset()));
  ModelState bad = m;
  bad.weights[1] += 0.5;
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::MalformedModel);
  bad = m;
  bad.weights.pop_back();
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::MalformedModel);
  EXPECT_EQ(code_of([] { model_from_canonical("{\"feature_set\":\"base\"}"); }), ErrorCode::MalformedModel);
}
