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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "science_index/bibliometrics.hpp"
#include "science_index/canonical.hpp"
#include "science_index/error.hpp"
#include "science_index/numerics.hpp"
#include "science_index/outlier_scaling.hpp"

namespace science_index {

enum class FeatureSet { Base, Augmented };

constexpr std::string_view to_string(FeatureSet fs) noexcept {
  return fs == FeatureSet::Base ? "base" : "augmented";
}

inline FeatureSet feature_set_from_string(std::string_view name) {
  if (name == "base") return FeatureSet::Base;
  if (name == "augmented") return FeatureSet::Augmented;
  throw Error(ErrorCode::InvalidArgument, "unknown feature set '" + std::string(name) + "'");
}

/// Number of weights including the intercept.
constexpr std::size_t dimension(FeatureSet fs) noexcept { return fs == FeatureSet::Base ? 4 : 5; }

struct ModelConfig {
  FeatureSet feature_set = FeatureSet::Base;
  double ridge_lambda = 1e-9;

  bool operator==(const ModelConfig&) const = default;
};

/// Model inputs for one researcher. `share_count` is set only for the
/// augmented feature set; the regressor uses its square.
struct FeatureVector {
  double career_length = 0.0;
  double paper_count = 0.0;
  double citation_count = 0.0;
  std::optional<Count> share_count;
  double actual_h = 0.0;

  FeatureSet feature_set() const { return share_count ? FeatureSet::Augmented : FeatureSet::Base; }

  double share_sq() const {
    const double s = share_count ? static_cast<double>(*share_count) : 0.0;
    return s * s;
  }

  static FeatureVector from_stats(const CareerStats& stats, FeatureSet fs) {
    FeatureVector fv;
    fv.career_length = static_cast<double>(stats.career_length);
    fv.paper_count = static_cast<double>(stats.publication_count);
    fv.citation_count = static_cast<double>(stats.citation_count);
    if (fs == FeatureSet::Augmented) fv.share_count = stats.data_share_count;
    fv.actual_h = static_cast<double>(stats.h_index);
    return fv;
  }

  bool operator==(const FeatureVector&) const = default;
};

namespace detail {

inline void check_features(const FeatureVector& fv) {
  for (double v : {fv.career_length, fv.paper_count, fv.citation_count, fv.actual_h}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "feature values must be finite and non-negative");
    }
  }
}

inline std::vector<double> design_row(const FeatureVector& fv) {
  std::vector<double> row{1.0, fv.career_length, fv.paper_count, fv.citation_count};
  if (fv.share_count) row.push_back(fv.share_sq());
  return row;
}

}  // namespace detail

/// Accumulated X'X and X'y, upper triangle only, with compensated sums.
class SufficientStats {
 public:
  SufficientStats() = default;
  explicit SufficientStats(std::size_t dim)
      : dim_(dim), xtx_(dim * (dim + 1) / 2), xty_(dim) {}

  std::size_t dimension() const { return dim_; }
  std::uint64_t count() const { return n_; }

  void add(std::span<const double> row, double target) {
    if (row.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "design row has wrong length");
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = r; c < dim_; ++c) xtx_[index(r, c)].add(row[r] * row[c]);
      xty_[r].add(row[r] * target);
    }
    ++n_;
  }

  double xtx(std::size_t r, std::size_t c) const {
    return xtx_[r <= c ? index(r, c) : index(c, r)].value();
  }
  double xty(std::size_t r) const { return xty_[r].value(); }

  SquareMatrix matrix() const {
    SquareMatrix m(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) m(r, c) = xtx(r, c);
    return m;
  }

  std::vector<double> rhs() const {
    std::vector<double> b(dim_);
    for (std::size_t r = 0; r < dim_; ++r) b[r] = xty(r);
    return b;
  }

  // Raw accumulator access for canonical serialization.
  std::span<const CompensatedSum<>> xtx_terms() const { return xtx_; }
  std::span<const CompensatedSum<>> xty_terms() const { return xty_; }

  static SufficientStats from_terms(std::size_t dim, std::uint64_t n, std::vector<CompensatedSum<>> xtx,
                                    std::vector<CompensatedSum<>> xty) {
    if (xtx.size() != dim * (dim + 1) / 2 || xty.size() != dim) {
      throw Error(ErrorCode::MalformedModel, "sufficient statistics have inconsistent sizes");
    }
    SufficientStats s;
    s.dim_ = dim;
    s.n_ = n;
    s.xtx_ = std::move(xtx);
    s.xty_ = std::move(xty);
    return s;
  }

  bool operator==(const SufficientStats&) const = default;

 private:
  std::size_t index(std::size_t r, std::size_t c) const { return r * dim_ - r * (r - 1) / 2 + (c - r); }

  std::size_t dim_ = 0;
  std::uint64_t n_ = 0;
  std::vector<CompensatedSum<>> xtx_;
  std::vector<CompensatedSum<>> xty_;
};

/// Which parts of the model stay fixed under online updates. A pinned model
/// still accumulates sufficient statistics and bumps its version.
struct UpdatePolicy {
  bool pin_weights = false;
  bool pin_delta_stats = false;

  bool operator==(const UpdatePolicy&) const = default;
};

struct ModelState {
  ModelConfig config;
  std::vector<double> weights;
  SufficientStats stats;
  RunningDeltaStats delta_stats;
  std::uint64_t version = 0;
  UpdatePolicy policy;

  bool operator==(const ModelState&) const = default;
};

/// Coefficients of the published model fit (intercept, career length,
/// paper count, citation count).
inline constexpr std::array<double, 4> kPaperWeights{1.71933, 0.06902, 0.10867, 0.00304};

inline std::vector<double> solve_weights(const ModelConfig& config, const SufficientStats& stats) {
  SquareMatrix a = stats.matrix();
  for (std::size_t i = 1; i < a.size(); ++i) a(i, i) += config.ridge_lambda;
  return cholesky_solve(a, stats.rhs());
}

inline double predict(const ModelState& state, const FeatureVector& features) {
  if (features.feature_set() != state.config.feature_set ||
      state.weights.size() != dimension(state.config.feature_set)) {
    throw Error(ErrorCode::DimensionMismatch,
                "features are " + std::string(to_string(features.feature_set())) + " but model is " +
                    std::string(to_string(state.config.feature_set)));
  }
  const auto row = detail::design_row(features);
  double beta = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) beta += state.weights[i] * row[i];
  return beta;
}

/// Gap between observed and (outlier-scaled) predicted h-index.
inline double raw_delta(const ModelState& state, const FeatureVector& features,
                        const OutlierScaling& scaling = {}) {
  return features.actual_h - scale_beta(predict(state, features), scaling);
}

inline ModelState fit_batch(const ModelConfig& config, std::span<const FeatureVector> data) {
  if (!(config.ridge_lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge_lambda must be >= 0");
  const std::size_t dim = dimension(config.feature_set);
  if (data.size() < dim) {
    throw Error(ErrorCode::InsufficientData, "need at least " + std::to_string(dim) + " rows, got " +
                                                 std::to_string(data.size()));
  }

  ModelState state;
  state.config = config;
  state.stats = SufficientStats(dim);
  for (const auto& fv : data) {
    detail::check_features(fv);
    if (fv.feature_set() != config.feature_set) {
      throw Error(ErrorCode::DimensionMismatch, "row feature set differs from model config");
    }
    state.stats.add(detail::design_row(fv), fv.actual_h);
  }
  state.weights = solve_weights(config, state.stats);
  for (const auto& fv : data) state.delta_stats.push(raw_delta(state, fv));
  return state;
}

inline ModelState update_online(const ModelState& state, const FeatureVector& point) {
  detail::check_features(point);
  if (point.feature_set() != state.config.feature_set) {
    throw Error(ErrorCode::DimensionMismatch, "point feature set differs from model config");
  }
  ModelState next = state;
  next.stats.add(detail::design_row(point), point.actual_h);
  if (!next.policy.pin_weights) next.weights = solve_weights(next.config, next.stats);
  if (!next.policy.pin_delta_stats) next.delta_stats.push(raw_delta(next, point));
  ++next.version;
  return next;
}

struct DeltaSummary {
  double mean = 0.0;
  double std = 0.0;
};

inline DeltaSummary delta_statistics(const ModelState& state) {
  if (state.delta_stats.count == 0) throw Error(ErrorCode::NoObservations, "no delta observations recorded");
  return {state.delta_stats.mean, state.delta_stats.stddev()};
}

/// The published base-model coefficients with pinned weights and pinned
/// delta statistics (mean, population std).
inline ModelState paper_preset(double delta_mean = 0.0, double delta_std = 1.0) {
  if (!(delta_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta std must be >= 0");
  ModelState state;
  state.config = ModelConfig{FeatureSet::Base, 1e-9};
  state.weights.assign(kPaperWeights.begin(), kPaperWeights.end());
  state.stats = SufficientStats(dimension(FeatureSet::Base));
  state.delta_stats = RunningDeltaStats{1, delta_mean, delta_std * delta_std};
  state.policy = UpdatePolicy{true, true};
  return state;
}

/// Checks the structural invariants; throws MalformedModel on violation.
inline void validate(const ModelState& state) {
  const std::size_t dim = dimension(state.config.feature_set);
  auto fail = [](const std::string& what) { throw Error(ErrorCode::MalformedModel, what); };
  if (!(state.config.ridge_lambda >= 0.0)) fail("ridge_lambda must be >= 0");
  if (state.weights.size() != dim) fail("weight count does not match feature set");
  if (state.stats.dimension() != dim) fail("statistics dimension does not match feature set");
  for (double w : state.weights)
    if (!std::isfinite(w)) fail("non-finite weight");
  if (state.stats.xtx(0, 0) != static_cast<double>(state.stats.count())) fail("xtx[0][0] differs from n");
  for (std::size_t i = 0; i < dim; ++i)
    if (state.stats.xtx(i, i) < 0.0) fail("negative diagonal in xtx");
  if (!(state.delta_stats.m2 >= 0.0) || !std::isfinite(state.delta_stats.mean)) fail("bad delta statistics");

  if (!state.policy.pin_weights) {
    if (state.stats.count() == 0) fail("unpinned model without observations");
    SquareMatrix a = state.stats.matrix();
    for (std::size_t i = 1; i < dim; ++i) a(i, i) += state.config.ridge_lambda;
    const auto b = state.stats.rhs();
    double a_norm = 0.0;
    double w_norm = 0.0;
    double b_norm = 0.0;
    double residual = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      double row_sum = 0.0;
      double aw = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        row_sum += std::abs(a(r, c));
        aw += a(r, c) * state.weights[c];
      }
      a_norm = std::max(a_norm, row_sum);
      w_norm = std::max(w_norm, std::abs(state.weights[r]));
      b_norm = std::max(b_norm, std::abs(b[r]));
      residual = std::max(residual, std::abs(aw - b[r]));
    }
    if (residual > 1e-9 * (a_norm * w_norm + b_norm)) fail("weights do not solve the normal equations");
  }
}

// Canonical form ----------------------------------------------------------

inline void write_canonical(CanonicalWriter& w, const ModelState& state) {
  auto write_terms = [&w](std::span<const CompensatedSum<>> terms) {
    w.begin_array();
    for (const auto& t : terms) {
      w.begin_array().value(t.sum()).value(t.compensation()).end_array();
    }
    w.end_array();
  };
  w.begin_object();
  w.key("feature_set").value(to_string(state.config.feature_set));
  w.key("ridge_lambda").value(state.config.ridge_lambda);
  w.key("weights").values(state.weights);
  w.key("n").value(std::uint64_t{state.stats.count()});
  w.key("xtx");
  write_terms(state.stats.xtx_terms());
  w.key("xty");
  write_terms(state.stats.xty_terms());
  w.key("delta_count").value(std::uint64_t{state.delta_stats.count});
  w.key("delta_mean").value(state.delta_stats.mean);
  w.key("delta_m2").value(state.delta_stats.m2);
  w.key("version").value(std::uint64_t{state.version});
  w.key("pin_weights").value(state.policy.pin_weights);
  w.key("pin_delta_stats").value(state.policy.pin_delta_stats);
  w.end_object();
}

inline std::string to_canonical(const ModelState& state) {
  CanonicalWriter w;
  write_canonical(w, state);
  return std::move(w).str();
}

inline ModelState model_from_json(const nlohmann::json& j) {
  try {
    ModelState state;
    state.config.feature_set = feature_set_from_string(j.at("feature_set").get<std::string>());
    state.config.ridge_lambda = j.at("ridge_lambda").get<double>();
    state.weights = j.at("weights").get<std::vector<double>>();
    auto read_terms = [](const nlohmann::json& arr) {
      std::vector<CompensatedSum<>> terms;
      for (const auto& pair : arr) terms.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
      return terms;
    };
    const std::size_t dim = dimension(state.config.feature_set);
    state.stats = SufficientStats::from_terms(dim, j.at("n").get<std::uint64_t>(), read_terms(j.at("xtx")),
                                              read_terms(j.at("xty")));
    state.delta_stats.count = j.at("delta_count").get<std::uint64_t>();
    state.delta_stats.mean = j.at("delta_mean").get<double>();
    state.delta_stats.m2 = j.at("delta_m2").get<double>();
    state.version = j.at("version").get<std::uint64_t>();
    state.policy.pin_weights = j.at("pin_weights").get<bool>();
    state.policy.pin_delta_stats = j.at("pin_delta_stats").get<bool>();
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedModel, std::string("model record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedModel) throw;
    throw Error(ErrorCode::MalformedModel, e.what());
  }
}

inline ModelState model_from_canonical(std::string_view text) {
  return model_from_json(parse_canonical(text, "model record"));
}

}  // namespace science_index
