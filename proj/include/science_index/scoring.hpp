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

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "science_index/bibliometrics.hpp"
#include "science_index/canonical.hpp"
#include "science_index/error.hpp"
#include "science_index/outlier_scaling.hpp"
#include "science_index/regression.hpp"

namespace science_index {

/// Literal: share^2 enters only as a regression covariate (augmented models).
/// ShareBonus: base-model gap plus `share_weight * share^2`.
enum class ScoreMode { Literal, ShareBonus };

constexpr std::string_view to_string(ScoreMode mode) noexcept {
  return mode == ScoreMode::Literal ? "literal" : "share-bonus";
}

inline ScoreMode score_mode_from_string(std::string_view name) {
  if (name == "literal") return ScoreMode::Literal;
  if (name == "share-bonus") return ScoreMode::ShareBonus;
  throw Error(ErrorCode::InvalidArgument, "unknown score mode '" + std::string(name) + "'");
}

inline constexpr double kPhiScale = 10.0;

struct ScoreBreakdown {
  double beta_raw = 0.0;
  double beta_scaled = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double phi = 0.0;
  std::uint64_t model_version = 0;

  bool operator==(const ScoreBreakdown&) const = default;
};

/// z-score of `delta`; a population without spread maps everyone to 0.
inline double compute_epsilon(double delta, double mean, double std) {
  if (!(std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "std must be >= 0");
  if (std == 0.0) return 0.0;
  return (delta - mean) / std;
}

/// 10 / (1 + e^-epsilon), evaluated so that phi(e) + phi(-e) == 10 up to one
/// rounding and the result stays inside the open interval (0, 10) even
/// where the logistic saturates in double precision.
inline double compute_phi(double epsilon) {
  if (std::isnan(epsilon)) throw Error(ErrorCode::InvalidArgument, "epsilon must not be NaN");
  const double t = std::exp(-std::abs(epsilon));
  const double lower = kPhiScale * t / (1.0 + t);  // phi(-|epsilon|)
  double phi = epsilon >= 0.0 ? kPhiScale - lower : lower;
  static const double kTop = std::nextafter(kPhiScale, 0.0);
  if (phi >= kPhiScale) phi = kTop;
  if (phi <= 0.0) phi = std::numeric_limits<double>::denorm_min();
  return phi;
}

inline ScoreBreakdown score(const CareerStats& stats, const ModelState& model, ScoreMode mode,
                            double share_weight = 0.0, const OutlierScaling& scaling = {}) {
  const auto [mean, std] = delta_statistics(model);

  FeatureSet features_for = model.config.feature_set;
  double bonus = 0.0;
  if (mode == ScoreMode::ShareBonus) {
    if (model.config.feature_set != FeatureSet::Base) {
      throw Error(ErrorCode::DimensionMismatch, "share-bonus scoring needs a base-feature model");
    }
    if (!(share_weight >= 0.0) || !std::isfinite(share_weight)) {
      throw Error(ErrorCode::InvalidArgument, "share_weight must be finite and >= 0");
    }
    const double shares = static_cast<double>(stats.data_share_count);
    bonus = share_weight * shares * shares;
  }

  const FeatureVector fv = FeatureVector::from_stats(stats, features_for);
  ScoreBreakdown out;
  out.beta_raw = predict(model, fv);
  out.beta_scaled = scale_beta(out.beta_raw, scaling);
  out.delta = fv.actual_h - out.beta_scaled + bonus;
  out.epsilon = compute_epsilon(out.delta, mean, std);
  out.phi = compute_phi(out.epsilon);
  out.model_version = model.version;
  return out;
}

/// Mean over `population` of phi(share_weight) - phi(0) in ShareBonus mode.
inline double mean_share_shift(const ModelState& model, std::span<const CareerStats> population,
                               double share_weight) {
  if (population.empty()) throw Error(ErrorCode::NoObservations, "empty population");
  CompensatedSum<> total;
  for (const auto& stats : population) {
    total.add(score(stats, model, ScoreMode::ShareBonus, share_weight).phi -
              score(stats, model, ScoreMode::ShareBonus, 0.0).phi);
  }
  return total.value() / static_cast<double>(population.size());
}

/// Finds the share weight whose mean phi shift over `population` equals
/// `target_shift` (within 1e-3), by bracketing with doubling then bisection.
inline double calibrate_share_weight(const ModelState& model, std::span<const CareerStats> population,
                                     double target_shift) {
  if (population.empty()) throw Error(ErrorCode::EmptyInput, "population is empty");
  if (!(target_shift > 0.0)) throw Error(ErrorCode::InvalidArgument, "target_shift must be > 0");

  // Shift can never exceed the headroom of the sharers.
  CompensatedSum<> headroom;
  bool any_sharer = false;
  for (const auto& stats : population) {
    if (stats.data_share_count == 0) continue;
    any_sharer = true;
    headroom.add(kPhiScale - score(stats, model, ScoreMode::ShareBonus, 0.0).phi);
  }
  if (!any_sharer) throw Error(ErrorCode::NoSharers, "no member of the population has shared data");
  const double supremum = headroom.value() / static_cast<double>(population.size());
  if (target_shift >= supremum) {
    throw Error(ErrorCode::Unreachable, "target shift " + std::to_string(target_shift) +
                                            " is at or above the saturation bound " +
                                            std::to_string(supremum));
  }

  auto shift = [&](double w) { return mean_share_shift(model, population, w); };

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (shift(hi) < target_shift) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 1100) throw Error(ErrorCode::Unreachable, "shift saturates below target");
  }

  double mid = hi;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double s = shift(mid);
    if (std::abs(s - target_shift) < 1e-9 || mid == lo || mid == hi) break;
    (s < target_shift ? lo : hi) = mid;
  }
  if (std::abs(shift(mid) - target_shift) > 1e-3) {
    throw Error(ErrorCode::Unreachable, "bisection did not reach the target within 1e-3");
  }
  return mid;
}

/// phi rounded to four decimals, the precision used at user-facing outputs.
inline double phi_for_display(double phi) { return std::round(phi * 1e4) / 1e4; }

inline void write_canonical(CanonicalWriter& w, const ScoreBreakdown& s) {
  w.begin_object();
  w.key("beta_raw").value(s.beta_raw);
  w.key("beta_scaled").value(s.beta_scaled);
  w.key("delta").value(s.delta);
  w.key("epsilon").value(s.epsilon);
  w.key("phi").value(s.phi);
  w.key("model_version").value(std::uint64_t{s.model_version});
  w.end_object();
}

inline std::string to_canonical(const ScoreBreakdown& s) {
  CanonicalWriter w;
  write_canonical(w, s);
  return std::move(w).str();
}

inline ScoreBreakdown score_from_json(const nlohmann::json& j) {
  try {
    ScoreBreakdown s;
    s.beta_raw = j.at("beta_raw").get<double>();
    s.beta_scaled = j.at("beta_scaled").get<double>();
    s.delta = j.at("delta").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    s.phi = j.at("phi").get<double>();
    s.model_version = j.at("model_version").get<std::uint64_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedModel, std::string("score record: ") + e.what());
  }
}

}  // namespace science_index
