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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "science_index/bibliometrics.hpp"
#include "science_index/error.hpp"
#include "science_index/regression.hpp"

namespace science_index {

/// Seeded sampler whose output depends only on the seed. The engine is
/// std::mt19937_64 (fully specified by the standard); the transforms are
/// written out here because the <random> distributions are not portable.
class SeededSampler {
 public:
  explicit SeededSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    return lo + static_cast<std::uint64_t>(uniform() * static_cast<double>(span)) % span;
  }

  /// Standard normal (Box-Muller, both halves used).
  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Poisson by multiplication of uniforms; fine for small means.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Generator parameters for a synthetic cohort.
struct PopulationSpec {
  std::uint64_t size = 1000;
  std::uint64_t career_min = 5;
  std::uint64_t career_max = 35;
  double paper_rate = 2.5;       // papers per career year
  double citation_rate = 12.0;   // citations per paper
  double rate_noise_sigma = 0.3;  // log-normal multiplicative noise
  double resource_scale = 1.0;   // multiplies every covariate, hence h
  double delta_noise_std = 1.5;  // Gaussian noise on h around the model
  double mean_share_count = 0.0;  // Poisson mean of data shares
  std::uint64_t seed = 1;
  std::string id_prefix = "author";

  bool operator==(const PopulationSpec&) const = default;
};

inline PopulationSpec population_spec_from_json(const nlohmann::json& j, PopulationSpec base = {}) {
  auto count = [&j](const char* key, std::uint64_t fallback) {
    return j.contains(key) ? json_count(j.at(key), key) : fallback;
  };
  try {
    base.size = count("size", base.size);
    base.career_min = count("career_min", base.career_min);
    base.career_max = count("career_max", base.career_max);
    base.paper_rate = j.value("paper_rate", base.paper_rate);
    base.citation_rate = j.value("citation_rate", base.citation_rate);
    base.rate_noise_sigma = j.value("rate_noise_sigma", base.rate_noise_sigma);
    base.resource_scale = j.value("resource_scale", base.resource_scale);
    base.delta_noise_std = j.value("delta_noise_std", base.delta_noise_std);
    base.mean_share_count = j.value("mean_share_count", base.mean_share_count);
    base.seed = count("seed", base.seed);
    base.id_prefix = j.value("id_prefix", base.id_prefix);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("population spec: ") + e.what());
  }
  return base;
}

inline void validate(const PopulationSpec& spec) {
  if (spec.size == 0) throw Error(ErrorCode::InvalidArgument, "population size must be > 0");
  if (!(spec.resource_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "resource_scale must be > 0");
  if (spec.career_min > spec.career_max) throw Error(ErrorCode::InvalidArgument, "career_min > career_max");
  if (spec.paper_rate < 0.0 || spec.citation_rate < 0.0 || spec.delta_noise_std < 0.0 ||
      spec.rate_noise_sigma < 0.0 || spec.mean_share_count < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "population rates and noise levels must be >= 0");
  }
}

/// Careers drawn from the population spec: career length uniform, papers and
/// citations proportional to it with log-normal noise, all scaled by
/// resource_scale; the h-index is the published model's prediction on the
/// scaled covariates plus Gaussian noise, rounded and clamped to
/// [0, publication_count].
inline std::vector<CareerStats> generate_population(const PopulationSpec& spec) {
  validate(spec);
  SeededSampler rng(spec.seed);
  const ModelState truth = paper_preset();
  std::vector<CareerStats> out;
  out.reserve(spec.size);
  for (std::uint64_t i = 0; i < spec.size; ++i) {
    const double career = static_cast<double>(rng.uniform_int(spec.career_min, spec.career_max));
    const double papers = spec.paper_rate * std::max(career, 1.0) * std::exp(spec.rate_noise_sigma * rng.normal());
    const double cites = spec.citation_rate * papers * std::exp(spec.rate_noise_sigma * rng.normal());
    const double noise = spec.delta_noise_std * rng.normal();
    const std::uint64_t shares = rng.poisson(spec.mean_share_count);

    CareerStats s;
    s.author_id = spec.id_prefix + "-" + std::to_string(i);
    s.career_length = static_cast<Count>(std::llround(career * spec.resource_scale));
    s.publication_count = static_cast<Count>(std::llround(papers * spec.resource_scale));
    s.citation_count = static_cast<Count>(std::llround(cites * spec.resource_scale));
    const double expected_h = predict(truth, FeatureVector::from_stats(s, FeatureSet::Base));
    const double h = std::clamp(std::round(expected_h + noise), 0.0, static_cast<double>(s.publication_count));
    s.h_index = static_cast<Count>(h);
    s.data_share_count = shares;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace science_index
