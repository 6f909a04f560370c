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

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "science_index/bibliometrics.hpp"
#include "science_index/ledger.hpp"
#include "science_index/regression.hpp"
#include "science_index/synthetic.hpp"

namespace science_index::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("science_index_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// h-index straight from the definition: max h in [0, n] with at least h
/// entries >= h.
inline Count brute_force_h_index(const std::vector<Count>& citations) {
  Count best = 0;
  for (Count h = 0; h <= citations.size(); ++h) {
    Count at_least = 0;
    for (Count c : citations) at_least += c >= h ? 1 : 0;
    if (at_least >= h) best = h;
  }
  return best;
}

struct TwoPass {
  double mean;
  double std;
};

inline TwoPass two_pass(const std::vector<double>& xs) {
  long double sum = 0;
  for (double x : xs) sum += x;
  const long double mean = sum / xs.size();
  long double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / xs.size()))};
}

/// Well-spread careers with h given exactly by the published coefficients
/// (plus `noise_std` Gaussian noise).
inline std::vector<FeatureVector> linear_dataset(std::size_t n, std::uint64_t seed, double noise_std = 0.0,
                                                 bool augmented = false) {
  SeededSampler rng(seed);
  std::vector<FeatureVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector fv;
    fv.career_length = static_cast<double>(rng.uniform_int(0, 40));
    fv.paper_count = static_cast<double>(rng.uniform_int(1, 300));
    fv.citation_count = static_cast<double>(rng.uniform_int(0, 20000));
    double h = kPaperWeights[0] + kPaperWeights[1] * fv.career_length + kPaperWeights[2] * fv.paper_count +
               kPaperWeights[3] * fv.citation_count;
    if (augmented) {
      fv.share_count = rng.uniform_int(0, 12);
      h += 0.01 * fv.share_sq();
    }
    fv.actual_h = h + (noise_std > 0.0 ? noise_std * rng.normal() : 0.0);
    if (fv.actual_h < 0.0) fv.actual_h = 0.0;
    out.push_back(fv);
  }
  return out;
}

/// Random interleaving of submissions and fulfilments, `transactions`
/// entries long after genesis. Genesis holds a batch fit so every update
/// moves the weights. Researchers repeat, stats come from the generator.
inline LedgerState random_workload(std::size_t transactions, std::uint64_t seed, LedgerConfig config = {}) {
  PopulationSpec spec;
  spec.size = 200;
  spec.mean_share_count = 3.0;
  spec.seed = seed;
  const auto population = generate_population(spec);

  std::vector<FeatureVector> training;
  for (std::size_t i = 0; i < 50; ++i) training.push_back(FeatureVector::from_stats(population[i], FeatureSet::Base));
  LedgerState state = genesis(fit_batch(ModelConfig{}, training), config);

  SeededSampler rng(seed ^ 0x5eedULL);
  for (std::size_t t = 0; t < transactions; ++t) {
    const bool fulfil = !state.pending.empty() && (rng.uniform() < 0.5 || state.pending.size() > 8);
    if (fulfil) {
      auto it = state.pending.begin();
      std::advance(it, static_cast<long>(rng.uniform_int(0, state.pending.size() - 1)));
      const std::uint64_t request_id = it->first;
      const std::string id = it->second.researcher_id;
      CareerStats stats = population[std::stoul(id.substr(1))];
      stats.author_id = id;
      state = apply_fulfillment(std::move(state), OracleFulfillment{request_id, stats}).first;
    } else {
      const std::string id = "r" + std::to_string(50 + rng.uniform_int(0, 149));
      state = submit_request(std::move(state), id).first;
    }
  }
  return state;
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace science_index::testing
