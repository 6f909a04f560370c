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

#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "science_index/evaluation.hpp"
#include "test_support.hpp"

using namespace science_index;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

PopulationSpec cohort(double resource_scale, std::uint64_t seed, std::uint64_t size = 1000) {
  PopulationSpec spec;
  spec.size = size;
  spec.resource_scale = resource_scale;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(Density, ConstantValues) {
  const std::vector<double> fives(1000, 5.0);
  const auto d = export_density(fives, 10, "fives");
  EXPECT_NEAR(density_integral(d), 1.0, 1e-12);
  int occupied = 0;
  for (double v : d.bin_densities) occupied += v > 0.0;
  EXPECT_EQ(occupied, 1);
  EXPECT_EQ(d.bin_edges.front(), 4.5);
  EXPECT_EQ(d.bin_edges.back(), 5.5);
}

TEST(Density, UniformSamplesAreFlat) {
  SeededSampler rng(99);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = rng.uniform(0.0, 10.0);
  const auto d = export_density(xs, 10);
  ASSERT_EQ(d.bin_densities.size(), 10u);
  for (double v : d.bin_densities) EXPECT_NEAR(v, 0.1, 0.02);
  EXPECT_NEAR(density_integral(d), 1.0, 1e-9);
}

TEST(Density, CountsMatchBruteForce) {
  SeededSampler rng(5);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = rng.normal(3.0, 2.0);
  const auto d = export_density(xs, 17);
  for (std::size_t b = 0; b < 17; ++b) {
    std::size_t count = 0;
    for (double x : xs) {
      const bool last = b == 16;
      if (x >= d.bin_edges[b] && (x < d.bin_edges[b + 1] || (last && x <= d.bin_edges[b + 1]))) ++count;
    }
    const double width = d.bin_edges[b + 1] - d.bin_edges[b];
    EXPECT_NEAR(d.bin_densities[b], static_cast<double>(count) / (5000.0 * width), 1e-12) << b;
  }
}

TEST(Density, Preconditions) {
  const std::vector<double> xs{1.0, 2.0};
  EXPECT_EQ(code_of([&] { export_density(xs, 1); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([&] { export_density(std::vector<double>{}, 5); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([&] { export_density(std::vector<double>{1.0, std::nan("")}, 5); }), ErrorCode::InvalidArgument);
}

TEST(Density, CsvLayout) {
  const auto d = export_density(std::vector<double>{0.0, 1.0, 1.0, 2.0}, 2);
  std::ostringstream out;
  write_density_csv(out, d);
  EXPECT_EQ(out.str(), "bin_left,bin_right,density\n0,1,0.25\n1,2,0.75\n");
}

TEST(ShareShift, ZeroWeightIsExactlyZero) {
  PopulationSpec spec = cohort(1.0, 3, 500);
  spec.mean_share_count = 6.6;
  const auto pop = generate_population(spec);
  const auto r = run_share_shift_experiment(pop, paper_preset(0.0, 1.5), 0.0);
  EXPECT_EQ(r.mean_shift, 0.0);
  for (double s : r.per_author_shifts) EXPECT_EQ(s, 0.0);
}

TEST(ShareShift, CalibratedWeightReproducesTarget) {
  PopulationSpec spec = cohort(1.0, 4, 3000);
  spec.mean_share_count = 6.6;
  const auto pop = generate_population(spec);
  const ModelState model = paper_preset(0.0, 1.5);
  const double w = calibrate_share_weight(model, pop, 0.27);
  const auto r = run_share_shift_experiment(pop, model, w);
  EXPECT_NEAR(r.mean_shift, 0.27, 1e-3);
  EXPECT_EQ(r.per_author_shifts.size(), pop.size());
  for (double s : r.per_author_shifts) EXPECT_GE(s, 0.0);
  // Authors without shares do not move.
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].data_share_count == 0) {
      EXPECT_EQ(r.per_author_shifts[i], 0.0);
    }
  }
}

TEST(ShareShift, EmptyPopulation) {
  EXPECT_EQ(code_of([] { run_share_shift_experiment({}, paper_preset(), 0.1); }), ErrorCode::NoObservations);
}

TEST(NorthSouth, GapClosesUnderPooledModel) {
  const auto r = run_north_south_experiment(cohort(1.0, 1), cohort(0.7, 2), ModelConfig{});
  EXPECT_GE(r.h_gap, 2.0);
  EXPECT_LT(std::abs(r.phi_gap), 0.25);
  EXPECT_LT(r.gap_ratio, 0.15);
  EXPECT_NEAR(density_integral(r.north.h_density), 1.0, 1e-9);
  EXPECT_NEAR(density_integral(r.south.phi_density), 1.0, 1e-9);
  EXPECT_EQ(r.weights.size(), 4u);
}

TEST(NorthSouth, SymmetricCohorts) {
  const auto r = run_north_south_experiment(cohort(1.0, 1), cohort(1.0, 2), ModelConfig{});
  EXPECT_LT(std::abs(r.h_gap), 0.5);
  EXPECT_LT(std::abs(r.phi_gap), 0.15);
}

TEST(NorthSouth, Deterministic) {
  const auto a = run_north_south_experiment(cohort(1.0, 8), cohort(0.7, 9), ModelConfig{}, 12);
  const auto b = run_north_south_experiment(cohort(1.0, 8), cohort(0.7, 9), ModelConfig{}, 12);
  EXPECT_EQ(to_canonical(a), to_canonical(b));
  EXPECT_NE(to_canonical(a), to_canonical(run_north_south_experiment(cohort(1.0, 8), cohort(0.7, 10), ModelConfig{}, 12)));
}

TEST(Synthetic, PureFunctionOfSpec) {
  EXPECT_EQ(generate_population(cohort(0.8, 77, 300)), generate_population(cohort(0.8, 77, 300)));
  EXPECT_NE(generate_population(cohort(0.8, 77, 300)), generate_population(cohort(0.8, 78, 300)));
}

TEST(Synthetic, HIndexWithinBounds) {
  PopulationSpec spec = cohort(0.5, 6, 2000);
  spec.delta_noise_std = 6.0;
  for (const auto& s : generate_population(spec)) EXPECT_LE(s.h_index, s.publication_count);
}

TEST(Synthetic, SpecValidationAndJson) {
  EXPECT_EQ(code_of([] { generate_population(cohort(0.0, 1)); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { generate_population(cohort(1.0, 1, 0)); }), ErrorCode::InvalidArgument);
  const auto spec = population_spec_from_json(nlohmann::json::parse(R"({"size": 10, "resource_scale": 0.7})"));
  EXPECT_EQ(spec.size, 10u);
  EXPECT_EQ(spec.resource_scale, 0.7);
  EXPECT_EQ(spec.seed, 1u);
  EXPECT_EQ(code_of([] { population_spec_from_json(nlohmann::json::parse(R"({"size": -5})")); }),
            ErrorCode::InvalidArgument);
}
