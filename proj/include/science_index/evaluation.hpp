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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "science_index/bibliometrics.hpp"
#include "science_index/canonical.hpp"
#include "science_index/error.hpp"
#include "science_index/numerics.hpp"
#include "science_index/regression.hpp"
#include "science_index/scoring.hpp"
#include "science_index/synthetic.hpp"

namespace science_index {

/// Normalized histogram: sum(density * width) == 1.
struct DensitySeries {
  std::string label;
  std::vector<double> values;
  std::vector<double> bin_edges;
  std::vector<double> bin_densities;

  bool operator==(const DensitySeries&) const = default;
};

/// Histogram over [min, max] with `bins` equal-width bins; the last bin is
/// closed on the right. A degenerate range is widened to [v - 0.5, v + 0.5].
inline DensitySeries export_density(std::span<const double> scores, std::size_t bins, std::string label = {}) {
  if (scores.empty()) throw Error(ErrorCode::EmptyInput, "no scores to bin");
  if (bins < 2) throw Error(ErrorCode::EmptyInput, "need at least 2 bins");
  for (double v : scores)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "scores must be finite");

  auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }

  DensitySeries out;
  out.label = std::move(label);
  out.values.assign(scores.begin(), scores.end());
  out.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) out.bin_edges[i] = lo + width * static_cast<double>(i);
  out.bin_edges.back() = hi;

  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : scores) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++counts[idx];
  }
  out.bin_densities.resize(bins);
  const double n = static_cast<double>(scores.size());
  for (std::size_t i = 0; i < bins; ++i) {
    const double w = out.bin_edges[i + 1] - out.bin_edges[i];
    out.bin_densities[i] = static_cast<double>(counts[i]) / (n * w);
  }
  return out;
}

inline double density_integral(const DensitySeries& d) {
  CompensatedSum<> total;
  for (std::size_t i = 0; i < d.bin_densities.size(); ++i) {
    total.add(d.bin_densities[i] * (d.bin_edges[i + 1] - d.bin_edges[i]));
  }
  return total.value();
}

/// CSV with columns bin_left, bin_right, density.
inline void write_density_csv(std::ostream& out, const DensitySeries& d) {
  out << "bin_left,bin_right,density\n";
  for (std::size_t i = 0; i < d.bin_densities.size(); ++i) {
    out << CanonicalWriter::format_double(d.bin_edges[i]) << ',' << CanonicalWriter::format_double(d.bin_edges[i + 1])
        << ',' << CanonicalWriter::format_double(d.bin_densities[i]) << '\n';
  }
}

inline void write_canonical(CanonicalWriter& w, const DensitySeries& d) {
  w.begin_object();
  w.key("label").value(d.label);
  w.key("bin_edges").values(d.bin_edges);
  w.key("bin_densities").values(d.bin_densities);
  w.end_object();
}

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::NoObservations, "mean of an empty list");
  CompensatedSum<> total;
  for (double x : xs) total.add(x);
  return total.value() / static_cast<double>(xs.size());
}

// Share shift ---------------------------------------------------------------

struct ShareShiftResult {
  double mean_shift = 0.0;
  std::vector<double> per_author_shifts;
};

/// phi with shares minus phi with shares zeroed, per author, in ShareBonus
/// mode.
inline ShareShiftResult run_share_shift_experiment(std::span<const CareerStats> population, const ModelState& model,
                                                   double share_weight) {
  if (population.empty()) throw Error(ErrorCode::NoObservations, "empty population");
  ShareShiftResult out;
  out.per_author_shifts.reserve(population.size());
  for (const auto& stats : population) {
    CareerStats without = stats;
    without.data_share_count = 0;
    const double with_phi = score(stats, model, ScoreMode::ShareBonus, share_weight).phi;
    const double without_phi = score(without, model, ScoreMode::ShareBonus, share_weight).phi;
    out.per_author_shifts.push_back(with_phi - without_phi);
  }
  out.mean_shift = mean_of(out.per_author_shifts);
  return out;
}

// North / south -------------------------------------------------------------

struct GroupSummary {
  double mean_h = 0.0;
  double mean_phi = 0.0;
  DensitySeries h_density;
  DensitySeries phi_density;
};

struct NorthSouthReport {
  GroupSummary north;
  GroupSummary south;
  std::vector<double> weights;
  double h_gap = 0.0;    // north - south
  double phi_gap = 0.0;  // north - south
  /// |phi gap| / |h gap|; 0 when the h gap is 0.
  double gap_ratio = 0.0;
};

/// Generates both cohorts, fits one model on the pooled careers, then
/// scores every researcher (Literal mode) under it.
inline NorthSouthReport run_north_south_experiment(const PopulationSpec& north, const PopulationSpec& south,
                                                   const ModelConfig& model_config, std::size_t bins = 20) {
  const auto north_pop = generate_population(north);
  const auto south_pop = generate_population(south);

  std::vector<FeatureVector> pooled;
  pooled.reserve(north_pop.size() + south_pop.size());
  for (const auto* pop : {&north_pop, &south_pop})
    for (const auto& s : *pop) pooled.push_back(FeatureVector::from_stats(s, model_config.feature_set));
  const ModelState model = fit_batch(model_config, pooled);

  auto summarize = [&](const std::vector<CareerStats>& pop, const std::string& label) {
    std::vector<double> hs;
    std::vector<double> phis;
    for (const auto& s : pop) {
      hs.push_back(static_cast<double>(s.h_index));
      phis.push_back(score(s, model, ScoreMode::Literal).phi);
    }
    GroupSummary g;
    g.mean_h = mean_of(hs);
    g.mean_phi = mean_of(phis);
    g.h_density = export_density(hs, bins, label + " h-index");
    g.phi_density = export_density(phis, bins, label + " science-index");
    return g;
  };

  NorthSouthReport report;
  report.north = summarize(north_pop, "north");
  report.south = summarize(south_pop, "south");
  report.weights = model.weights;
  report.h_gap = report.north.mean_h - report.south.mean_h;
  report.phi_gap = report.north.mean_phi - report.south.mean_phi;
  report.gap_ratio = report.h_gap == 0.0 ? 0.0 : std::abs(report.phi_gap) / std::abs(report.h_gap);
  return report;
}

inline std::string to_canonical(const NorthSouthReport& r) {
  CanonicalWriter w;
  auto group = [&w](const GroupSummary& g) {
    w.begin_object();
    w.key("mean_h").value(g.mean_h);
    w.key("mean_phi").value(g.mean_phi);
    w.key("h_density");
    write_canonical(w, g.h_density);
    w.key("phi_density");
    write_canonical(w, g.phi_density);
    w.end_object();
  };
  w.begin_object();
  w.key("north");
  group(r.north);
  w.key("south");
  group(r.south);
  w.key("weights").values(r.weights);
  w.key("h_gap").value(r.h_gap);
  w.key("phi_gap").value(r.phi_gap);
  w.key("gap_ratio").value(r.gap_ratio);
  w.end_object();
  return std::move(w).str();
}

}  // namespace science_index
