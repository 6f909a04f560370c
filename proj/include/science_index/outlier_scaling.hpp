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

#include "science_index/error.hpp"

namespace science_index {

/// Compression applied to predicted h-indices above `threshold`:
/// beta -> beta / (c0 + c1 * beta). Applied exactly as stated, so the map
/// jumps at the threshold (60 -> 60 / 0.991 from above).
struct OutlierScaling {
  double threshold = 60.0;
  double c0 = 0.571;
  double c1 = 0.007;

  /// Where c0 + c1 * beta == 1, i.e. the map is the identity.
  constexpr double fixed_point() const { return (1.0 - c0) / c1; }
};

inline double scale_beta(double beta, const OutlierScaling& policy = {}) {
  if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be finite");
  if (beta <= policy.threshold) return beta;
  return beta / (policy.c0 + policy.c1 * beta);
}

}  // namespace science_index
