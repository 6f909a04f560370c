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
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "science_index/error.hpp"

namespace science_index {

/// Neumaier-compensated sum. `value()` folds the compensation back in.
template <typename T = double>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  CompensatedSum(T sum, T compensation) : sum_(sum), compensation_(compensation) {}

  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  T value() const { return sum_ + compensation_; }
  T sum() const { return sum_; }
  T compensation() const { return compensation_; }

  bool operator==(const CompensatedSum&) const = default;

 private:
  T sum_{};
  T compensation_{};
};

/// Streaming mean / population variance (Welford).
struct RunningDeltaStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
    if (m2 < 0.0) m2 = 0.0;
  }

  double variance() const { return count == 0 ? 0.0 : m2 / static_cast<double>(count); }
  double stddev() const { return std::sqrt(variance()); }

  bool operator==(const RunningDeltaStats&) const = default;
};

/// Row-major square matrix, sized for the handful of regression weights.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Solves A x = b for symmetric positive definite A by Cholesky
/// factorization. Throws SingularSystem when a pivot is not positive or is
/// negligible against the matrix scale.
inline std::vector<double> cholesky_solve(const SquareMatrix& a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "rhs length differs from matrix size");

  SquareMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    // A pivot that has lost almost all of its original diagonal means the
    // column is (numerically) a combination of the earlier ones.
    if (!(diag > 0.0) || !(diag > std::abs(a(j, j)) * 1e-13)) {
      throw Error(ErrorCode::SingularSystem, "normal equations are not positive definite (pivot " +
                                                 std::to_string(j) + ")");
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace science_index
