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
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include "science_index/error.hpp"

namespace science_index {

/// Real time. Clock policies provide `now()` and `sleep_until()`.
struct SteadyClock {
  using duration = std::chrono::steady_clock::duration;
  using time_point = std::chrono::steady_clock::time_point;

  time_point now() const { return std::chrono::steady_clock::now(); }
  void sleep_until(time_point t) const { std::this_thread::sleep_until(t); }
};

/// Manually advanced clock; sleeping jumps straight to the deadline.
class ManualClock {
 public:
  using duration = std::chrono::nanoseconds;
  using time_point = std::chrono::time_point<std::chrono::steady_clock, duration>;

  ManualClock() : now_(std::make_shared<State>()) {}

  time_point now() const {
    std::lock_guard lock(now_->mutex);
    return now_->t;
  }
  void sleep_until(time_point t) const {
    std::lock_guard lock(now_->mutex);
    now_->t = std::max(now_->t, t);
  }
  void advance(duration d) const {
    std::lock_guard lock(now_->mutex);
    now_->t += d;
  }

 private:
  struct State {
    std::mutex mutex;
    time_point t{};
  };
  std::shared_ptr<State> now_;
};

/// Spaces acquisitions at least 1/rate apart, so any window of length W
/// admits at most ceil(rate * W) + 1 requests. Thread-safe: callers
/// reserve slots under a lock and sleep outside it.
template <typename Clock = SteadyClock>
class BasicRateLimiter {
 public:
  using time_point = typename Clock::time_point;

  explicit BasicRateLimiter(double requests_per_second, Clock clock = {}) : clock_(std::move(clock)) {
    if (!(requests_per_second > 0.0) || !std::isfinite(requests_per_second)) {
      throw Error(ErrorCode::InvalidArgument, "rate limit must be > 0");
    }
    interval_ = std::chrono::duration_cast<typename Clock::duration>(
        std::chrono::duration<double>(1.0 / requests_per_second));
  }

  /// Blocks until the caller may issue one request; returns the slot time.
  time_point acquire() {
    time_point slot;
    {
      std::lock_guard lock(mutex_);
      const auto now = clock_.now();
      slot = started_ ? std::max(now, next_) : now;
      next_ = slot + interval_;
      started_ = true;
    }
    clock_.sleep_until(slot);
    return slot;
  }

  const Clock& clock() const { return clock_; }

 private:
  Clock clock_;
  typename Clock::duration interval_{};
  std::mutex mutex_;
  time_point next_{};
  bool started_ = false;
};

using RateLimiter = BasicRateLimiter<SteadyClock>;

}  // namespace science_index
