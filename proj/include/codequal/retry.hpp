// Copyright 2026 The codequal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <utility>

#include "codequal/error.hpp"

namespace codequal {

/// Exponential backoff with configurable jitter. jitter = 1.0 is full
/// jitter (delay drawn from [0, base * multiplier^(n-1)]); jitter = 0 is the
/// plain geometric schedule.
struct RetryPolicy {
  int max_attempts = 3;
  double base_delay = 1.0;  // seconds
  double multiplier = 2.0;
  double jitter = 1.0;  // fraction of the delay that is randomized, in [0,1]

  void validate() const {
    if (max_attempts < 1) throw usage_error("retry.max_attempts must be >= 1");
    if (base_delay <= 0)
      throw usage_error("retry.base_delay_seconds must be > 0");
    if (multiplier < 1.0) throw usage_error("retry.multiplier must be >= 1");
    if (jitter < 0.0 || jitter > 1.0)
      throw usage_error("retry.jitter must be in [0,1]");
  }
};

/// Injectable sleep, so tests can run on a virtual clock.
using SleepFn = std::function<void(double seconds)>;

inline void real_sleep(double seconds) {
  if (seconds <= 0) return;
  std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

/// Delay before attempt+1, after `attempt` (1-based) has failed.
/// Deterministic for a given (policy, attempt, rng_seed): the value lies in
/// [floor, floor + span] with floor = base * mult^(attempt-1) * (1 - jitter)
/// and span = base * mult^(attempt-1) * jitter.
inline double backoff_delay(int attempt, const RetryPolicy& policy,
                            uint64_t rng_seed) {
  double scale = policy.base_delay;
  for (int i = 1; i < attempt; ++i) scale *= policy.multiplier;
  double floor_part = scale * (1.0 - policy.jitter);
  double span = scale * policy.jitter;
  if (span <= 0.0) return floor_part;
  // Mix the attempt into the seed so successive attempts draw fresh values
  // while staying reproducible.
  std::seed_seq seq{rng_seed, static_cast<uint64_t>(attempt)};
  std::mt19937_64 rng(seq);
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
  return floor_part + span * unit;
}

using RetryObserver = std::function<void(int attempt, const Error& err)>;

/// Runs `action` up to policy.max_attempts times. Transient failures sleep
/// per backoff_delay and retry; permanent failures pass through untouched.
/// Throws RetryExhausted when the final attempt fails transiently.
template <typename Action>
auto with_retry(Action&& action, const RetryPolicy& policy, uint64_t rng_seed,
                const SleepFn& sleep = real_sleep,
                const RetryObserver& on_retry = {})
    -> decltype(action()) {
  policy.validate();
  for (int attempt = 1;; ++attempt) {
    try {
      return action();
    } catch (const RetryExhausted&) {
      throw;
    } catch (const Error& err) {
      if (!err.transient()) throw;
      if (attempt >= policy.max_attempts) throw RetryExhausted(attempt, err);
      if (on_retry) on_retry(attempt, err);
      sleep(backoff_delay(attempt, policy, rng_seed));
    }
  }
}

}  // namespace codequal
