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

#include "codequal/retry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "testutil.hpp"

namespace codequal {
namespace {

using testing::SleepRecorder;

TEST(BackoffDelay, ZeroJitterIsExactGeometric) {
  RetryPolicy policy;
  policy.jitter = 0.0;
  EXPECT_DOUBLE_EQ(backoff_delay(1, policy, 42), 1.0);
  EXPECT_DOUBLE_EQ(backoff_delay(2, policy, 42), 2.0);
  EXPECT_DOUBLE_EQ(backoff_delay(3, policy, 42), 4.0);
}

TEST(BackoffDelay, FullJitterStaysInRange) {
  RetryPolicy policy;  // jitter = 1.0
  for (uint64_t seed = 0; seed < 50; ++seed) {
    for (int attempt = 1; attempt <= 4; ++attempt) {
      double scale = 1.0 * std::pow(2.0, attempt - 1);
      double d = backoff_delay(attempt, policy, seed);
      EXPECT_GE(d, 0.0);
      EXPECT_LT(d, scale);
    }
  }
}

TEST(BackoffDelay, PartialJitterRespectsFloor) {
  RetryPolicy policy;
  policy.jitter = 0.25;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    double d = backoff_delay(2, policy, seed);
    // scale = 2.0, floor = 1.5, span = 0.5
    EXPECT_GE(d, 1.5);
    EXPECT_LT(d, 2.0 + 1e-12);
  }
}

TEST(BackoffDelay, DeterministicPerSeedAndAttempt) {
  RetryPolicy policy;
  EXPECT_DOUBLE_EQ(backoff_delay(1, policy, 7), backoff_delay(1, policy, 7));
  EXPECT_NE(backoff_delay(1, policy, 7), backoff_delay(2, policy, 7));
  EXPECT_NE(backoff_delay(1, policy, 7), backoff_delay(1, policy, 8));
}

TEST(RetryPolicy, ValidationRejectsBadFields) {
  RetryPolicy p;
  p.max_attempts = 0;
  EXPECT_THROW(p.validate(), Error);
  p = RetryPolicy{};
  p.base_delay = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = RetryPolicy{};
  p.multiplier = 0.5;
  EXPECT_THROW(p.validate(), Error);
  p = RetryPolicy{};
  p.jitter = 1.5;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_NO_THROW(RetryPolicy{}.validate());
}

TEST(WithRetry, FirstTrySuccessNeverSleeps) {
  SleepRecorder sleeps;
  int calls = 0;
  int result = with_retry(
      [&] {
        ++calls;
        return 99;
      },
      RetryPolicy{}, 1, sleeps.fn());
  EXPECT_EQ(result, 99);
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(sleeps.delays.empty());
}

TEST(WithRetry, RecoversWithinBudget) {
  SleepRecorder sleeps;
  int calls = 0;
  int result = with_retry(
      [&]() -> int {
        if (++calls < 3) throw transient_error("flaky", 503);
        return 7;
      },
      RetryPolicy{}, 5, sleeps.fn());
  EXPECT_EQ(result, 7);
  EXPECT_EQ(calls, 3);
  ASSERT_EQ(sleeps.delays.size(), 2u);
  EXPECT_LT(sleeps.delays[0], 1.0);
  EXPECT_LT(sleeps.delays[1], 2.0);
}

TEST(WithRetry, ZeroJitterSleepsExactly1Then2) {
  RetryPolicy policy;
  policy.jitter = 0.0;
  SleepRecorder sleeps;
  int calls = 0;
  EXPECT_THROW(with_retry(
                   [&]() -> int {
                     ++calls;
                     throw transient_error("always down", 503);
                   },
                   policy, 5, sleeps.fn()),
               RetryExhausted);
  EXPECT_EQ(calls, 3);
  ASSERT_EQ(sleeps.delays.size(), 2u);
  EXPECT_DOUBLE_EQ(sleeps.delays[0], 1.0);
  EXPECT_DOUBLE_EQ(sleeps.delays[1], 2.0);
}

TEST(WithRetry, PermanentFailurePassesThroughImmediately) {
  SleepRecorder sleeps;
  int calls = 0;
  try {
    with_retry(
        [&]() -> int {
          ++calls;
          throw permanent_error("broken request", 400,
                                ErrorDomain::provider);
        },
        RetryPolicy{}, 1, sleeps.fn());
    FAIL() << "expected throw";
  } catch (const RetryExhausted&) {
    FAIL() << "permanent errors must not be wrapped";
  } catch (const Error& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_EQ(e.http_status(), std::optional<int>(400));
  }
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(sleeps.delays.empty());
}

TEST(WithRetry, ExhaustionReportsAttemptsAndInheritsContext) {
  SleepRecorder sleeps;
  try {
    with_retry(
        []() -> int {
          throw transient_error("rate limited", 429, ErrorDomain::provider);
        },
        RetryPolicy{}, 2, sleeps.fn());
    FAIL() << "expected RetryExhausted";
  } catch (const RetryExhausted& e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_FALSE(e.transient());  // exhausted is final
    EXPECT_EQ(e.http_status(), std::optional<int>(429));
    EXPECT_EQ(e.domain(), ErrorDomain::provider);
    EXPECT_NE(std::string(e.what()).find("rate limited"), std::string::npos);
    EXPECT_EQ(e.last_detail(), "rate limited");
  }
  EXPECT_EQ(sleeps.delays.size(), 2u);
}

TEST(WithRetry, ObserverSeesEachFailedAttempt) {
  SleepRecorder sleeps;
  std::vector<int> observed;
  EXPECT_THROW(with_retry(
                   []() -> int { throw transient_error("down", 500); },
                   RetryPolicy{}, 3, sleeps.fn(),
                   [&](int attempt, const Error& err) {
                     observed.push_back(attempt);
                     EXPECT_TRUE(err.transient());
                   }),
               RetryExhausted);
  // The final attempt throws RetryExhausted instead of notifying.
  EXPECT_EQ(observed, (std::vector<int>{1, 2}));
}

TEST(WithRetry, SingleAttemptPolicyNeverRetries) {
  RetryPolicy policy;
  policy.max_attempts = 1;
  SleepRecorder sleeps;
  int calls = 0;
  EXPECT_THROW(with_retry(
                   [&]() -> int {
                     ++calls;
                     throw transient_error("down", 503);
                   },
                   policy, 1, sleeps.fn()),
               RetryExhausted);
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(sleeps.delays.empty());
}

}  // namespace
}  // namespace codequal
