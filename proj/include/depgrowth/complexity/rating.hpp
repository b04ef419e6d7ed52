#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "depgrowth/complexity/client.hpp"
#include "depgrowth/complexity/prompt.hpp"
#include "depgrowth/complexity/response.hpp"

namespace depgrowth::complexity {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{60'000};
  Sleeper sleep = real_sleep;

  /// Delay before attempt `attempt` (1-based; attempt 1 has none).
  std::chrono::milliseconds backoff_before(int attempt) const {
    if (attempt <= 1) return std::chrono::milliseconds{0};
    double ms = static_cast<double>(initial_backoff.count());
    for (int i = 2; i < attempt; ++i) ms *= multiplier;
    ms = std::min(ms, static_cast<double>(max_backoff.count()));
    return std::chrono::milliseconds{static_cast<long long>(ms)};
  }
};

struct RatingOutcome {
  ComplexityRating rating;
  int attempts = 0;
};

/// Sends the prompt and parses the answer. Malformed responses and transport
/// failures are retried with exponential backoff up to policy.max_attempts.
inline RatingOutcome rate_prompt(const PromptBundle& prompt, ModelClient& client,
                                 const RetryPolicy& policy) {
  std::string last_error;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1 && policy.sleep) policy.sleep(policy.backoff_before(attempt));
    try {
      return {parse_rating_response(client.complete(prompt)), attempt};
    } catch (const ComplexityError& e) {
      if (e.code() != ComplexityErrc::MalformedResponse && e.code() != ComplexityErrc::Transport)
        throw;
      last_error = e.what();
    }
  }
  throw ComplexityError(ComplexityErrc::ExhaustedRetries,
                        "gave up after " + std::to_string(attempts) + " attempts: " + last_error);
}

inline ComplexityRating rate_release(const PackageRelease& release, const RepoSnapshot& repo,
                                     ModelClient& client, const RetryPolicy& policy) {
  return rate_prompt(build_prompt(release, repo), client, policy).rating;
}

/// Median of k independent ratings. Null answers count as missing; the result
/// is null when at least half are null. Even counts take the lower median.
inline ComplexityRating rate_release_repeated(const PackageRelease& release,
                                              const RepoSnapshot& repo, ModelClient& client,
                                              const RetryPolicy& policy, int repeats) {
  const auto prompt = build_prompt(release, repo);
  std::vector<ComplexityRating> runs;
  for (int i = 0; i < std::max(1, repeats); ++i)
    runs.push_back(rate_prompt(prompt, client, policy).rating);
  if (runs.size() == 1) return runs.front();
  std::vector<int> values;
  for (const auto& r : runs)
    if (r.rating) values.push_back(*r.rating);
  if (values.size() * 2 <= runs.size()) {
    auto out = runs.front();
    out.rating.reset();
    return out;
  }
  std::sort(values.begin(), values.end());
  const int median = values[(values.size() - 1) / 2];
  for (const auto& r : runs)
    if (r.rating == median) return r;
  return runs.front();
}

/// Token bucket: `rate_per_second` refill, `burst` capacity. acquire() blocks.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  TokenBucket(double rate_per_second, double burst)
      : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(burst_), last_(Clock::now()) {}

  void acquire() {
    if (rate_ <= 0.0) return;  // unlimited
    std::unique_lock lock(mutex_);
    while (true) {
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
    }
  }

 private:
  void refill() {
    const auto now = Clock::now();
    tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
    last_ = now;
  }

  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

struct RateLimits {
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;  // 0 disables the bucket
  double burst = 1.0;
};

/// Runs `job(i)` for i in [0, n) on at most limits.max_in_flight threads,
/// taking one token per job. `job` must report its own result; exceptions
/// escaping it are rethrown after all workers stop.
inline void run_bounded(std::size_t n, const RateLimits& limits,
                        const std::function<void(std::size_t)>& job) {
  TokenBucket bucket(limits.requests_per_second, limits.burst);
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mutex);
        if (next >= n || failure) return;
        i = next++;
      }
      bucket.acquire();
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(limits.max_in_flight, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace depgrowth::complexity
