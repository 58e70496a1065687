#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace dtl {

/// Limits for a search. Work units make verdicts reproducible; the wall
/// clock limit is a safety net and makes results timing-dependent.
struct Budget {
  std::uint64_t units = 0;  // 0: unlimited
  std::optional<std::chrono::milliseconds> wall;
  unsigned workers = 1;
};

/// Wall-clock deadline derived from a Budget.
class Deadline {
 public:
  explicit Deadline(const Budget& b) {
    if (b.wall) at_ = std::chrono::steady_clock::now() + *b.wall;
  }
  bool passed() const { return at_ && std::chrono::steady_clock::now() >= *at_; }

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

/// Runs f(i) for i in [0, n) on up to `workers` threads. Results must be
/// written by index so that the outcome does not depend on scheduling.
/// The first exception thrown by any task is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& f) {
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k + 1 < workers; ++k) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dtl
