#pragma once

#include <chrono>
#include <cstddef>
#include <functional>

namespace marginforge {

/// Thread count from MARGINFORGE_THREADS when set and positive, else the
/// hardware concurrency (at least 1).
std::size_t default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write only to their own slot; the first exception is rethrown after all
/// workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace marginforge
