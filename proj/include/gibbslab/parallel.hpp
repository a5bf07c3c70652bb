#pragma once

#include <cstddef>
#include <cstdint>

namespace gibbslab {

/// Applies the LAB_THREADS cap (if set) to the OpenMP runtime; returns the resulting thread count.
int configure_threads_from_env();

int max_threads();
void set_threads(int n);

/// Scoped override of the OpenMP thread count.
class ThreadLimit {
 public:
  explicit ThreadLimit(int n);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  int previous_;
};

/// Fixed reduction granularity: partial results are formed per chunk and combined in chunk
/// order, so floating-point sums do not depend on the thread count.
inline constexpr std::uint64_t kReductionChunk = 4096;

inline std::uint64_t chunk_count(std::uint64_t n) { return (n + kReductionChunk - 1) / kReductionChunk; }

}  // namespace gibbslab
