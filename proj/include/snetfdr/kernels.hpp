#pragma once

// Data-parallel inner loops. Every kernel takes an Execution tag; the serial
// branch is the reference the OpenMP branch is tested and benchmarked against.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>

#include "snetfdr/measure.hpp"
#include "snetfdr/types.hpp"

namespace snetfdr {

struct LevelCounts {
  std::size_t above = 0;  // values strictly greater than the level
  std::size_t equal = 0;  // values equal to the level
};

LevelCounts count_level_set(std::span<const double> values, double level,
                            Execution exec);

/// out[i] = fn(row i of `rows`).
void evaluate_rows(const ObservationMatrix& rows,
                   const std::function<double(Point)>& fn,
                   std::span<double> out, Execution exec);

/// Applies a transform to every sensor row. Sensor i draws from its own
/// stream (seed, stream, i), so the result does not depend on `exec`.
void transform_batch(const ObservationModel& model, TransformKind kind,
                     const ObservationMatrix& observations,
                     std::span<double> out, std::uint64_t seed,
                     std::uint32_t stream, Execution exec,
                     const TransformOptions& opts = {});

/// Runs body(i) for i in [0, n). The first exception thrown by any
/// iteration is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Body&& body, Execution exec) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

/// Number of threads the parallel branch will use.
int parallel_threads() noexcept;

}  // namespace snetfdr
