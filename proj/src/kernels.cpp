#include "snetfdr/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace snetfdr {

LevelCounts count_level_set(std::span<const double> values, double level,
                            Execution exec) {
  const auto n = static_cast<long long>(values.size());
  const double* v = values.data();
  std::size_t above = 0;
  std::size_t equal = 0;
  if (exec == Execution::serial) {
    for (long long i = 0; i < n; ++i) {
      above += v[i] > level;
      equal += v[i] == level;
    }
  } else {
#pragma omp parallel for reduction(+ : above, equal) schedule(static)
    for (long long i = 0; i < n; ++i) {
      above += v[i] > level;
      equal += v[i] == level;
    }
  }
  return {above, equal};
}

void evaluate_rows(const ObservationMatrix& rows,
                   const std::function<double(Point)>& fn,
                   std::span<double> out, Execution exec) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t n = rows.rows();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  for_each_index(
      chunks,
      [&](std::size_t c) {
        const std::size_t end = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) out[i] = fn(rows.row(i));
      },
      exec);
}

void transform_batch(const ObservationModel& model, TransformKind kind,
                     const ObservationMatrix& observations,
                     std::span<double> out, std::uint64_t seed,
                     std::uint32_t stream, Execution exec,
                     const TransformOptions& opts) {
  // Nested regions would serialize anyway; keep the Monte Carlo fallback
  // on the calling thread.
  TransformOptions inner = opts;
  if (exec == Execution::parallel) inner.execution = Execution::serial;
  for_each_index(
      observations.rows(),
      [&](std::size_t i) {
        Rng rng(seed, stream, static_cast<std::uint32_t>(i), 0x7a11u);
        out[i] = apply_transform(kind, model, observations.row(i), rng, inner);
      },
      exec);
}

int parallel_threads() noexcept { return omp_get_max_threads(); }

}  // namespace snetfdr
