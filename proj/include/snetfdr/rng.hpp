#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace snetfdr {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit seed is the key. The 128-bit counter is split into a 32-bit
/// block index and a 96-bit stream id, so any (seed, stream) pair names an
/// independent sequence. Monte Carlo code derives one stream per iteration,
/// which makes serial and parallel execution draw identical numbers.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint32_t stream0 = 0,
               std::uint32_t stream1 = 0, std::uint32_t stream2 = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox_block(
      std::array<std::uint32_t, 4> counter,
      std::array<std::uint32_t, 2> key) noexcept;

 private:
  std::uint32_t next32() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in the open interval (0, 1).
inline double uniform_open01(Rng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace snetfdr
