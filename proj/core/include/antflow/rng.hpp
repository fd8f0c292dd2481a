#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace antflow {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
/// block index and a 64-bit stream id, so generators that differ only in
/// `stream` never share a counter value. Satisfies
/// UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Skip `n` outputs.
  void discard(std::uint64_t n) noexcept;

  std::uint64_t block() const noexcept { return block_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// One raw Philox4x32-10 block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> encrypt(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::uint64_t stream_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned index_ = 4;
};

/// Convenience sampling on top of Philox4x32.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept : engine_(seed, stream) {}

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = engine_();
    return (hi << 32) | engine_();
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n); n must be positive (Lemire's method).
  std::uint64_t below(std::uint64_t n) noexcept;

  bool bernoulli(double probability) noexcept { return uniform() < probability; }

  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
};

}  // namespace antflow
