#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hawkes_lab {

/// SplitMix64 output function (Steele, Lea & Flood; constants of the
/// "Mix13" variant). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of the independent stream number `index` under `master_seed`:
///   mix64(mix64(master_seed) + 0x9E3779B97F4A7C15 * (index + 1)).
/// Depends only on (master_seed, index), so a Monte Carlo run gives the same
/// per-path streams for any thread count.
constexpr std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The state transition is the pure function block(counter, key): ten
/// rounds of
///   (hi0, lo0) = mulhilo(0xD2511F53, c0), (hi1, lo1) = mulhilo(0xCD9E8D57, c2)
///   c = (hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0)
/// with the key bumped by (0x9E3779B9, 0xBB67AE85) between rounds. The engine
/// walks the 128-bit counter (block index in words 0-1, zero in words 2-3)
/// and hands out the four 32-bit words of each block in order.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  static counter_type block(counter_type ctr, key_type key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  std::uint64_t blocks_consumed() const noexcept { return block_index_; }

 private:
  void refill() noexcept;

  key_type key_;
  std::uint64_t block_index_ = 0;
  counter_type buffer_{};
  unsigned index_ = 4;
};

/// Variate generation on top of one Philox stream. All transforms are
/// spelled out here so results do not depend on the standard library's
/// distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) noexcept : engine_(key) {}

  /// 53-bit uniform on [0, 1): (a >> 5) * 2^26 + (b >> 6), scaled by 2^-53.
  double uniform() noexcept {
    const std::uint64_t a = engine_() >> 5;
    const std::uint64_t b = engine_() >> 6;
    return static_cast<double>((a << 26) | b) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1): the midpoint of the 53-bit cell.
  double uniform_open() noexcept {
    const std::uint64_t a = engine_() >> 5;
    const std::uint64_t b = engine_() >> 6;
    return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
  }

  /// Standard exponential by inversion; always > 0.
  double exponential() noexcept;

  /// Standard normal by the Marsaglia polar method (the second variate of
  /// each accepted pair is cached).
  double normal() noexcept;

  /// Gamma(shape, 1) by Marsaglia-Tsang, boosted by U^(1/shape) when
  /// shape < 1. Always > 0.
  double gamma(double shape) noexcept;

  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hawkes_lab
