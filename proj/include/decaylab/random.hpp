#pragma once

#include <cstdint>

namespace decaylab {

/// SplitMix64 output mixer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream keyed on (seed, stream id). Each pair owns
/// one stream, so the draws of a pair never depend on which thread samples
/// it or in what order.
class Substream {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  constexpr Substream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream + kGolden))) {}

  [[nodiscard]] constexpr std::uint64_t next_u64() noexcept {
    counter_ += kGolden;
    return mix64(key_ + counter_);
  }

  /// Uniform on the open interval (0, 1).
  [[nodiscard]] constexpr double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace decaylab
