#pragma once

#include <cstdint>
#include <limits>

namespace kinship {

/// Counter-based random stream. A stream is fully determined by
/// (seed, domain, index), so replicate i of a simulation draws the same
/// numbers no matter which worker runs it or in what order.
///
/// The generator is SplitMix64: a Weyl sequence passed through a 64-bit
/// finalizer. Substream keys are mixed through the same finalizer.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index)
      : state_(mix(mix(seed ^ mix(domain + kGamma)) ^ (index * kGamma + 0x632be59bd9b4e019ULL))) {}

  explicit RandomStream(std::uint64_t seed) : RandomStream(seed, 0, 0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix(state_ += kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, n) (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) noexcept {
    while (true) {
      const __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= n || low >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace kinship
