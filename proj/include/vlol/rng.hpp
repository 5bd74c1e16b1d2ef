#pragma once

#include <cstdint>
#include <string_view>

namespace vlol {

/// SplitMix64 finaliser. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based generator: output i of a stream is mix64(key + i * gamma),
/// i.e. SplitMix64 evaluated at an explicit counter. Streams are addressed by
/// (seed, purpose tag, index) so any record can be regenerated in isolation.
/// All draws are integer-only; nothing here touches floating point.
class CounterRng {
public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr CounterRng stream(std::uint64_t seed, std::string_view tag,
                                     std::uint64_t index = 0) noexcept {
    std::uint64_t k = mix64(seed ^ fnv1a64(tag));
    k = mix64(k + mix64(index));
    return CounterRng(k);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection,
  /// so the result is exactly uniform. bound must be > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform integer in [lo, hi].
  constexpr std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace vlol
