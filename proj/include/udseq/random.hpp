#ifndef UDSEQ_RANDOM_HPP
#define UDSEQ_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace udseq {

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the key of a child stream from its parent key.
///
/// All randomness in the library hangs off one 64-bit seed through this
/// derivation tree: seed -> module stream -> sub-stream -> coordinate.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t child) noexcept {
  return mix64(parent ^ mix64(child ^ 0xD1B54A32D192ED03ULL));
}

/// Stream identifiers of the first level of the derivation tree.
enum class Stream : std::uint64_t {
  index_sequence = 1,  // coordinates of the two-sided index sequence
  generators = 2,      // Haar-sampled generator sets
  probes = 3,          // probe measures and base points
  words = 4,           // sampled words
  haar = 5,            // reference Haar samples
};

constexpr std::uint64_t derive_key(std::uint64_t parent, Stream s) noexcept {
  return derive_key(parent, static_cast<std::uint64_t>(s));
}

/// Counter-based generator: the i-th output is a pure function of (key, i).
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> and
/// <algorithm>, but the library only uses the conversions below so that
/// results do not depend on the standard library implementation.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return at(counter_++); }

  /// Output at an arbitrary counter position, without advancing.
  constexpr result_type at(std::uint64_t i) const noexcept { return mix64(key_ ^ mix64(i)); }

  constexpr CounterRng split(std::uint64_t child) const noexcept {
    return CounterRng(derive_key(key_, child));
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(CounterRng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
inline double uniform_left_open(CounterRng& rng) noexcept {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n >= 1 (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_index(CounterRng& rng, std::uint64_t n) noexcept {
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Standard normal via Box-Muller (two draws per variate).
inline double standard_normal(CounterRng& rng) noexcept {
  const double u1 = uniform_left_open(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace udseq

#endif  // UDSEQ_RANDOM_HPP
