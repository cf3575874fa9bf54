#pragma once

#include <cmath>
#include <cstdint>

namespace thinsets {

// splitmix64 finalizer; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream key from (key, stream).
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) noexcept {
  return mix64(mix64(key) ^ (stream + 0x9e3779b97f4a7c15ULL));
}

// Uniform double in [0, 1) from 53 high bits.
constexpr double to_uniform01(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Per-index Bernoulli decision keyed by (seed, k): independent of iteration
// order, so sampling can be replayed or parallelised element-wise.
inline bool bernoulli_at(std::uint64_t seed, std::uint64_t k, double p) noexcept {
  return to_uniform01(mix64(mix64(seed) ^ (k * 0x9e3779b97f4a7c15ULL + 1))) < p;
}

// Counter-based generator: a key plus an incrementing counter through mix64.
// split() derives statistically independent children, so trials can fan out
// in parallel while staying bit-reproducible.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static CounterRng keyed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return CounterRng(derive_key(seed, stream));
  }

  CounterRng split(std::uint64_t stream) const noexcept {
    return CounterRng(derive_key(key_, stream));
  }

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  double next_uniform() noexcept { return to_uniform01(next_u64()); }

  // Rademacher sign.
  double next_sign() noexcept { return (next_u64() & 1u) ? 1.0 : -1.0; }

  // Uniform on [-1, 1).
  double next_symmetric() noexcept { return 2.0 * next_uniform() - 1.0; }

  // Standard normal via Box-Muller, cached in pairs.
  double next_gaussian() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_uniform(), u2 = next_uniform();
    while (u1 <= 0.0) u1 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace thinsets
