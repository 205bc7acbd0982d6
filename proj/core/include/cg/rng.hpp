#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cg {

/// SplitMix64 finalizer. Used to expand seeds and derive independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** generator with platform-independent derived distributions.
///
/// Every experiment stream is obtained from (seed, experiment id, replicate
/// index) through `Rng::stream`, so replicate results never depend on the
/// order or the thread in which replicates are executed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t experiment_id,
                    std::uint64_t replicate) noexcept {
    std::uint64_t mix = seed;
    std::uint64_t a = splitmix64(mix);
    mix ^= experiment_id * 0xD1B54A32D192ED03ULL;
    std::uint64_t b = splitmix64(mix);
    mix ^= replicate * 0xABC98388FB8FAC03ULL;
    std::uint64_t c = splitmix64(mix);
    return Rng(a ^ (b << 1) ^ (c << 2) ^ replicate);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  double uniform_open_closed() noexcept { return 1.0 - uniform01(); }

  double exponential(double rate) noexcept;

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace cg
