#pragma once

#include <cstdint>

namespace transop {

/// Counter-based generator. Draw k of stream `seed` is
///   splitmix64_mix(seed + (k + 1) * 0x9E3779B97F4A7C15)
/// where splitmix64_mix is the SplitMix64 output finalizer. Every draw is a
/// pure function of (seed, k), so results are bit-reproducible on any
/// platform. Normal draws use Box-Muller on two consecutive uniforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (lo, hi); never returns an endpoint.
  double uniform_open(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64_mix(std::uint64_t x);

/// Child seed for sub-stream `stream` of `seed`. Distinct streams of the same
/// parent are decorrelated through the mixer.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace transop
