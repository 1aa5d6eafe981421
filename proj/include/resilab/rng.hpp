#pragma once

#include <cstdint>

namespace resilab {

// Counter-based deterministic RNG. Every draw is a pure function of
// (seed, stream, counter), so generation order never affects values and
// scenario output is bitwise reproducible across platforms.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), counter_(0) {}

  static std::uint64_t mix(std::uint64_t z);
  static std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

  std::uint64_t next_u64() { return at(seed_, stream_, counter_++); }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform();

  // Standard normal via inverse-CDF of a (0,1) uniform shifted off zero.
  double next_normal();

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace resilab
