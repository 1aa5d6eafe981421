#include "resilab/rng.hpp"

#include "resilab/mathx.hpp"

namespace resilab {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::at(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) {
  const std::uint64_t base = mix(seed ^ (stream * 0xA24BAED4963EE407ULL));
  return mix(base + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  // Shift u into (0,1): u64 >> 11 is in [0, 2^53), add 0.5 before scaling.
  const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  return norm_ppf(u);
}

double CounterRng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_uniform();
}

}  // namespace resilab
