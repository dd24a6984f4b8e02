#pragma once

#include <cstdint>
#include <random>

namespace mobiq {

/// Independent randomness consumers within one run.
enum class StreamLabel : std::uint64_t {
  init = 1,
  mobility = 2,
  traffic = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Reproducible random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the conversions below are our own so
/// results do not depend on a particular standard library's distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t engine_seed) : engine_(engine_seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

RngStream rng_stream(std::uint64_t seed, StreamLabel label);

}  // namespace mobiq
