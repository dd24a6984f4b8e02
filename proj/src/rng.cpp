#include "mobiq/rng.hpp"

namespace mobiq {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  // Reject the low residue class so every value keeps equal weight.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

RngStream rng_stream(std::uint64_t seed, StreamLabel label) {
  const auto tag = static_cast<std::uint64_t>(label);
  return RngStream(splitmix64(seed ^ splitmix64(tag * 0xd1b54a32d192ed03ULL)));
}

}  // namespace mobiq
