#pragma once

#include <cstdint>

#include "tauber/rational.hpp"

namespace tauber {

/// Name recorded in run logs and certificates.
inline constexpr const char* kPrngName = "splitmix64/1";

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based hash: the m-th draw of stream `seed`, independent of call order.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t m) {
  return splitmix64(splitmix64(seed) ^ splitmix64(m + 0x632be59bd9b4e019ULL));
}

/// True with probability p for draw m of stream `seed`; exact comparison against floor(p * 2^64).
bool bernoulli_draw(std::uint64_t seed, std::uint64_t m, const Rational& p);

/// Sequential generator with portable uniform draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_ - 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [lo, hi] by rejection.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

}  // namespace tauber
