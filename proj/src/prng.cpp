#include "tauber/prng.hpp"

#include <stdexcept>

namespace tauber {

bool bernoulli_draw(std::uint64_t seed, std::uint64_t m, const Rational& p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  static const Integer two64 = pow2(64);
  Integer bound = p.get_num() * two64 / p.get_den();
  Integer draw(std::to_string(counter_hash(seed, m)));
  return draw < bound;
}

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty range");
  std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return next();
  std::uint64_t range = span + 1;
  std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % range + 1) % range;
  for (;;) {
    std::uint64_t v = next();
    if (v <= limit) return lo + v % range;
  }
}

}  // namespace tauber
