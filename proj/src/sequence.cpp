#include "tauber/sequence.hpp"

#include <memory>

#include "tauber/errors.hpp"

namespace tauber {

Sequence::Sequence(std::string spec, Term term, std::optional<GrowthEnvelope> envelope, GrowthWitness witness)
    : spec_(std::move(spec)), term_(std::move(term)), envelope_(std::move(envelope)), witness_(std::move(witness)) {}

std::optional<Rational> Sequence::sup_norm() const {
  if (envelope_ && envelope_->degree == 0) return envelope_->coefficient;
  return std::nullopt;
}

Index Sequence::least_index_at_least(const Rational& target, Index from, Index scan_cap) const {
  if (from == 0) from = 1;
  if (witness_) return witness_(target, from);
  for (Index n = from; n - from < scan_cap; ++n)
    if (abs(term_(n)) >= target) return n;
  throw SearchCapError("no index with |x_n| >= " + to_string(target) + " among " + std::to_string(scan_cap) +
                       " indices from " + std::to_string(from));
}

std::vector<Rational> Sequence::prefix(Index n) const {
  std::vector<Rational> out;
  out.reserve(n);
  for (Index k = 1; k <= n; ++k) out.push_back(term_(k));
  return out;
}

namespace {

Rational from_index(Index n) { return ratio(n, 1); }

Index least_at_least_n(const Rational& target, Index from) { return std::max(from, ceil_index(target)); }

}  // namespace

Sequence bits_sequence(std::vector<char> bits, std::string spec) {
  auto data = std::make_shared<const std::vector<char>>(std::move(bits));
  return Sequence(
      std::move(spec),
      [data](Index n) { return Rational(n <= data->size() && (*data)[n - 1] ? 1 : 0); },
      GrowthEnvelope{Rational(1), 0});
}

Sequence prefix_sequence(std::vector<Rational> values, std::string spec) {
  Rational bound = 0;
  for (const auto& v : values)
    if (abs(v) > bound) bound = abs(v);
  auto data = std::make_shared<const std::vector<Rational>>(std::move(values));
  return Sequence(
      std::move(spec), [data](Index n) { return n <= data->size() ? (*data)[n - 1] : Rational(0); },
      GrowthEnvelope{bound, 0});
}

Sequence parse_sequence(std::string_view spec) {
  const std::string s(spec);
  if (s == "n")
    return Sequence(s, from_index, GrowthEnvelope{Rational(1), 1}, least_at_least_n);
  if (s == "signed-n")
    return Sequence(
        s, [](Index n) { return n % 2 == 0 ? from_index(n) : Rational(-from_index(n)); },
        GrowthEnvelope{Rational(1), 1}, least_at_least_n);
  if (s == "alt") return Sequence(s, [](Index n) { return Rational(n % 2 == 0 ? 1 : 0); }, GrowthEnvelope{1, 0});
  if (s == "alt10") return Sequence(s, [](Index n) { return Rational(n % 2 == 1 ? 1 : 0); }, GrowthEnvelope{1, 0});
  if (s == "one") return Sequence(s, [](Index) { return Rational(1); }, GrowthEnvelope{1, 0});
  if (s == "inv-n") return Sequence(s, [](Index n) { return ratio(1, n); }, GrowthEnvelope{1, 0});
  if (s == "squares-perturbed") {
    auto sq = squares();
    return Sequence(
        s, [sq](Index n) { return member(sq, n) ? from_index(n) : 1 + ratio(1, n); },
        GrowthEnvelope{Rational(2), 1}, [](const Rational& target, Index from) {
          // Least square r^2 >= max(from, target).
          Index lo = std::max(from, ceil_index(target));
          Index r = isqrt(lo);
          if (r * r < lo) ++r;
          Index sq_candidate = r * r;
          if (target > 2) return sq_candidate;
          // Non-square terms lie in (1, 2), so a small target may be met earlier.
          for (Index n = from; n < sq_candidate; ++n) {
            Index t = isqrt(n);
            Rational v = t * t == n ? from_index(n) : 1 + ratio(1, n);
            if (v >= target) return n;
          }
          return sq_candidate;
        });
  }
  if (s.rfind("const:", 0) == 0) {
    Rational c = parse_rational(std::string_view(s).substr(6));
    return Sequence(s, [c](Index) { return c; }, GrowthEnvelope{abs(c), 0});
  }
  if (s.rfind("indicator:", 0) == 0) {
    auto set = parse_set(std::string_view(s).substr(10));
    return Sequence(s, [set](Index n) { return Rational(member(set, n) ? 1 : 0); }, GrowthEnvelope{1, 0});
  }
  if (s.rfind("bits:", 0) == 0) {
    std::vector<char> bits;
    for (std::size_t i = 5; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw ParseError("bits may only contain 0 and 1", i);
      bits.push_back(static_cast<char>(s[i] - '0'));
    }
    return bits_sequence(std::move(bits), s);
  }
  throw ParseError("unknown sequence spec '" + s + "'", 0);
}

}  // namespace tauber
