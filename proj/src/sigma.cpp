#include "tauber/sigma.hpp"

#include <charconv>
#include <memory>
#include <numeric>

#include "tauber/errors.hpp"
#include "tauber/prng.hpp"

namespace tauber {
namespace {

std::string stem_text(const std::vector<Index>& stem) {
  std::string s = "{";
  for (std::size_t i = 0; i < stem.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(stem[i]);
  }
  return s + "}";
}

Index parse_index(std::string_view text, std::size_t offset) {
  Index v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ParseError("expected a non-negative integer, got '" + std::string(text) + "'", offset);
  return v;
}

std::pair<std::string, std::function<Index(Index)>> named_map(std::string_view name, std::size_t offset) {
  if (name == "even") return {"even", [](Index n) { return 2 * n; }};
  if (name == "odd") return {"odd", [](Index n) { return 2 * n - 1; }};
  if (name == "succ") return {"succ", [](Index n) { return n + 1; }};
  if (name == "even-plus") return {"even-plus", [](Index n) { return 2 * n + 2; }};
  if (name == "squares") {
    return {"squares", [](Index n) {
              if (n > 4'000'000'000ULL) throw SearchCapError("squares selector index overflows");
              return n * n;
            }};
  }
  if (name == "powers2") {
    return {"powers2", [](Index n) {
              if (n > 62) throw SearchCapError("powers2 selector index beyond 62");
              return Index{1} << n;
            }};
  }
  if (name.starts_with("shift:")) {
    Index k = parse_index(name.substr(6), offset + 6);
    return {"shift:" + std::to_string(k), [k](Index n) { return n + k; }};
  }
  throw ParseError("unknown selector generator '" + std::string(name) + "'", offset);
}

// Enumerates a Filtered tail from its start.
class FilterCursor {
 public:
  explicit FilterCursor(const selector_tail::Filtered& f) : f_(f), next_(f.from) {}
  Index advance() {
    for (Index scanned = 0; scanned < kSelectorScanCap; ++scanned, ++next_) {
      if (f_.keep(next_)) return next_++;
    }
    throw SearchCapError("selector tail '" + f_.name + "' produced no element within the scan cap");
  }

 private:
  const selector_tail::Filtered& f_;
  Index next_;
};

}  // namespace

Selector::Selector(std::vector<Index> stem, SelectorTail tail) : stem_(std::move(stem)), tail_(std::move(tail)) {
  for (std::size_t i = 0; i < stem_.size(); ++i) {
    if (stem_[i] == 0) throw PreconditionError("selector values start at 1");
    if (i && stem_[i] <= stem_[i - 1]) throw PreconditionError("selector stem is not strictly increasing");
  }
  const Index last = stem_.empty() ? 0 : stem_.back();
  const Index j = stem_.size();
  if (auto* c = std::get_if<selector_tail::Consecutive>(&tail_)) {
    if (c->from <= last || c->from == 0) throw PreconditionError("consecutive tail must start above the stem");
  } else if (auto* m = std::get_if<selector_tail::Mapped>(&tail_)) {
    if (m->f(j + 1) <= last || m->f(j + 1) == 0)
      throw PreconditionError("generator tail '" + m->name + "' does not continue the stem increasingly");
  } else if (auto* f = std::get_if<selector_tail::Filtered>(&tail_)) {
    if (f->from <= last || f->from == 0) throw PreconditionError("filtered tail must start above the stem");
  }
}

Index Selector::operator()(Index n) const {
  if (n == 0) throw PreconditionError("selector index starts at 1");
  if (n <= stem_.size()) return stem_[n - 1];
  const Index s = n - stem_.size();
  return std::visit(
      [&](const auto& t) -> Index {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, selector_tail::None>) {
          throw PreconditionError("finite-prefix selector exhausted at index " + std::to_string(n));
        } else if constexpr (std::is_same_v<T, selector_tail::Consecutive>) {
          return t.from + s - 1;
        } else if constexpr (std::is_same_v<T, selector_tail::Mapped>) {
          return t.f(n);
        } else {
          FilterCursor cur(t);
          Index v = 0;
          for (Index i = 0; i < s; ++i) v = cur.advance();
          return v;
        }
      },
      tail_);
}

std::vector<Index> Selector::prefix(Index n) const {
  std::vector<Index> out;
  out.reserve(n);
  for (Index i = 1; i <= std::min<Index>(n, stem_.size()); ++i) out.push_back(stem_[i - 1]);
  if (out.size() == n) return out;
  if (auto* f = std::get_if<selector_tail::Filtered>(&tail_)) {
    FilterCursor cur(*f);
    while (out.size() < n) out.push_back(cur.advance());
    return out;
  }
  for (Index i = out.size() + 1; i <= n; ++i) out.push_back((*this)(i));
  return out;
}

bool Selector::in_image(Index i) const {
  for (Index t : stem_)
    if (t == i) return true;
  const Index last = stem_.empty() ? 0 : stem_.back();
  if (i <= last) return false;
  return std::visit(
      [&](const auto& t) -> bool {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, selector_tail::None>) {
          throw UnsupportedError("finite selector cannot decide image membership of " + std::to_string(i));
        } else if constexpr (std::is_same_v<T, selector_tail::Consecutive>) {
          return i >= t.from;
        } else if constexpr (std::is_same_v<T, selector_tail::Mapped>) {
          // σ(n) >= n, so scanning n <= i decides.
          for (Index n = stem_.size() + 1; n <= i; ++n) {
            Index v = t.f(n);
            if (v == i) return true;
            if (v > i) return false;
          }
          return false;
        } else {
          return i >= t.from && t.keep(i);
        }
      },
      tail_);
}

std::vector<Index> Selector::image_upto(Index k) const {
  std::vector<Index> out;
  for (Index t : stem_)
    if (t <= k) out.push_back(t);
  const Index last = stem_.empty() ? 0 : stem_.back();
  if (last >= k) return out;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, selector_tail::None>) {
          throw UnsupportedError("finite selector cannot decide its image beyond " + std::to_string(last));
        } else if constexpr (std::is_same_v<T, selector_tail::Consecutive>) {
          for (Index i = t.from; i <= k; ++i) out.push_back(i);
        } else if constexpr (std::is_same_v<T, selector_tail::Mapped>) {
          for (Index n = stem_.size() + 1;; ++n) {
            Index v = t.f(n);
            if (v > k) break;
            out.push_back(v);
          }
        } else {
          for (Index i = t.from; i <= k; ++i)
            if (t.keep(i)) out.push_back(i);
        }
      },
      tail_);
  return out;
}

std::string Selector::spec() const {
  const std::string tail = std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, selector_tail::None>) return "";
        else if constexpr (std::is_same_v<T, selector_tail::Consecutive>) return "+consec:" + std::to_string(t.from);
        else if constexpr (std::is_same_v<T, selector_tail::Mapped>) return "+gen:" + t.name;
        else return "+" + t.name;
      },
      tail_);
  if (stem_.empty()) {
    if (auto* c = std::get_if<selector_tail::Consecutive>(&tail_); c && c->from == 1) return "id";
    if (auto* m = std::get_if<selector_tail::Mapped>(&tail_)) return m->name == "even" ? "even" : "gen:" + m->name;
    if (auto* f = std::get_if<selector_tail::Filtered>(&tail_); f && f->from == 1) return f->name;
  }
  return "stem:" + stem_text(stem_) + tail;
}

Selector identity_selector() { return Selector({}, selector_tail::Consecutive{1}); }

Selector consecutive_after(std::vector<Index> stem) {
  Index from = stem.empty() ? 1 : stem.back() + 1;
  return Selector(std::move(stem), selector_tail::Consecutive{from});
}

Selector bernoulli_selector(std::vector<Index> stem, std::uint64_t seed, const Rational& p, Index from) {
  if (p <= 0 || p > 1) throw PreconditionError("Bernoulli tail needs 0 < p <= 1");
  std::string name = "random:" + std::to_string(seed) + ":" + to_string(p);
  if (from != 1 && !(stem.empty() ? false : from == stem.back() + 1)) name += "@" + std::to_string(from);
  return Selector(std::move(stem), selector_tail::Filtered{
                                       std::move(name), [seed, p](Index m) { return bernoulli_draw(seed, m, p); },
                                       from});
}

Selector parse_selector(std::string_view spec) {
  if (spec == "id") return identity_selector();
  if (spec == "even") return Selector({}, selector_tail::Mapped{"even", [](Index n) { return 2 * n; }});
  auto parse_random = [](std::string_view body, std::size_t offset, std::uint64_t& seed, Rational& p,
                         std::optional<Index>& from) {
    if (auto at = body.find('@'); at != std::string_view::npos) {
      from = parse_index(body.substr(at + 1), offset + at + 1);
      body = body.substr(0, at);
    }
    auto colon = body.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected random:<seed>:<p>", offset);
    seed = parse_index(body.substr(0, colon), offset);
    try {
      p = parse_rational(body.substr(colon + 1));
    } catch (const Error&) {
      throw ParseError("bad probability '" + std::string(body.substr(colon + 1)) + "'", offset + colon + 1);
    }
    if (p <= 0 || p > 1) throw ParseError("probability must lie in (0, 1]", offset + colon + 1);
  };
  if (spec.starts_with("gen:")) {
    auto [name, f] = named_map(spec.substr(4), 4);
    return Selector({}, selector_tail::Mapped{name, f});
  }
  if (spec.starts_with("random:")) {
    std::uint64_t seed = 0;
    Rational p;
    std::optional<Index> from;
    parse_random(spec.substr(7), 7, seed, p, from);
    return bernoulli_selector({}, seed, p, from.value_or(1));
  }
  if (!spec.starts_with("stem:{")) throw ParseError("unknown selector '" + std::string(spec) + "'", 0);
  auto close = spec.find('}');
  if (close == std::string_view::npos) throw ParseError("unterminated stem", spec.size());
  std::vector<Index> stem;
  std::string_view body = spec.substr(6, close - 6);
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    Index v = parse_index(item, 6 + pos);
    if (v == 0 || (!stem.empty() && v <= stem.back()))
      throw ParseError("stem must be strictly increasing positive integers", 6 + pos);
    stem.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  std::string_view rest = spec.substr(close + 1);
  const std::size_t rest_at = close + 1;
  const Index last = stem.empty() ? 0 : stem.back();
  if (rest.empty()) return Selector(std::move(stem), selector_tail::None{});
  if (rest == "+consec") return consecutive_after(std::move(stem));
  if (rest.starts_with("+consec:")) {
    Index from = parse_index(rest.substr(8), rest_at + 8);
    if (from <= last) throw ParseError("consecutive tail must start above the stem", rest_at + 8);
    return Selector(std::move(stem), selector_tail::Consecutive{from});
  }
  if (rest.starts_with("+gen:")) {
    auto [name, f] = named_map(rest.substr(5), rest_at + 5);
    try {
      return Selector(std::move(stem), selector_tail::Mapped{name, f});
    } catch (const PreconditionError& e) {
      throw ParseError(e.what(), rest_at);
    }
  }
  if (rest.starts_with("+random:")) {
    std::uint64_t seed = 0;
    Rational p;
    std::optional<Index> from;
    parse_random(rest.substr(8), rest_at + 8, seed, p, from);
    if (from && *from <= last) throw ParseError("random tail must start above the stem", rest_at);
    return bernoulli_selector(std::move(stem), seed, p, from.value_or(last + 1));
  }
  throw ParseError("unknown selector tail '" + std::string(rest) + "'", rest_at);
}

std::vector<Rational> apply_selector(const Selector& s, const Sequence& x, Index N) {
  std::vector<Rational> y;
  y.reserve(N);
  for (Index idx : s.prefix(N)) y.push_back(x(idx));
  return y;
}

Sequence subsequence(const Sequence& x, const Selector& s, Index horizon) {
  auto cached = std::make_shared<const std::vector<Index>>(s.prefix(horizon));
  std::optional<GrowthEnvelope> env;
  if (x.sup_norm()) env = GrowthEnvelope{*x.sup_norm(), 0};
  return Sequence(x.spec() + "@" + s.spec(), [x, s, cached](Index n) {
    return x(n <= cached->size() ? (*cached)[n - 1] : s(n));
  }, env);
}

MetricInterval metric(const Selector& a, const Selector& b, Index K) {
  if (K == 0 || K > 4096) throw PreconditionError("metric resolution must lie in [1, 4096]");
  auto ia = a.image_upto(K), ib = b.image_upto(K);
  std::vector<char> in(K + 1, 0);
  for (Index i : ia) in[i] ^= 1;
  for (Index i : ib) in[i] ^= 1;
  // Sum 2^{K-i} over the difference as an integer, then scale once.
  Integer num = 0;
  for (Index i = 1; i <= K; ++i)
    if (in[i]) num += pow2(static_cast<unsigned>(K - i));
  Rational lo = Rational(num) * pow2_inv(static_cast<unsigned>(K));
  lo.canonicalize();
  return {lo, lo + pow2_inv(static_cast<unsigned>(K)), K};
}

bool ball_contains(const std::vector<Index>& stem, const Selector& s) {
  for (std::size_t i = 0; i < stem.size(); ++i)
    if (s(i + 1) != stem[i]) return false;
  return true;
}

SummableRow geometric_row() {
  return {"geometric", [](Index k) { return pow2_inv(static_cast<unsigned>(k)); },
          [](Index k) { return pow2_inv(static_cast<unsigned>(k)); }};
}

SummableRow finite_row(std::vector<Rational> entries) {
  auto data = std::make_shared<const std::vector<Rational>>(std::move(entries));
  std::string spec = "finite:" + std::to_string(data->size());
  return {spec, [data](Index k) { return k >= 1 && k <= data->size() ? (*data)[k - 1] : Rational(0); },
          [data](Index k) {
            Rational t = 0;
            for (Index i = k + 1; i <= data->size(); ++i) t += abs((*data)[i - 1]);
            return t;
          }};
}

Rational Modulus::anchored_delta(const Selector& s) const {
  if (degenerate || k0 == 0) return delta;
  return pow2_inv(static_cast<unsigned>(s(k0)));
}

Modulus modulus_of_continuity(const Rational& sup_norm, const SummableRow& a, const Rational& eps, Index k_cap) {
  if (eps <= 0) throw PreconditionError("epsilon must be positive");
  if (sup_norm < 0) throw PreconditionError("sup norm must be non-negative");
  if (sup_norm == 0) return Modulus{0, Rational(2), true};
  const Rational target = eps / (2 * sup_norm);
  for (Index k = 0; k <= k_cap; ++k) {
    if (a.tail(k) < target) return Modulus{k, pow2_inv(static_cast<unsigned>(k)), false};
  }
  throw SearchCapError("row tail stays above epsilon/(2||x||) up to k = " + std::to_string(k_cap));
}

Enclosure functional_enclosure(const SummableRow& a, const Selector& s, const Sequence& x, const Rational& sup_norm,
                               Index K) {
  Rational sum = 0;
  const auto idx = s.prefix(K);
  for (Index k = 1; k <= K; ++k) sum += a.entry(k) * x(idx[k - 1]);
  Rational slack = sup_norm * a.tail(K);
  return {sum - slack, sum + slack};
}

ModulusPairCheck check_modulus_pair(const SummableRow& a, const Sequence& x, const Rational& sup_norm,
                                    const Rational& eps, const Rational& radius, const Selector& s1,
                                    const Selector& s2, Index K) {
  ModulusPairCheck out;
  out.distance = metric(s1, s2, K);
  out.in_scope = out.distance.hi < radius;
  auto e1 = functional_enclosure(a, s1, x, sup_norm, K);
  auto e2 = functional_enclosure(a, s2, x, sup_norm, K);
  Rational hi = std::max(Rational(e1.hi - e2.lo), Rational(e2.hi - e1.lo));
  Rational lo = std::max({Rational(e1.lo - e2.hi), Rational(e2.lo - e1.hi), Rational(0)});
  out.gap = {lo, hi};
  if (hi < eps) out.result = ContractCheck::Holds;
  else if (lo >= eps) out.result = ContractCheck::Violated;
  else out.result = ContractCheck::Inconclusive;
  return out;
}

Selector sample_selector(std::uint64_t seed, const Rational& p, Index N) {
  if (p <= 0 || p >= 1) throw PreconditionError("sample_selector needs 0 < p < 1");
  std::vector<Index> stem;
  for (Index n = 1; n <= N; ++n)
    if (bernoulli_draw(seed, n, p)) stem.push_back(n);
  return Selector(std::move(stem), selector_tail::None{});
}

}  // namespace tauber
