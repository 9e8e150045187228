#include "tauber/setlang.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <ostream>

#include "tauber/errors.hpp"

namespace tauber {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

SetDescription make(auto value) { return SetDescription(std::make_shared<const SetNode>(SetNode{std::move(value)})); }

constexpr Index kMaxPeriod = Index{1} << 20;
constexpr Index kMaxPeriodicWindow = Index{1} << 24;
constexpr unsigned kMaxBlockIndex = 62;

Index floor_log2(Index n) { return 63 - static_cast<Index>(__builtin_clzll(n)); }

void require_enumerable(Index n) {
  if (n > kEnumerationCap)
    throw ScaleCapError("enumeration up to " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(kEnumerationCap));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SetDescription parse_all() {
    skip_spaces();
    if (pos_ == text_.size()) throw ParseError("empty set description", 0);
    auto s = parse();
    skip_spaces();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return s;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_spaces() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view lit) {
    if (!consume(lit)) fail("expected '" + std::string(lit) + "'");
  }

  std::int64_t parse_int() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected integer");
    }
    std::int64_t value = 0;
    const char* first = text_.data() + (text_[start] == '+' ? start + 1 : start);
    auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("integer out of range");
    }
    return value;
  }

  Index parse_positive() {
    std::size_t start = pos_;
    std::int64_t v = parse_int();
    if (v < 1) {
      pos_ = start;
      fail("expected positive integer");
    }
    return static_cast<Index>(v);
  }

  SetDescription parse() {
    if (consume("finite:{")) return parse_finite_body();
    if (consume("ap:")) {
      Index a = parse_positive();
      expect(",");
      Index q = parse_positive();
      return progression(a, q);
    }
    if (consume("builtin:")) return parse_builtin();
    if (consume("complement:")) return complement(parse());
    if (consume("union:")) {
      auto l = parse();
      expect("|");
      return set_union(std::move(l), parse());
    }
    if (consume("intersect:")) {
      auto l = parse();
      expect("|");
      return intersection(std::move(l), parse());
    }
    if (consume("shift:")) {
      auto inner = parse();
      expect(",");
      return shift(std::move(inner), parse_int());
    }
    fail("expected set expression");
  }

  SetDescription parse_finite_body() {
    std::vector<Index> out;
    skip_spaces();
    if (consume("}")) return finite_set({});
    for (;;) {
      skip_spaces();
      std::size_t start = pos_;
      Index lo = parse_positive();
      Index hi = lo;
      if (consume("..")) hi = parse_positive();
      if (hi < lo || (!out.empty() && lo <= out.back())) {
        pos_ = start;
        fail("finite elements must be strictly increasing");
      }
      if (hi - lo > kEnumerationCap) {
        pos_ = start;
        fail("finite range too long");
      }
      for (Index v = lo; v <= hi; ++v) out.push_back(v);
      skip_spaces();
      if (consume("}")) break;
      expect(",");
    }
    return finite_set(std::move(out));
  }

  SetDescription parse_builtin() {
    if (consume("squares")) return squares();
    if (consume("powers2")) return powers_of_two();
    if (consume("nu2_ge(")) {
      std::size_t start = pos_;
      std::int64_t c = parse_int();
      if (c < 0 || c > 64) {
        pos_ = start;
        fail("nu2_ge bound must lie in [0, 64]");
      }
      expect(")");
      return nu2_at_least(static_cast<unsigned>(c));
    }
    if (consume("dyadic_blocks(")) {
      auto sel = parse();
      expect(")");
      return dyadic_blocks(std::move(sel));
    }
    fail("unknown builtin");
  }
};

void render_into(std::string& out, const SetDescription& s) {
  std::visit(Overloaded{
                 [&](const set_node::Finite& f) {
                   out += "finite:{";
                   const auto& e = f.elements;
                   for (std::size_t i = 0; i < e.size();) {
                     std::size_t j = i;
                     while (j + 1 < e.size() && e[j + 1] == e[j] + 1) ++j;
                     if (i > 0) out += ",";
                     if (j - i >= 2) {
                       out += std::to_string(e[i]) + ".." + std::to_string(e[j]);
                       i = j + 1;
                     } else {
                       out += std::to_string(e[i]);
                       ++i;
                     }
                   }
                   out += "}";
                 },
                 [&](const set_node::Progression& p) {
                   out += "ap:" + std::to_string(p.first) + "," + std::to_string(p.step);
                 },
                 [&](const set_node::Squares&) { out += "builtin:squares"; },
                 [&](const set_node::Powers2&) { out += "builtin:powers2"; },
                 [&](const set_node::Nu2AtLeast& v) { out += "builtin:nu2_ge(" + std::to_string(v.min_valuation) + ")"; },
                 [&](const set_node::DyadicBlocks& d) {
                   out += "builtin:dyadic_blocks(";
                   render_into(out, d.selector);
                   out += ")";
                 },
                 [&](const set_node::Complement& c) {
                   out += "complement:";
                   render_into(out, c.inner);
                 },
                 [&](const set_node::Union& u) {
                   out += "union:";
                   render_into(out, u.left);
                   out += "|";
                   render_into(out, u.right);
                 },
                 [&](const set_node::Intersection& u) {
                   out += "intersect:";
                   render_into(out, u.left);
                   out += "|";
                   render_into(out, u.right);
                 },
                 [&](const set_node::Shift& sh) {
                   out += "shift:";
                   render_into(out, sh.inner);
                   out += "," + std::to_string(sh.offset);
                 },
             },
             s.node().value);
}

std::optional<Periodicity> periodicity(const SetDescription& s);

/// Count of members in [from, to] by direct membership tests.
Index count_range(const SetDescription& s, Index from, Index to) {
  Index c = 0;
  for (Index m = from; m <= to; ++m) c += member(s, m) ? 1 : 0;
  return c;
}

std::optional<Index> periodic_count(const SetDescription& s, Index n) {
  auto p = periodicity(s);
  if (!p || p->threshold + p->period > kMaxPeriodicWindow) return std::nullopt;
  const Index t = p->threshold;
  const Index period = p->period;
  if (n < t + period) return count_range(s, 1, n);
  Index head = count_range(s, 1, t - 1);
  Index per = count_range(s, t, t + period - 1);
  Index span = n - t + 1;
  Index tail = count_range(s, t, t + span % period - 1);
  return head + (span / period) * per + tail;
}

Index enumerate_count(const SetDescription& s, Index n) {
  require_enumerable(n);
  auto bits = indicator(s, n);
  return static_cast<Index>(std::count(bits.begin() + 1, bits.end(), char{1}));
}

bool has_closed_count(const SetDescription& s) {
  return std::visit(Overloaded{
                        [&](const set_node::Complement& c) { return has_closed_count(c.inner); },
                        [&](const set_node::Shift& sh) { return has_closed_count(sh.inner); },
                        [&](const set_node::Union&) {
                          auto p = periodicity(s);
                          return p && p->threshold + p->period <= kMaxPeriodicWindow;
                        },
                        [&](const set_node::Intersection&) {
                          auto p = periodicity(s);
                          return p && p->threshold + p->period <= kMaxPeriodicWindow;
                        },
                        [](const auto&) { return true; },
                    },
                    s.node().value);
}

std::optional<Index> finite_max_block(const SetDescription& selector) {
  for (unsigned q = kMaxBlockIndex; q >= 1; --q)
    if (member(selector, q)) return q;
  return std::nullopt;
}

std::optional<Periodicity> periodicity(const SetDescription& s) {
  return std::visit(
      Overloaded{
          [](const set_node::Finite& f) -> std::optional<Periodicity> {
            return Periodicity{1, f.elements.empty() ? 1 : f.elements.back() + 1};
          },
          [](const set_node::Progression& p) -> std::optional<Periodicity> {
            if (p.step > kMaxPeriod) return std::nullopt;
            return Periodicity{p.step, p.first};
          },
          [](const set_node::Squares&) -> std::optional<Periodicity> { return std::nullopt; },
          [](const set_node::Powers2&) -> std::optional<Periodicity> { return std::nullopt; },
          [](const set_node::Nu2AtLeast& v) -> std::optional<Periodicity> {
            if (v.min_valuation > 20) return std::nullopt;
            return Periodicity{Index{1} << v.min_valuation, 1};
          },
          [](const set_node::DyadicBlocks& d) -> std::optional<Periodicity> {
            auto facts = analyze(d.selector);
            if (facts.finite != Tri::Yes) return std::nullopt;
            auto top = finite_max_block(d.selector);
            if (!top) return Periodicity{1, 1};
            if (*top > 40) return std::nullopt;
            return Periodicity{1, Index{1} << (*top + 1)};
          },
          [](const set_node::Complement& c) { return periodicity(c.inner); },
          [](const set_node::Shift& sh) -> std::optional<Periodicity> {
            auto p = periodicity(sh.inner);
            if (!p) return std::nullopt;
            std::int64_t t = static_cast<std::int64_t>(p->threshold) + sh.offset;
            return Periodicity{p->period, static_cast<Index>(std::max<std::int64_t>(1, t))};
          },
          [](const auto& bin) -> std::optional<Periodicity> {
            auto a = periodicity(bin.left);
            auto b = periodicity(bin.right);
            if (!a || !b) return std::nullopt;
            Index l = std::lcm(a->period, b->period);
            if (l > kMaxPeriod) return std::nullopt;
            return Periodicity{l, std::max(a->threshold, b->threshold)};
          },
      },
      s.node().value);
}

RationalInterval point(const Rational& v) { return {v, v}; }

Rational min_q(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational max_q(const Rational& a, const Rational& b) { return a < b ? b : a; }

void normalize(SetFacts& f) {
  if (f.finite == Tri::Yes) {
    f.cofinite = Tri::No;
    f.lower_density = f.upper_density = f.upper_banach = point(0);
    return;
  }
  if (f.cofinite == Tri::Yes) {
    f.finite = Tri::No;
    f.lower_density = f.upper_density = f.upper_banach = point(1);
    return;
  }
  f.upper_density.lo = max_q(f.upper_density.lo, f.lower_density.lo);
  f.lower_density.hi = min_q(f.lower_density.hi, f.upper_density.hi);
  f.upper_banach.lo = max_q(f.upper_banach.lo, f.upper_density.lo);
  f.upper_density.hi = min_q(f.upper_density.hi, f.upper_banach.hi);
  if (f.upper_density.lo > 0) f.finite = Tri::No;
  if (f.lower_density.hi < 1) f.cofinite = Tri::No;
}

SetFacts complement_facts(const SetFacts& a) {
  SetFacts f;
  f.periodic = a.periodic;
  f.finite = a.cofinite;
  f.cofinite = a.finite;
  f.lower_density = {1 - a.upper_density.hi, 1 - a.upper_density.lo};
  f.upper_density = {1 - a.lower_density.hi, 1 - a.lower_density.lo};
  f.upper_banach = {f.upper_density.lo, Rational(1)};
  normalize(f);
  return f;
}

SetFacts union_facts(const SetFacts& a, const SetFacts& b) {
  SetFacts f;
  if (a.finite == Tri::Yes && b.finite == Tri::Yes)
    f.finite = Tri::Yes;
  else if (a.finite == Tri::No || b.finite == Tri::No)
    f.finite = Tri::No;
  if (a.cofinite == Tri::Yes || b.cofinite == Tri::Yes) f.cofinite = Tri::Yes;
  f.lower_density.lo = max_q(a.lower_density.lo, b.lower_density.lo);
  f.lower_density.hi = min_q(Rational(1), min_q(a.lower_density.hi + b.upper_density.hi,
                                                a.upper_density.hi + b.lower_density.hi));
  f.upper_density.lo = max_q(a.upper_density.lo, b.upper_density.lo);
  f.upper_density.hi = min_q(Rational(1), a.upper_density.hi + b.upper_density.hi);
  f.upper_banach.lo = max_q(a.upper_banach.lo, b.upper_banach.lo);
  f.upper_banach.hi = min_q(Rational(1), a.upper_banach.hi + b.upper_banach.hi);
  normalize(f);
  return f;
}

SetFacts intersection_facts(const SetFacts& a, const SetFacts& b) {
  SetFacts f = complement_facts(union_facts(complement_facts(a), complement_facts(b)));
  f.upper_banach = {f.upper_density.lo, min_q(a.upper_banach.hi, b.upper_banach.hi)};
  normalize(f);
  return f;
}

SetFacts zero_density_infinite() {
  SetFacts f;
  f.finite = Tri::No;
  f.cofinite = Tri::No;
  f.lower_density = f.upper_density = f.upper_banach = point(0);
  return f;
}

}  // namespace

bool operator==(const SetDescription& a, const SetDescription& b) { return render(a) == render(b); }

SetDescription finite_set(std::vector<Index> elements) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] == 0) throw std::invalid_argument("finite set elements must be >= 1");
    if (i > 0 && elements[i] <= elements[i - 1])
      throw std::invalid_argument("finite set elements must be strictly increasing");
  }
  return make(set_node::Finite{std::move(elements)});
}

SetDescription progression(Index first, Index step) {
  if (first == 0 || step == 0) throw std::invalid_argument("progression needs first >= 1 and step >= 1");
  return make(set_node::Progression{first, step});
}

SetDescription naturals() { return progression(1, 1); }
SetDescription squares() { return make(set_node::Squares{}); }
SetDescription powers_of_two() { return make(set_node::Powers2{}); }
SetDescription nu2_at_least(unsigned c) { return make(set_node::Nu2AtLeast{c}); }
SetDescription dyadic_blocks(SetDescription selector) { return make(set_node::DyadicBlocks{std::move(selector)}); }
SetDescription complement(SetDescription s) { return make(set_node::Complement{std::move(s)}); }
SetDescription set_union(SetDescription a, SetDescription b) { return make(set_node::Union{std::move(a), std::move(b)}); }
SetDescription intersection(SetDescription a, SetDescription b) {
  return make(set_node::Intersection{std::move(a), std::move(b)});
}
SetDescription shift(SetDescription s, std::int64_t offset) { return make(set_node::Shift{std::move(s), offset}); }

SetDescription parse_set(std::string_view text) { return Parser(text).parse_all(); }

std::string render(const SetDescription& s) {
  std::string out;
  render_into(out, s);
  return out;
}

bool member(const SetDescription& s, Index n) {
  if (n == 0) return false;
  return std::visit(Overloaded{
                        [&](const set_node::Finite& f) {
                          return std::binary_search(f.elements.begin(), f.elements.end(), n);
                        },
                        [&](const set_node::Progression& p) { return n >= p.first && (n - p.first) % p.step == 0; },
                        [&](const set_node::Squares&) {
                          Index r = isqrt(n);
                          return r * r == n;
                        },
                        [&](const set_node::Powers2&) { return (n & (n - 1)) == 0; },
                        [&](const set_node::Nu2AtLeast& v) { return nu2(n) >= v.min_valuation; },
                        [&](const set_node::DyadicBlocks& d) {
                          Index q = floor_log2(n);
                          return q >= 1 && member(d.selector, q);
                        },
                        [&](const set_node::Complement& c) { return !member(c.inner, n); },
                        [&](const set_node::Union& u) { return member(u.left, n) || member(u.right, n); },
                        [&](const set_node::Intersection& u) { return member(u.left, n) && member(u.right, n); },
                        [&](const set_node::Shift& sh) {
                          std::int64_t m = static_cast<std::int64_t>(n) - sh.offset;
                          return m >= 1 && member(sh.inner, static_cast<Index>(m));
                        },
                    },
                    s.node().value);
}

Index count_prefix(const SetDescription& s, Index n) {
  if (n == 0) return 0;
  return std::visit(
      Overloaded{
          [&](const set_node::Finite& f) {
            return static_cast<Index>(std::upper_bound(f.elements.begin(), f.elements.end(), n) - f.elements.begin());
          },
          [&](const set_node::Progression& p) { return n < p.first ? Index{0} : (n - p.first) / p.step + 1; },
          [&](const set_node::Squares&) { return isqrt(n); },
          [&](const set_node::Powers2&) { return floor_log2(n) + 1; },
          [&](const set_node::Nu2AtLeast& v) { return v.min_valuation >= 64 ? Index{0} : n >> v.min_valuation; },
          [&](const set_node::DyadicBlocks& d) {
            Index c = 0;
            Index top = floor_log2(n);
            for (Index q = 1; q <= top; ++q) {
              if (!member(d.selector, q)) continue;
              Index lo = Index{1} << q;
              Index hi = q == 63 ? ~Index{0} : (Index{1} << (q + 1)) - 1;
              c += std::min(hi, n) - lo + 1;
            }
            return c;
          },
          [&](const set_node::Complement& c) { return n - count_prefix(c.inner, n); },
          [&](const set_node::Shift& sh) {
            if (sh.offset >= 0) {
              auto k = static_cast<Index>(sh.offset);
              return n > k ? count_prefix(sh.inner, n - k) : Index{0};
            }
            auto k = static_cast<Index>(-sh.offset);
            return count_prefix(sh.inner, n + k) - count_prefix(sh.inner, k);
          },
          [&](const auto&) {
            if (auto c = periodic_count(s, n)) return *c;
            return enumerate_count(s, n);
          },
      },
      s.node().value);
}

std::vector<char> indicator(const SetDescription& s, Index n) {
  require_enumerable(n);
  std::vector<char> bits(n + 1, 0);
  std::visit(Overloaded{
                 [&](const set_node::Finite& f) {
                   for (Index e : f.elements) {
                     if (e > n) break;
                     bits[e] = 1;
                   }
                 },
                 [&](const set_node::Progression& p) {
                   for (Index m = p.first; m <= n; m += p.step) bits[m] = 1;
                 },
                 [&](const set_node::Squares&) {
                   for (Index r = 1; r * r <= n; ++r) bits[r * r] = 1;
                 },
                 [&](const set_node::Powers2&) {
                   for (Index m = 1; m <= n; m *= 2) bits[m] = 1;
                 },
                 [&](const set_node::Nu2AtLeast& v) {
                   if (v.min_valuation >= 64) return;
                   Index step = Index{1} << v.min_valuation;
                   for (Index m = step; m <= n; m += step) bits[m] = 1;
                 },
                 [&](const set_node::DyadicBlocks& d) {
                   for (Index q = 1; (Index{1} << q) <= n; ++q) {
                     if (!member(d.selector, q)) continue;
                     Index hi = std::min(n, (Index{1} << (q + 1)) - 1);
                     for (Index m = Index{1} << q; m <= hi; ++m) bits[m] = 1;
                   }
                 },
                 [&](const set_node::Complement& c) {
                   bits = indicator(c.inner, n);
                   for (Index m = 1; m <= n; ++m) bits[m] = static_cast<char>(!bits[m]);
                 },
                 [&](const set_node::Union& u) {
                   bits = indicator(u.left, n);
                   auto r = indicator(u.right, n);
                   for (Index m = 1; m <= n; ++m) bits[m] = static_cast<char>(bits[m] | r[m]);
                 },
                 [&](const set_node::Intersection& u) {
                   bits = indicator(u.left, n);
                   auto r = indicator(u.right, n);
                   for (Index m = 1; m <= n; ++m) bits[m] = static_cast<char>(bits[m] & r[m]);
                 },
                 [&](const set_node::Shift& sh) {
                   if (sh.offset >= 0) {
                     auto k = static_cast<Index>(sh.offset);
                     if (n <= k) return;
                     auto inner = indicator(sh.inner, n - k);
                     for (Index m = 1; m <= n - k; ++m) bits[m + k] = inner[m];
                   } else {
                     auto k = static_cast<Index>(-sh.offset);
                     auto inner = indicator(sh.inner, n + k);
                     for (Index m = 1; m <= n; ++m) bits[m] = inner[m + k];
                   }
                 },
             },
             s.node().value);
  bits[0] = 0;
  return bits;
}

std::vector<Index> elements_upto(const SetDescription& s, Index n) {
  std::vector<Index> out;
  if (const auto* f = std::get_if<set_node::Finite>(&s.node().value)) {
    for (Index e : f->elements)
      if (e <= n) out.push_back(e);
    return out;
  }
  auto bits = indicator(s, n);
  for (Index m = 1; m <= n; ++m)
    if (bits[m]) out.push_back(m);
  return out;
}

std::optional<Rational> SetFacts::density() const {
  if (lower_density.lo == upper_density.hi) return lower_density.lo;
  return std::nullopt;
}

std::optional<Rational> periodic_density(const SetDescription& s) {
  auto p = periodicity(s);
  if (!p) return std::nullopt;
  Index per = count_range(s, p->threshold, p->threshold + p->period - 1);
  Rational d = ratio(per, p->period);
  return d;
}

SetFacts analyze(const SetDescription& s) {
  if (auto p = periodicity(s)) {
    SetFacts f;
    f.periodic = p;
    Index per = count_range(s, p->threshold, p->threshold + p->period - 1);
    Rational d = ratio(per, p->period);
    f.finite = per == 0 ? Tri::Yes : Tri::No;
    f.cofinite = per == p->period ? Tri::Yes : Tri::No;
    f.lower_density = f.upper_density = f.upper_banach = point(d);
    return f;
  }
  return std::visit(Overloaded{
                        [](const set_node::Squares&) { return zero_density_infinite(); },
                        [](const set_node::Powers2&) { return zero_density_infinite(); },
                        [](const set_node::Nu2AtLeast& v) {
                          SetFacts f;
                          f.finite = Tri::No;
                          f.cofinite = Tri::No;
                          f.lower_density = f.upper_density = f.upper_banach = point(pow2_inv(v.min_valuation));
                          return f;
                        },
                        [](const set_node::DyadicBlocks& d) {
                          SetFacts sel = analyze(d.selector);
                          SetFacts f;
                          f.finite = sel.finite;
                          f.cofinite = sel.cofinite;
                          if (sel.finite == Tri::No) {
                            // Each contained block [2^q, 2^{q+1}) puts density >= 1/2 at its right edge.
                            f.upper_density.lo = Rational(1, 2);
                            f.upper_banach = point(1);
                          }
                          if (sel.cofinite == Tri::No) f.lower_density.hi = Rational(1, 2);
                          normalize(f);
                          return f;
                        },
                        [](const set_node::Complement& c) { return complement_facts(analyze(c.inner)); },
                        [](const set_node::Shift& sh) {
                          SetFacts f = analyze(sh.inner);
                          f.periodic.reset();
                          return f;
                        },
                        [](const set_node::Union& u) { return union_facts(analyze(u.left), analyze(u.right)); },
                        [](const set_node::Intersection& u) {
                          return intersection_facts(analyze(u.left), analyze(u.right));
                        },
                        [](const auto&) { return SetFacts{}; },
                    },
                    s.node().value);
}

Rational max_window_density(const std::vector<char>& bitmap, Index n, Index len) {
  if (len == 0 || len > n) throw PreconditionError("window length must lie in [1, n]");
  Index run = 0;
  for (Index m = 1; m <= len; ++m) run += bitmap[m] ? 1 : 0;
  Index best = run;
  for (Index m = len + 1; m <= n; ++m) {
    run += (bitmap[m] ? 1 : 0);
    run -= (bitmap[m - len] ? 1 : 0);
    best = std::max(best, run);
  }
  Rational r = ratio(best, len);
  return r;
}

DensityReport density_report(const SetDescription& s, Index scale, const std::vector<Index>& checkpoints,
                             std::optional<Index> window) {
  if (checkpoints.empty()) throw PreconditionError("density_report needs at least one checkpoint");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || checkpoints[i] > scale) throw PreconditionError("checkpoints must lie in [1, scale]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) throw PreconditionError("checkpoints must increase");
  }
  DensityReport report;
  std::vector<char> bits;
  const bool enumerate = window.has_value() || (!has_closed_count(s) && checkpoints.size() > 1);
  if (enumerate) bits = indicator(s, scale);
  std::vector<Index> prefix;
  if (enumerate) {
    prefix.assign(scale + 1, 0);
    for (Index m = 1; m <= scale; ++m) prefix[m] = prefix[m - 1] + (bits[m] ? 1 : 0);
  }
  bool first = true;
  for (Index n : checkpoints) {
    Index c = enumerate ? prefix[n] : count_prefix(s, n);
    report.prefix_counts.emplace_back(n, c);
    Rational r = ratio(c, n);
    if (first || r < report.lower_estimate) report.lower_estimate = r;
    if (first || r > report.upper_estimate) report.upper_estimate = r;
    first = false;
  }
  report.exact = periodic_density(s);
  if (report.exact) report.lower_estimate = report.upper_estimate = *report.exact;
  if (window) {
    report.window = window;
    report.banach_upper = max_window_density(bits, scale, *window);
  }
  return report;
}

void write_density_csv(std::ostream& os, const DensityReport& report) {
  os << "n,count,density\n";
  for (const auto& [n, c] : report.prefix_counts) {
    Rational r = ratio(c, n);
    os << n << "," << c << "," << decimal(r, 12) << "\n";
  }
}

}  // namespace tauber
