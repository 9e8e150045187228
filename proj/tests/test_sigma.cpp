#include "doctest.h"
#include "tauber/errors.hpp"
#include "tauber/prng.hpp"
#include "tauber/sigma.hpp"

using namespace tauber;

namespace {

// Oracle: symmetric difference mass from image membership, summed term by term.
Rational brute_metric_lo(const Selector& a, const Selector& b, Index K) {
  Rational s = 0;
  for (Index i = 1; i <= K; ++i)
    if (a.in_image(i) != b.in_image(i)) s += Rational(1) / Rational(Integer(1) << static_cast<mp_bitcnt_t>(i));
  return s;
}

Selector random_selector(Rng& rng) {
  switch (rng.uniform(0, 3)) {
    case 0: return parse_selector("random:" + std::to_string(rng.next() % 100000) + ":1/2");
    case 1: {
      std::vector<Index> stem;
      Index v = 0;
      for (Index i = 0, n = rng.uniform(0, 4); i < n; ++i) stem.push_back(v += rng.uniform(1, 5));
      return consecutive_after(stem);
    }
    case 2: return parse_selector("gen:shift:" + std::to_string(rng.uniform(0, 6)));
    default: return bernoulli_selector({}, rng.next(), make_rational(1, 3), 1);
  }
}

}  // namespace

TEST_CASE("selector parsing and evaluation") {
  auto s = parse_selector("stem:{1,26}+consec");
  CHECK(s.prefix(5) == std::vector<Index>{1, 26, 27, 28, 29});
  CHECK(s.spec() == "stem:{1,26}+consec:27");
  CHECK(parse_selector(s.spec()).prefix(6) == s.prefix(6));
  CHECK(parse_selector("id").prefix(3) == std::vector<Index>{1, 2, 3});
  CHECK(parse_selector("even")(7) == 14);
  CHECK(parse_selector("gen:squares")(9) == 81);
  CHECK(parse_selector("stem:{1,2}+gen:even")(3) == 6);
  auto r = parse_selector("random:42:1/2");
  CHECK(r.spec() == "random:42:1/2");
  CHECK(parse_selector("random:42:1/2").prefix(30) == r.prefix(30));
  auto rt = bernoulli_selector({1, 5}, 9, make_rational(1, 2), 13);
  CHECK(parse_selector(rt.spec()).prefix(20) == rt.prefix(20));
  for (Index n = 1; n <= 40; ++n) CHECK(r(n) == r.prefix(40)[n - 1]);

  CHECK_THROWS_AS(parse_selector("stem:{3,2}+consec"), ParseError);
  CHECK_THROWS_AS(parse_selector("stem:{5}+gen:odd"), ParseError);
  CHECK_THROWS_AS(parse_selector("gen:nope"), ParseError);
  CHECK_THROWS_AS(parse_selector("random:1:2"), ParseError);
  CHECK_THROWS_AS(parse_selector("stem:{1,2}")(3), PreconditionError);
}

TEST_CASE("apply_selector examples") {
  auto alt = parse_sequence("alt");
  CHECK(apply_selector(identity_selector(), alt, 4) == alt.prefix(4));
  for (const auto& v : apply_selector(parse_selector("even"), alt, 50)) CHECK(v == 1);
  auto y = apply_selector(parse_selector("stem:{1,26}+consec"), parse_sequence("n"), 4);
  CHECK(y == std::vector<Rational>{Rational(1), Rational(26), Rational(27), Rational(28)});
  auto sub = subsequence(parse_sequence("n"), parse_selector("gen:squares"), 10);
  CHECK(sub(12) == 144);
}

TEST_CASE("metric examples") {
  const Index K = 40;
  auto w = pow2_inv(K);
  auto m1 = metric(identity_selector(), parse_selector("gen:succ"), K);
  CHECK(m1.lo == Rational(1, 2));
  CHECK(m1.hi == Rational(1, 2) + w);
  auto m2 = metric(parse_selector("even"), parse_selector("even"), K);
  CHECK(m2.lo == 0);
  CHECK(m2.hi == w);
  auto m3 = metric(parse_selector("even"), parse_selector("gen:even-plus"), K);
  CHECK(m3.lo == Rational(1, 4));
  CHECK_THROWS_AS(metric(parse_selector("stem:{1,2}"), identity_selector(), 5), UnsupportedError);
}

TEST_CASE("metric contracts on random selectors") {
  Rng rng(77);
  const Index K = 40;
  for (int i = 0; i < 200; ++i) {
    auto a = random_selector(rng), b = random_selector(rng), c = random_selector(rng);
    auto ab = metric(a, b, K), bc = metric(b, c, K), ac = metric(a, c, K), ba = metric(b, a, K);
    CHECK(ab.hi - ab.lo <= pow2_inv(K - 1));
    CHECK(ab.lo == brute_metric_lo(a, b, K));
    CHECK(ab.lo == ba.lo);
    CHECK(metric(a, a, K).lo == 0);
    CHECK(ac.lo <= ab.hi + bc.hi);
    auto fine = metric(a, b, K + 8);
    CHECK(fine.lo >= ab.lo);
    CHECK(fine.hi <= ab.hi);
  }
}

TEST_CASE("ball membership") {
  auto s = parse_selector("stem:{1,26}+consec");
  CHECK(ball_contains({1, 26}, s));
  CHECK_FALSE(ball_contains({2}, identity_selector()));
  CHECK(ball_contains({}, parse_selector("even")));
  // Two selectors sharing a stem differ only above its last value.
  auto t = parse_selector("stem:{1,26}+gen:shift:30");
  CHECK(metric(s, t, 40).lo <= pow2_inv(26));
}

TEST_CASE("modulus of continuity examples") {
  auto m = modulus_of_continuity(1, geometric_row(), Rational(1, 4));
  CHECK(m.k0 == 4);
  CHECK(m.delta == Rational(1, 16));
  auto f = modulus_of_continuity(1, finite_row({Rational(1), Rational(2), Rational(3)}), Rational(1, 1000));
  CHECK(f.delta >= pow2_inv(3));
  CHECK(modulus_of_continuity(0, geometric_row(), Rational(1, 4)).degenerate);
  CHECK_THROWS_AS(modulus_of_continuity(1, geometric_row(), Rational(1, 4), 2), SearchCapError);
}

TEST_CASE("anchored modulus holds where the uniform radius does not") {
  auto a = geometric_row();
  auto x = parse_sequence("alt");
  auto m = modulus_of_continuity(1, a, Rational(1, 4));
  // Images [5, ∞) and [6, ∞) are 2^-5 apart, inside the uniform radius 2^-4.
  auto s1 = Selector({}, selector_tail::Consecutive{5});
  auto s2 = Selector({}, selector_tail::Consecutive{6});
  auto uniform = check_modulus_pair(a, x, 1, Rational(1, 4), m.delta, s1, s2, 60);
  CHECK(uniform.in_scope);
  CHECK(uniform.result == ContractCheck::Violated);
  auto anchored = check_modulus_pair(a, x, 1, Rational(1, 4), m.anchored_delta(s1), s1, s2, 60);
  CHECK_FALSE(anchored.in_scope);

  // Pairs inside the anchored radius always satisfy the bound.
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto s = bernoulli_selector({}, rng.next(), Rational(1, 2), 1);
    Index top = s(m.k0);
    auto t = bernoulli_selector(s.image_upto(top), rng.next(), Rational(1, 2), top + 1);
    auto c = check_modulus_pair(a, x, 1, Rational(1, 4), m.anchored_delta(s), s, t, 60);
    CHECK(c.result == ContractCheck::Holds);
  }
}

TEST_CASE("sample_selector determinism") {
  auto a = sample_selector(11, Rational(1, 2), 10);
  auto b = sample_selector(11, Rational(1, 2), 10);
  CHECK(a.stem() == b.stem());
  CHECK(a.stem().size() <= 10);
  auto hi = sample_selector(3, make_rational(999, 1000), 100);
  CHECK(hi.stem().size() >= 95);
  CHECK_THROWS_AS(sample_selector(1, Rational(1), 5), PreconditionError);
  CHECK_THROWS_AS(sample_selector(1, Rational(0), 5), PreconditionError);
}
