#include "doctest.h"
#include "tauber/constructions.hpp"
#include "tauber/errors.hpp"
#include "tauber/prng.hpp"

using namespace tauber;

namespace {

// Oracle: Σ_{k<=K} a_k x_{σ(k)} straight from the selector's values.
Rational partial(const SummableRow& a, const Sequence& x, const Selector& s, Index K) {
  Rational t = 0;
  for (Index k = 1; k <= K; ++k) t += a.entry(k) * x(s(k));
  return t;
}

SummableRow decaying_row(Rng& rng) {
  // Random signs, ratio 1/2 or 1/3, leading zeros so i0 moves around.
  const Index zeros = rng.uniform(0, 4);
  const Index den = rng.uniform(2, 3);
  const std::uint64_t signs = rng.next();
  return {"random-row", [=](Index k) -> Rational {
            if (k <= zeros) return 0;
            Rational v = Rational(1) / Rational(Integer(den) * 1);
            Rational p = 1;
            for (Index i = 0; i < k; ++i) p *= v;
            return ((signs >> (k % 64)) & 1) ? Rational(-p) : p;
          },
          nullptr};
}

// Oracle for blocks at powers of 4: ones in [1, 2^{2j+1}) is (4^{j+1} - 1)/3, and position 2^{2j+2}
// opens the next ones block.
Rational cesaro_block_value(unsigned j, bool after_ones) {
  Integer ones = (Integer(1) << (2 * j + 2)) - 1;
  ones /= 3;
  if (!after_ones) ones += 1;
  Integer n = Integer(1) << (after_ones ? 2 * j + 1 : 2 * j + 2);
  Rational v(ones, n);
  v.canonicalize();
  return v;
}

}  // namespace

TEST_CASE("escape_unbounded worked instances") {
  auto n = parse_sequence("n");
  auto r = escape_unbounded({1}, geometric_row(), n, 5);
  CHECK(*r.audit.i0 == 2);
  CHECK(*r.audit.t0 == 26);
  CHECK(r.selector.prefix(4) == std::vector<Index>{1, 26, 27, 28});
  CHECK(r.values[0] == 7);
  CHECK(r.achieved >= 6);

  SummableRow tail3{"tail3", [](Index k) { return k >= 3 ? Rational(1) : Rational(0); }, nullptr};
  auto r2 = escape_unbounded({1, 2}, tail3, n, 1);
  CHECK(*r2.audit.i0 == 3);
  CHECK(*r2.audit.t0 == 5);
  CHECK(r2.selector.prefix(4) == std::vector<Index>{1, 2, 5, 6});

  SummableRow ones{"ones", [](Index) { return Rational(1); }, nullptr};
  auto r3 = escape_unbounded({}, ones, n, 0);
  CHECK(*r3.audit.i0 == 1);
  CHECK(*r3.audit.t0 == 1);
  CHECK(r3.selector.prefix(3) == std::vector<Index>{1, 2, 3});

  SummableRow zero{"zero", [](Index) { return Rational(0); }, nullptr};
  CHECK_THROWS_AS(escape_unbounded({}, zero, n, 1, SearchCaps{100, 100}), SearchCapError);
  CHECK_THROWS_AS(escape_unbounded({}, ones, parse_sequence("one"), 5, SearchCaps{100, 100}), SearchCapError);
}

TEST_CASE("escape_unbounded postcondition on random instances") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    auto a = decaying_row(rng);
    auto x = parse_sequence(i % 2 ? "n" : "signed-n");
    std::vector<Index> stem;
    Index v = 0;
    for (Index k = 0, len = rng.uniform(0, 5); k < len; ++k) stem.push_back(v += rng.uniform(1, 9));
    Rational m0 = ratio(rng.uniform(0, 1000), 1);
    auto r = escape_unbounded(stem, a, x, m0);
    CHECK(ball_contains(stem, r.selector));
    CHECK(abs(partial(a, x, r.selector, *r.audit.i0)) >= m0 + 1);
  }
}

TEST_CASE("escape_rowfinite examples") {
  auto n = parse_sequence("n");
  auto r = escape_rowfinite({1, 2}, cesaro(), n, IdealPresentation::z(), 10);
  CHECK(ball_contains({1, 2}, r.selector));
  CHECK(r.target_rows == std::vector<Index>{4, 5, 6, 7});
  CHECK(*r.audit.w0 == 3);
  CHECK(*r.audit.n0 == 3);
  CHECK(*r.audit.k0 == 7);
  CHECK(*r.audit.alpha == Rational(1, 7));
  // Oracle: running means of the selected values.
  for (Index row : r.target_rows) CHECK(abs(partial(finite_row(std::vector<Rational>(row, Rational(1, row))), n,
                                                    r.selector, row)) >= 10);

  auto id = escape_rowfinite({}, identity_matrix(), n, IdealPresentation::fin(), 100);
  REQUIRE(id.target_rows.size() == 1);
  CHECK(n(id.selector(id.target_rows[0])) >= 100);

  auto zero = escape_rowfinite({3}, cesaro(), n, IdealPresentation::z(), 0);
  CHECK(zero.selector.prefix(10) == consecutive_after({3}).prefix(10));

  CHECK_THROWS_AS(escape_rowfinite({}, named_generator("geometric"), n, IdealPresentation::z(), 1), UnsupportedError);
  // The squares-dropping matrix has Z_1 = squares, which is not finite.
  CHECK_THROWS_AS(escape_rowfinite({}, row_drop(cesaro(), squares()), n, IdealPresentation::fin(), 1),
                  PreconditionError);
  CHECK_NOTHROW(escape_rowfinite({}, row_drop(cesaro(), squares()), n, IdealPresentation::z(), 1));
}

TEST_CASE("escape_rowfinite on random explicit matrices") {
  Rng rng(8);
  for (int i = 0; i < 25; ++i) {
    std::vector<SparseRow> rows;
    const Index R = rng.uniform(3, 12);
    for (Index r = 1; r <= R; ++r) {
      SparseRow row;
      for (Index k = 1; k <= r + 2; ++k)
        if (rng.uniform(0, 2) == 0 || k == r + 2) row.push_back({k, make_rational(rng.uniform(1, 9), rng.uniform(1, 5)) * (rng.coin() ? 1 : -1)});
      rows.push_back(row);
    }
    auto A = explicit_matrix(rows, cesaro());
    auto I = i % 2 ? IdealPresentation::fin() : IdealPresentation::z();
    auto x = parse_sequence(i % 3 ? "n" : "signed-n");
    std::vector<Index> stem;
    for (Index k = 1, len = rng.uniform(0, 3); k <= len; ++k) stem.push_back(2 * k);
    Rational m0 = ratio(rng.uniform(1, 50), 1);
    auto r = escape_rowfinite(stem, A, x, I, m0);
    for (Index row : r.target_rows) {
      Rational v = 0;
      for (const auto& [k, a] : row_entries(A, row)) v += a * x(r.selector(k));
      CHECK(abs(v) >= m0);
    }
  }
}

TEST_CASE("oscillation pairs") {
  auto alt = parse_sequence("alt");
  auto p = oscillation_pair({}, alt, cesaro(), 1000, 0);
  CHECK(p.alpha == 1);
  CHECK(p.beta == 0);
  CHECK(p.gap == 1);
  CHECK(p.upper.prefix(3) == std::vector<Index>{2, 4, 6});
  auto q = oscillation_pair({1}, alt, identity_matrix(), 100, 0);
  CHECK(q.upper(1) == 1);
  CHECK(q.gap == 1);
  CHECK_THROWS_AS(oscillation_pair({}, parse_sequence("inv-n"), cesaro(), 1000, Rational(1, 100)), PreconditionError);
}

TEST_CASE("blocks adversary against Cesàro means") {
  const Index N = 1 << 16;
  auto res = steinhaus_adversary(cesaro(), AdversaryMode::Blocks, N, Rational(2, 5), Rational(3, 5));
  CHECK(res.construction == "blocks:doubling");
  REQUIRE(res.certificate);
  CHECK(res.audit_passed);
  CHECK(res.certificate->upper_density() >= Rational(1, 10));
  CHECK(res.certificate->lower_density() >= Rational(1, 10));
  for (unsigned j = 2; j <= 7; ++j) {
    const Index hi = Index{1} << (2 * j + 1), lo = Index{1} << (2 * j + 2);
    CHECK(res.y[hi - 1] == cesaro_block_value(j, true));
    CHECK(res.y[lo - 1] == cesaro_block_value(j, false));
    CHECK(abs(res.y[hi - 1] - Rational(2, 3)) <= pow2_inv(2 * j - 2));
    CHECK(abs(res.y[lo - 1] - Rational(1, 3)) <= pow2_inv(2 * j - 2));
  }
  // Any η is at least (u - l)/2 from one threshold, so the closed exception set inherits a density.
  const Rational eps = Rational(1, 10);
  for (int i = 0; i <= 10; ++i) {
    Rational eta = Rational(2, 5) + Rational(i, 50);
    auto profiles = exception_profiles(res.y, IdealPresentation::z(), {eta}, {eps}, true);
    CHECK(ratio(profiles[0].counts.back().second, N) >=
          std::min(res.certificate->upper_density(), res.certificate->lower_density()) / 2);
  }
}

TEST_CASE("adversary on other regular matrices") {
  auto id = steinhaus_adversary(identity_matrix(), AdversaryMode::Blocks, 1024, Rational(2, 5), Rational(3, 5));
  REQUIRE(id.certificate);
  CHECK(id.construction == "blocks:unit");
  CHECK(id.certificate->upper_density() == Rational(1, 2));
  CHECK(id.certificate->lower_density() == Rational(1, 2));

  auto drop = steinhaus_adversary(row_drop(cesaro(), squares()), AdversaryMode::Blocks, 1 << 14, Rational(2, 5),
                                  Rational(3, 5), IdealPresentation::z());
  REQUIRE(drop.certificate);
  CHECK(drop.audit_passed);
  CHECK_THROWS_AS(steinhaus_adversary(row_drop(cesaro(), squares()), AdversaryMode::Blocks, 1024, Rational(2, 5),
                                      Rational(3, 5), IdealPresentation::fin()),
                  PreconditionError);
  CHECK_THROWS_AS(steinhaus_adversary(cesaro(), AdversaryMode::Blocks, 1024, Rational(3, 5), Rational(2, 5)),
                  PreconditionError);

  for (auto A : {cesaro(), identity_matrix(), named_generator("window2")}) {
    auto g = steinhaus_adversary(A, AdversaryMode::Greedy, 4096, Rational(2, 5), Rational(3, 5));
    CAPTURE(matrix_spec(A));
    CAPTURE(g.diagnostic);
    REQUIRE(g.certificate);
    CHECK(g.audit_passed);
    CHECK(audit_certificate(*g.certificate, std::vector<Rational>(g.y.begin(), g.y.begin() + 4096)));
  }
}

TEST_CASE("meagerness demo transcripts") {
  auto esc = meagerness_demo(parse_sequence("n"), cesaro(), IdealPresentation::z(), {1, 2, 4, 8, 16}, 5, 3);
  REQUIRE(esc.size() == 5);
  for (const auto& r : esc) {
    CHECK(r.kind == DemoKind::Escape);
    CHECK(r.verified);
    CHECK(r.achieved >= r.bound);
  }
  auto osc = meagerness_demo(parse_sequence("alt"), cesaro(), IdealPresentation::z(), {}, 4, 3);
  for (const auto& r : osc) {
    CHECK(r.kind == DemoKind::Oscillation);
    CHECK(r.achieved >= Rational(9, 10));
  }
  CHECK(meagerness_demo(parse_sequence("n"), cesaro(), IdealPresentation::z(), {}, 0, 1).empty());
}
