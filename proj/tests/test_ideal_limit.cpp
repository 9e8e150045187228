#include "doctest.h"
#include "tauber/ideal_limit.hpp"

using namespace tauber;

TEST_CASE("squares-perturbed sequence has statistical limit 1") {
  auto y = parse_sequence("squares-perturbed").prefix(10000);
  auto v = ideal_limit(y, IdealPresentation::z());
  CHECK(v.status == LimitStatus::Limit);
  REQUIRE(v.eta);
  CHECK(*v.eta == 1);
  // Under Fin the squares keep escaping.
  CHECK(ideal_limit(y, IdealPresentation::fin()).status != LimitStatus::Limit);
}

TEST_CASE("alternating sequence yields an oscillation certificate") {
  auto y = parse_sequence("alt").prefix(10000);
  auto v = ideal_limit(y, IdealPresentation::z());
  REQUIRE(v.status == LimitStatus::NoLimitEvidence);
  REQUIRE(v.certificate);
  CHECK(v.certificate->upper == 1);
  CHECK(v.certificate->lower == 0);
  CHECK(v.certificate->upper_density() == Rational(1, 2));
  CHECK(v.certificate->lower_density() == Rational(1, 2));
  CHECK(audit_certificate(*v.certificate, y));
  // Fin×Fin has no finite-scale rule: alternation along ν₂-column 0 is in Fin×Fin.
  CHECK(ideal_limit(y, IdealPresentation::fin_x_fin()).status == LimitStatus::Undecided);
}

TEST_CASE("constant sequences converge under every proxy ideal") {
  std::vector<Rational> y(512, Rational(7));
  for (auto I : {IdealPresentation::fin(), IdealPresentation::z(), IdealPresentation::bd()}) {
    auto v = ideal_limit(y, I);
    REQUIRE(v.status == LimitStatus::Limit);
    CHECK(*v.eta == 7);
  }
}

TEST_CASE("1/n tends to 0 under Fin") {
  auto y = parse_sequence("inv-n").prefix(4096);
  auto v = ideal_limit(y, IdealPresentation::fin());
  REQUIRE(v.status == LimitStatus::Limit);
  CHECK(*v.eta == 0);
}

TEST_CASE("shaped limits are certified") {
  LimitShape shape{Rational(1), squares(), Rational(1)};
  auto z = ideal_limit(shape, IdealPresentation::z(), 100);
  CHECK(z.status == LimitStatus::Limit);
  CHECK(z.certified);
  auto f = ideal_limit(shape, IdealPresentation::fin(), 100);
  CHECK(f.status == LimitStatus::NoLimitEvidence);
  CHECK(f.certified);
}

TEST_CASE("certificate audit detects tampering") {
  auto y = parse_sequence("alt").prefix(100);
  auto c = make_certificate(y, 0, 1, 100, 100);
  CHECK(c.valid());
  CHECK(audit_certificate(c, y));
  c.upper_count += 1;
  CHECK_FALSE(audit_certificate(c, y));
}
