#include <sstream>

#include "doctest.h"
#include "tauber/errors.hpp"
#include "tauber/report.hpp"

using namespace tauber;

TEST_CASE("digests and run-length coding") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::vector<char> bits{1, 0, 0, 1, 1, 1, 1};
  CHECK(encode_runs(bits) == "1x1,0x2,1x4");
  CHECK(decode_runs(encode_runs(bits)) == bits);
  CHECK(decode_runs("").empty());
  CHECK_THROWS_AS(decode_runs("2x3"), ParseError);
  CHECK_THROWS_AS(decode_runs("1x0"), ParseError);
}

TEST_CASE("certificates round-trip through verification") {
  const Rational l(2, 5), u(3, 5);
  auto A = cesaro();
  auto r = steinhaus_adversary(A, AdversaryMode::Blocks, 4096, l, u);
  REQUIRE(r.certificate);
  auto doc = certificate_json(A, r, l, u);
  auto text = canonical_dump(doc);
  CHECK(text == canonical_dump(Json::parse(text)));
  CHECK(verify_certificate_json(Json::parse(text)).ok);

  auto tampered = doc;
  tampered["upper"]["count"] = tampered["upper"]["count"].get<Index>() + 1;
  CHECK_FALSE(verify_certificate_json(tampered).ok);
  auto flipped = doc;
  auto x = decode_runs(doc["x"]["runs"].get<std::string>());
  x[10] ^= 1;
  flipped["x"]["runs"] = encode_runs(x);
  CHECK_FALSE(verify_certificate_json(flipped).ok);
  CHECK_FALSE(verify_certificate_json(Json{{"type", "other"}}).ok);
}

TEST_CASE("explicit matrices embed their rows") {
  auto A = dense_explicit_matrix({{Rational(1)}, {Rational(1, 2), Rational(1, 2)}}, cesaro());
  auto j = matrix_json(A);
  CHECK(j["spec"] == "explicit:inline+cesaro");
  auto B = matrix_from_json(j);
  for (Index n = 1; n <= 6; ++n)
    for (Index k = 1; k <= 6; ++k) CHECK(entry(A, n, k) == entry(B, n, k));
  auto r = steinhaus_adversary(A, AdversaryMode::Blocks, 1024, Rational(2, 5), Rational(3, 5));
  REQUIRE(r.certificate);
  CHECK(verify_certificate_json(certificate_json(A, r, Rational(2, 5), Rational(3, 5))).ok);
  CHECK_THROWS_AS(matrix_json(row_drop(A, squares())), UnsupportedError);
}

TEST_CASE("transcripts and tournament rows") {
  auto run = play_game(IdealPresentation::z(), 3, named_strategy_I("naturals"), named_strategy_II("prefix-density"));
  std::ostringstream os;
  write_transcript_jsonl(os, run.transcript);
  std::istringstream is(os.str());
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    auto j = Json::parse(line);
    CHECK(j["round"] == ++n);
    CHECK(j["legality"] == "In-dual");
  }
  CHECK(n == 3);
  std::ostringstream csv;
  write_tournament_csv(csv, {{1, "z", "naturals", "prefix-density", 3, run.adjudication}});
  CHECK(csv.str().find("1,z,3,naturals,prefix-density,II_winning_evidence,3,1\n") != std::string::npos);
}
