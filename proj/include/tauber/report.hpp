#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tauber/constructions.hpp"
#include "tauber/games.hpp"
#include "tauber/ideal_limit.hpp"
#include "tauber/ideals.hpp"
#include "tauber/regularity.hpp"
#include "tauber/sigma.hpp"

namespace tauber {

using Json = nlohmann::json;

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// "1x1,0x2,1x4": value x run length, in order.
std::string encode_runs(const std::vector<char>& bits);
/// ParseError on malformed input.
std::vector<char> decode_runs(std::string_view text);

/// Spec plus, for explicit matrices, the stored rows as [[k, "p/q"], ...].
Json matrix_json(const SummabilityMatrix& A);
SummabilityMatrix matrix_from_json(const Json& j);

/// Canonical certificate document: keys sorted, rationals as "p/q" strings, x run-length encoded with a digest.
Json certificate_json(const SummabilityMatrix& A, const AdversaryResult& r, const Rational& lower,
                      const Rational& upper);

struct CertificateCheck {
  bool ok = false;
  std::vector<std::string> failures;
};

/// Rebuilds A and x from the document alone, recomputes Ax and both densities, and compares every stored field.
CertificateCheck verify_certificate_json(const Json& doc);

/// Compact dump with sorted keys and a trailing newline.
std::string canonical_dump(const Json& j);

Json to_json(const MembershipVerdict& v);
Json to_json(const RegularityVerdict& v);
Json to_json(const IdealLimitVerdict& v);
Json to_json(const OscillationCertificate& c);
Json to_json(const EscapeResult& r);
Json to_json(const OscillationPair& p);
Json to_json(const MetricInterval& m);
Json to_json(const DemoRound& d);
Json to_json(const Adjudication& a);

/// One JSON object per round: round, move, response, legality.
void write_transcript_jsonl(std::ostream& os, const GameTranscript& t);

/// Header "game,ideal,rounds,strategy_i,strategy_ii,outcome,witness_scale,witness_density".
struct TournamentRow {
  Index game = 0;
  std::string ideal, strategy_i, strategy_ii;
  Index rounds = 0;
  Adjudication adjudication;
};
void write_tournament_csv(std::ostream& os, const std::vector<TournamentRow>& rows);

}  // namespace tauber
