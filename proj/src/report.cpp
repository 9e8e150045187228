#include "tauber/report.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <ostream>

#include "tauber/errors.hpp"

namespace tauber {
namespace {

bool has_nested_explicit(const SummabilityMatrix& A, bool top) {
  const auto& v = A.node().value;
  if (std::holds_alternative<matrix_kind::Explicit>(v)) {
    if (!top) return true;
    const auto& e = std::get<matrix_kind::Explicit>(v);
    return e.tail && has_nested_explicit(*e.tail, false);
  }
  if (auto* d = std::get_if<matrix_kind::RowDrop>(&v)) return has_nested_explicit(d->base, false);
  return false;
}

std::string bit_string(const std::vector<char>& x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? '1' : '0';
  return s;
}

Json side(Index scale, Index count) {
  return Json{{"scale", scale}, {"count", count}, {"density", to_string(ratio(count, scale))}};
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string encode_runs(const std::vector<char>& bits) {
  std::string out;
  for (std::size_t i = 0; i < bits.size();) {
    std::size_t j = i;
    while (j < bits.size() && (bits[j] != 0) == (bits[i] != 0)) ++j;
    if (!out.empty()) out += ',';
    out += (bits[i] ? "1x" : "0x") + std::to_string(j - i);
    i = j;
  }
  return out;
}

std::vector<char> decode_runs(std::string_view text) {
  std::vector<char> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (item.size() < 3 || (item[0] != '0' && item[0] != '1') || item[1] != 'x')
      throw ParseError("malformed run '" + std::string(item) + "'", pos);
    Index len = 0;
    auto [ptr, ec] = std::from_chars(item.data() + 2, item.data() + item.size(), len);
    if (ec != std::errc() || ptr != item.data() + item.size() || len == 0)
      throw ParseError("malformed run length in '" + std::string(item) + "'", pos + 2);
    if (out.size() + len > kEnumerationCap) throw ScaleCapError("run-length sequence exceeds the enumeration cap");
    out.insert(out.end(), len, item[0] == '1' ? 1 : 0);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

Json matrix_json(const SummabilityMatrix& A) {
  if (has_nested_explicit(A, true))
    throw UnsupportedError("explicit matrices can only be embedded at the top level");
  Json j{{"spec", matrix_spec(A)}};
  if (auto* e = std::get_if<matrix_kind::Explicit>(&A.node().value)) {
    Json rows = Json::array();
    for (const auto& r : e->rows) {
      Json row = Json::array();
      for (const auto& [k, v] : r) row.push_back(Json::array({k, to_string(v)}));
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
  }
  return j;
}

SummabilityMatrix matrix_from_json(const Json& j) {
  const std::string spec = j.at("spec").get<std::string>();
  if (!spec.starts_with("explicit:inline")) return parse_matrix(spec);
  std::vector<SparseRow> rows;
  for (const auto& r : j.at("rows")) {
    SparseRow row;
    for (const auto& e : r) row.push_back({e.at(0).get<Index>(), parse_rational(e.at(1).get<std::string>())});
    rows.push_back(std::move(row));
  }
  std::optional<SummabilityMatrix> tail;
  if (auto plus = spec.find('+'); plus != std::string::npos) tail = parse_matrix(spec.substr(plus + 1));
  return explicit_matrix(std::move(rows), tail);
}

Json certificate_json(const SummabilityMatrix& A, const AdversaryResult& r, const Rational& lower,
                      const Rational& upper) {
  if (!r.certificate) throw PreconditionError("no certificate to serialize: " + r.diagnostic);
  const auto& c = *r.certificate;
  return Json{{"type", "oscillation-certificate"},
              {"format", 1},
              {"matrix", matrix_json(A)},
              {"construction", r.construction},
              {"x", {{"length", r.x.size()}, {"runs", encode_runs(r.x)}, {"sha256", sha256_hex(bit_string(r.x))}}},
              {"thresholds", {{"lower", to_string(lower)}, {"upper", to_string(upper)}}},
              {"scale", c.scale},
              {"upper", side(c.upper_scale, c.upper_count)},
              {"lower", side(c.lower_scale, c.lower_count)},
              {"self_audit", r.audit_passed}};
}

CertificateCheck verify_certificate_json(const Json& doc) {
  CertificateCheck out;
  auto fail = [&](std::string m) { out.failures.push_back(std::move(m)); };
  try {
    if (doc.at("type") != "oscillation-certificate") fail("unexpected document type");
    const auto A = matrix_from_json(doc.at("matrix"));
    const auto x = decode_runs(doc.at("x").at("runs").get<std::string>());
    if (x.size() != doc.at("x").at("length").get<Index>()) fail("x length does not match its runs");
    if (sha256_hex(bit_string(x)) != doc.at("x").at("sha256").get<std::string>()) fail("x digest mismatch");
    const Rational lower = parse_rational(doc.at("thresholds").at("lower").get<std::string>());
    const Rational upper = parse_rational(doc.at("thresholds").at("upper").get<std::string>());
    const Index N = doc.at("scale").get<Index>();
    if (!row_finite(A)) {
      fail("matrix is not row-finite");
      return out;
    }
    if (columns_needed(A, N) > x.size()) {
      fail("x is shorter than the columns needed for " + std::to_string(N) + " rows");
      return out;
    }
    std::vector<Rational> xr;
    xr.reserve(x.size());
    for (char b : x) xr.push_back(Rational(b ? 1 : 0));
    const auto y = transform_rowfinite(A, xr, N);
    const Index su = doc.at("upper").at("scale").get<Index>();
    const Index sl = doc.at("lower").at("scale").get<Index>();
    const auto c = make_certificate(y, lower, upper, su, sl);
    if (side(su, c.upper_count) != doc.at("upper")) fail("upper count or density differs from the recomputation");
    if (side(sl, c.lower_count) != doc.at("lower")) fail("lower count or density differs from the recomputation");
    if (!c.valid()) fail("certificate is not valid: empty threshold set or thresholds out of order");
  } catch (const std::exception& e) {
    fail(std::string("malformed certificate: ") + e.what());
  }
  out.ok = out.failures.empty();
  return out;
}

std::string canonical_dump(const Json& j) { return j.dump() + "\n"; }

Json to_json(const MembershipVerdict& v) {
  Json j{{"status", to_string(v.status)}, {"label", v.label()}, {"scale", v.scale}, {"reason", v.reason}};
  if (v.density) {
    j["density"] = {{"lower_estimate", to_string(v.density->lower_estimate)},
                    {"upper_estimate", to_string(v.density->upper_estimate)}};
    if (v.density->exact) j["density"]["exact"] = to_string(*v.density->exact);
  }
  if (!v.column_audit.empty()) {
    Json a = Json::array();
    for (const auto& [k, c] : v.column_audit) a.push_back({{"column", k}, {"count", c}});
    j["column_audit"] = a;
  }
  if (v.column_threshold) j["column_threshold"] = *v.column_threshold;
  if (!v.windows.empty()) {
    Json w = Json::array();
    for (const auto& [L, d] : v.windows) w.push_back({{"window", L}, {"max_density", to_string(d)}});
    j["windows"] = w;
  }
  if (!v.transform_values.empty()) {
    Json t = Json::array();
    for (const auto& [n, val] : v.transform_values) t.push_back(Json::array({n, to_string(val)}));
    j["transform_values"] = t;
  }
  return j;
}

namespace {
Json condition_json(const ConditionVerdict& c) {
  Json j{{"status", to_string(c.status)}, {"scale", c.scale}, {"reason", c.reason}};
  if (c.bound) j["bound"] = to_string(*c.bound);
  if (!c.witness_rows.empty()) j["witness_rows"] = c.witness_rows;
  if (c.witness_column) j["witness_column"] = *c.witness_column;
  return j;
}
}  // namespace

Json to_json(const RegularityVerdict& v) {
  Json cols = Json::array();
  for (const auto& c : v.r2_columns) cols.push_back(condition_json(c));
  return Json{{"label", v.label()},       {"scale", v.scale},          {"r1", condition_json(v.r1)},
              {"r2", condition_json(v.r2)}, {"r2_columns", cols},       {"r3", condition_json(v.r3)},
              {"witness", v.witness}};
}

Json to_json(const OscillationCertificate& c) {
  return Json{{"lower", to_string(c.lower)},
              {"upper", to_string(c.upper)},
              {"scale", c.scale},
              {"upper_set", side(c.upper_scale, c.upper_count)},
              {"lower_set", side(c.lower_scale, c.lower_count)},
              {"valid", c.valid()}};
}

Json to_json(const IdealLimitVerdict& v) {
  Json j{{"status", to_string(v.status)},
         {"resolution", to_string(v.resolution)},
         {"scale", v.scale},
         {"certified", v.certified},
         {"reason", v.reason}};
  if (v.eta) j["eta"] = to_string(*v.eta);
  if (v.certificate) j["certificate"] = to_json(*v.certificate);
  Json ev = Json::array();
  for (const auto& p : v.evidence) {
    Json counts = Json::array();
    for (const auto& [n, c] : p.counts) counts.push_back(Json::array({n, c}));
    ev.push_back({{"eta", to_string(p.eta)}, {"eps", to_string(p.eps)}, {"counts", counts},
                  {"compatible", p.compatible}});
  }
  j["evidence"] = ev;
  return j;
}

Json to_json(const EscapeResult& r) {
  Json audit = Json::object();
  auto put = [&](const char* k, const auto& v) {
    if (v) audit[k] = *v;
  };
  put("i0", r.audit.i0);
  put("t0", r.audit.t0);
  put("w0", r.audit.w0);
  put("n0", r.audit.n0);
  put("p1", r.audit.p1);
  put("q0", r.audit.q0);
  put("k0", r.audit.k0);
  if (r.audit.alpha) audit["alpha"] = to_string(*r.audit.alpha);
  if (r.audit.stem_sum) audit["stem_sum"] = to_string(*r.audit.stem_sum);
  Json values = Json::array();
  for (const auto& v : r.values) values.push_back(to_string(v));
  const Index shown = std::min<Index>(r.selector.stem().size() + 4, 64);
  return Json{{"selector", r.selector.spec()},
              {"prefix", r.selector.prefix(shown)},
              {"target_rows", r.target_rows},
              {"bound", to_string(r.bound)},
              {"values", values},
              {"achieved", to_string(r.achieved)},
              {"verified", r.verified},
              {"audit", audit}};
}

Json to_json(const OscillationPair& p) {
  return Json{{"upper", p.upper.spec()},
              {"lower", p.lower.spec()},
              {"upper_prefix", p.upper.prefix(8)},
              {"lower_prefix", p.lower.prefix(8)},
              {"alpha", to_string(p.alpha)},
              {"beta", to_string(p.beta)},
              {"row", p.row},
              {"gap", to_string(p.gap)},
              {"gap_error", to_string(p.gap_error)}};
}

Json to_json(const MetricInterval& m) {
  return Json{{"lo", to_string(m.lo)}, {"hi", to_string(m.hi)}, {"resolution", m.resolution}};
}

Json to_json(const DemoRound& d) {
  Json j{{"round", d.round},
         {"stem", d.stem},
         {"kind", d.kind == DemoKind::Escape ? "escape" : "oscillation"},
         {"selector", d.selector},
         {"bound", to_string(d.bound)},
         {"achieved", to_string(d.achieved)},
         {"verified", d.verified}};
  if (!d.partner.empty()) j["partner"] = d.partner;
  return j;
}

Json to_json(const Adjudication& a) {
  Json cols = Json::array();
  for (const auto& [k, c] : a.column_audit) cols.push_back(Json::array({k, c}));
  Json j{{"outcome", to_string(a.outcome)}, {"reason", a.reason}, {"column_audit", cols}};
  if (a.witness_scale) j["witness_scale"] = *a.witness_scale;
  if (a.witness_density) j["witness_density"] = to_string(*a.witness_density);
  return j;
}

void write_transcript_jsonl(std::ostream& os, const GameTranscript& t) {
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const auto& r = t.rounds[i];
    Json j{{"round", i + 1}, {"move", render(r.move)}, {"response", r.response}, {"legality", r.legality.label()}};
    if (r.scale) j["scale"] = *r.scale;
    os << j.dump() << "\n";
  }
}

void write_tournament_csv(std::ostream& os, const std::vector<TournamentRow>& rows) {
  os << "game,ideal,rounds,strategy_i,strategy_ii,outcome,witness_scale,witness_density\n";
  for (const auto& r : rows) {
    os << r.game << "," << r.ideal << "," << r.rounds << "," << r.strategy_i << "," << r.strategy_ii << ","
       << to_string(r.adjudication.outcome) << ","
       << (r.adjudication.witness_scale ? std::to_string(*r.adjudication.witness_scale) : "") << ","
       << (r.adjudication.witness_density ? to_string(*r.adjudication.witness_density) : "") << "\n";
  }
}

}  // namespace tauber
