#include "tauber/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "tauber/constructions.hpp"
#include "tauber/errors.hpp"
#include "tauber/games.hpp"
#include "tauber/prng.hpp"
#include "tauber/regularity.hpp"
#include "tauber/report.hpp"
#include "tauber/sigma.hpp"

namespace tauber {
namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

/// Flat "key = value" lines; '#' starts a comment. Values may be quoted.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t here = offset;
    offset += line.size() + 1;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line without '=' in '" + path + "'", here);
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    kv.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

bool mentions(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.starts_with(flag + "=")) return true;
  return false;
}

/// Config values become flags right after the subcommand; explicit flags win.
std::vector<std::string> apply_config(const std::vector<std::string>& args, const std::vector<std::string>& subs) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    if (key == "config" || mentions(args, flag)) continue;
    if (value == "true") {
      injected.push_back(flag);
    } else if (value != "false") {
      injected.push_back(flag);
      injected.push_back(value);
    }
  }
  std::vector<std::string> out;
  bool done = false;
  for (const auto& a : args) {
    out.push_back(a);
    if (!done && std::find(subs.begin(), subs.end(), a) != subs.end()) {
      out.insert(out.end(), injected.begin(), injected.end());
      done = true;
    }
  }
  return out;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<Index> default_ladder(Index N) {
  std::vector<Index> c;
  for (Index v = std::max<Index>(N >> 4, 1); v < N; v *= 2) c.push_back(v);
  c.push_back(N);
  return c;
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& a : v) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& v) {
  std::vector<Rational> out;
  for (const auto& s : v) out.push_back(parse_rational(s));
  return out;
}

struct Context {
  std::ostream& out;
  std::uint64_t seed;
};

using Handler = std::function<int(Context&)>;

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-scale experiments on ideal convergence, summability matrices and subsequence selectors",
               "tauber"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, run_log = "tauber_runs.jsonl";
  bool no_log = false;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Flat key = value file; command-line flags override it");
  app.add_option("--run-log", run_log, "JSONL run log to append to")->capture_default_str();
  app.add_flag("--no-log", no_log, "Do not append a run record");
  app.add_option("--seed", seed, "Seed for every randomized choice")->capture_default_str();

  std::map<CLI::App*, Handler> handlers;

  // density
  std::string d_set, d_format = "json";
  Index d_n = 0;
  std::vector<Index> d_checkpoints;
  std::optional<Index> d_window;
  auto* density = app.add_subcommand("density", "Prefix density profile of a set description");
  density->add_option("--set", d_set, "Set DSL")->required();
  density->add_option("--n", d_n, "Scale N")->required();
  density->add_option("--checkpoints", d_checkpoints, "Comma-separated checkpoints (default N/16, ..., N)")
      ->delimiter(',');
  density->add_option("--window", d_window, "Window length for the Banach estimate");
  density->add_option("--format", d_format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  handlers[density] = [&](Context& c) {
    auto S = parse_set(d_set);
    auto cps = d_checkpoints.empty() ? default_ladder(d_n) : d_checkpoints;
    auto r = density_report(S, d_n, cps, d_window);
    if (d_format == "csv") {
      write_density_csv(c.out, r);
      return kExitOk;
    }
    Json counts = Json::array();
    for (const auto& [n, k] : r.prefix_counts) counts.push_back(Json::array({n, k}));
    Json j{{"set", render(S)},
           {"scale", d_n},
           {"prefix_counts", counts},
           {"lower_estimate", to_string(r.lower_estimate)},
           {"upper_estimate", to_string(r.upper_estimate)}};
    if (r.exact) j["exact"] = to_string(*r.exact);
    if (r.banach_upper) j["banach_upper"] = to_string(*r.banach_upper);
    if (r.window) j["window"] = *r.window;
    c.out << canonical_dump(j);
    return kExitOk;
  };

  // verdict
  std::string v_ideal, v_set;
  Index v_n = 0;
  bool v_dual = false;
  auto* verdict_cmd = app.add_subcommand("verdict", "Membership of a set in an ideal or its dual filter");
  verdict_cmd->add_option("--ideal", v_ideal, "fin, z, bd, finxfin or matrix:<spec>")->required();
  verdict_cmd->add_option("--set", v_set, "Set DSL")->required();
  verdict_cmd->add_option("--n", v_n, "Evidence scale for undecided cases")->capture_default_str();
  verdict_cmd->add_flag("--dual", v_dual, "Ask about the dual filter");
  handlers[verdict_cmd] = [&](Context& c) {
    auto I = parse_ideal(v_ideal);
    auto S = parse_set(v_set);
    auto v = v_dual ? dual_member(I, S, v_n) : verdict(I, S, v_n);
    Json j = to_json(v);
    j["ideal"] = I.name();
    j["set"] = render(S);
    c.out << canonical_dump(j);
    return kExitOk;
  };

  // regularity
  std::string r_matrix, r_under = "fin";
  Index r_rows = 10000, r_cols = 64;
  auto* regularity = app.add_subcommand("regularity", "(Fin, I)-regularity verdict of a matrix");
  regularity->add_option("--matrix", r_matrix, "Matrix spec")->required();
  regularity->add_option("--under", r_under, "Ideal I")->capture_default_str();
  regularity->add_option("--rows", r_rows, "Sampled rows")->capture_default_str();
  regularity->add_option("--cols", r_cols, "Sampled columns")->capture_default_str();
  handlers[regularity] = [&](Context& c) {
    auto A = parse_matrix(r_matrix);
    auto v = regularity_verdict(A, parse_ideal(r_under), r_rows, r_cols);
    Json j = to_json(v);
    j["matrix"] = matrix_spec(A);
    j["under"] = r_under;
    c.out << canonical_dump(j);
    if (v.overall == RegularityStatus::NotRegular) return kExitPrecondition;
    if (v.overall == RegularityStatus::Undecided) return kExitSearchCap;
    return kExitOk;
  };

  // transform
  std::string t_matrix, t_x, t_tol = "1/1073741824";
  std::optional<std::string> t_selector;
  Index t_n = 0;
  auto* transform = app.add_subcommand("transform", "Rows of Ax (or A sigma(x)) as CSV");
  transform->add_option("--matrix", t_matrix, "Matrix spec")->required();
  transform->add_option("--x", t_x, "Sequence spec")->required();
  transform->add_option("--n", t_n, "Rows")->required();
  transform->add_option("--tail-tol", t_tol, "Certified tail tolerance for infinite rows")->capture_default_str();
  transform->add_option("--selector", t_selector, "Apply a selector to x first");
  handlers[transform] = [&](Context& c) {
    auto A = parse_matrix(t_matrix);
    auto x = parse_sequence(t_x);
    if (t_selector) x = subsequence(x, parse_selector(*t_selector), row_finite(A) ? columns_needed(A, t_n) : t_n);
    auto rows = transform_prefix(A, x, t_n, parse_rational(t_tol));
    c.out << "n,value,decimal,tail_bound\n";
    for (const auto& r : rows)
      c.out << r.n << "," << to_string(r.value) << "," << decimal(r.value, 12) << "," << to_string(r.tail_bound)
            << "\n";
    return kExitOk;
  };

  // metric
  std::string m_a, m_b, m_x = "alt";
  Index m_K = 40;
  std::optional<std::string> m_eps;
  auto* metric_cmd = app.add_subcommand("metric", "Certified distance between two selectors");
  metric_cmd->add_option("--a", m_a, "First selector")->required();
  metric_cmd->add_option("--b", m_b, "Second selector")->required();
  metric_cmd->add_option("--K", m_K, "Resolution")->capture_default_str();
  metric_cmd->add_option("--eps", m_eps, "Also check the modulus of continuity for a_k = 2^-k at this epsilon");
  metric_cmd->add_option("--x", m_x, "Bounded sequence for the modulus check")->capture_default_str();
  handlers[metric_cmd] = [&](Context& c) {
    auto a = parse_selector(m_a), b = parse_selector(m_b);
    Json j{{"a", a.spec()}, {"b", b.spec()}, {"interval", to_json(metric(a, b, m_K))}};
    if (m_eps) {
      auto x = parse_sequence(m_x);
      if (!x.sup_norm()) throw PreconditionError(x.spec() + " has no certified sup norm");
      const Rational eps = parse_rational(*m_eps);
      auto row = geometric_row();
      auto mod = modulus_of_continuity(*x.sup_norm(), row, eps);
      auto describe = [&](const Rational& radius) {
        auto chk = check_modulus_pair(row, x, *x.sup_norm(), eps, radius, a, b, m_K);
        const char* verdict = chk.result == ContractCheck::Holds      ? "holds"
                              : chk.result == ContractCheck::Violated ? "violated"
                                                                      : "inconclusive";
        return Json{{"radius", to_string(radius)},
                    {"in_scope", chk.in_scope},
                    {"gap_lo", to_string(chk.gap.lo)},
                    {"gap_hi", to_string(chk.gap.hi)},
                    {"bound", verdict}};
      };
      j["modulus"] = {{"k0", mod.k0},
                      {"delta", to_string(mod.delta)},
                      {"uniform", describe(mod.delta)},
                      {"anchored", describe(mod.anchored_delta(a))}};
    }
    c.out << canonical_dump(j);
    return kExitOk;
  };

  // escape
  std::string e_matrix = "cesaro", e_x = "n", e_ideal = "z", e_m = "10";
  std::vector<Index> e_stem;
  Index e_p0 = 1;
  std::optional<std::string> e_row;
  auto* escape = app.add_subcommand("escape", "Extend a stem so the transform escapes a bound");
  escape->add_option("--matrix", e_matrix, "Matrix spec")->capture_default_str();
  escape->add_option("--x", e_x, "Unbounded sequence spec")->capture_default_str();
  escape->add_option("--ideal", e_ideal, "Ideal I")->capture_default_str();
  escape->add_option("--m", e_m, "Bound m0")->capture_default_str();
  escape->add_option("--stem", e_stem, "Comma-separated stem")->delimiter(',');
  escape->add_option("--p0", e_p0, "Least block index")->capture_default_str();
  escape->add_option("--row", e_row, "Single-row escape: 'geometric' or 'matrix:<n>'");
  handlers[escape] = [&](Context& c) {
    auto x = parse_sequence(e_x);
    const Rational m0 = parse_rational(e_m);
    auto A = parse_matrix(e_matrix);
    EscapeResult r = [&] {
      if (!e_row && row_finite(A)) return escape_rowfinite(e_stem, A, x, parse_ideal(e_ideal), m0, e_p0);
      std::string which = e_row.value_or("matrix:1");
      if (which == "geometric") return escape_unbounded(e_stem, geometric_row(), x, m0);
      if (!which.starts_with("matrix:")) throw ParseError("--row expects 'geometric' or 'matrix:<n>'", 0);
      Index n = std::stoull(which.substr(7));
      return escape_unbounded(e_stem, SummableRow{matrix_spec(A) + "[" + std::to_string(n) + "]",
                                                  [A, n](Index k) { return entry(A, n, k); }, nullptr},
                              x, m0);
    }();
    c.out << canonical_dump(to_json(r));
    return r.verified ? kExitOk : kExitVerification;
  };

  // oscillate
  std::string o_x = "alt", o_matrix = "cesaro", o_tol = "0";
  Index o_n = 1024;
  std::vector<Index> o_stem;
  auto* oscillate = app.add_subcommand("oscillate", "Selectors tracking the prefix limsup and liminf of x");
  oscillate->add_option("--x", o_x, "Bounded sequence spec")->capture_default_str();
  oscillate->add_option("--matrix", o_matrix, "Matrix spec")->capture_default_str();
  oscillate->add_option("--n", o_n, "Scale N")->capture_default_str();
  oscillate->add_option("--tol", o_tol, "Tolerance")->capture_default_str();
  oscillate->add_option("--stem", o_stem, "Comma-separated stem")->delimiter(',');
  handlers[oscillate] = [&](Context& c) {
    auto p = oscillation_pair(o_stem, parse_sequence(o_x), parse_matrix(o_matrix), o_n, parse_rational(o_tol));
    c.out << canonical_dump(to_json(p));
    return kExitOk;
  };

  // adversary
  std::string a_matrix, a_mode = "blocks", a_lower = "2/5", a_upper = "3/5", a_under = "fin";
  Index a_n = 65536;
  std::optional<std::string> a_out;
  auto* adversary = app.add_subcommand("adversary", "Search for a 0/1 sequence whose transform oscillates");
  adversary->add_option("--matrix", a_matrix, "Matrix spec")->required();
  adversary->add_option("--mode", a_mode, "blocks or greedy")
      ->check(CLI::IsMember({"blocks", "greedy"}))
      ->capture_default_str();
  adversary->add_option("--n", a_n, "Scale N")->capture_default_str();
  adversary->add_option("--lower", a_lower, "Lower threshold l")->capture_default_str();
  adversary->add_option("--upper", a_upper, "Upper threshold u")->capture_default_str();
  adversary->add_option("--under", a_under, "Ideal for the regularity precondition")->capture_default_str();
  adversary->add_option("--out", a_out, "Certificate file; without it the certificate goes to stdout");
  handlers[adversary] = [&](Context& c) {
    auto A = parse_matrix(a_matrix);
    const Rational l = parse_rational(a_lower), u = parse_rational(a_upper);
    auto r = steinhaus_adversary(A, a_mode == "greedy" ? AdversaryMode::Greedy : AdversaryMode::Blocks, a_n, l, u,
                                 parse_ideal(a_under));
    if (!r.certificate) {
      Json phases = Json::array();
      for (const auto& p : r.phases)
        phases.push_back({{"high", p.high}, {"start", p.start}, {"length", p.length}, {"met_quota", p.met_quota}});
      c.out << canonical_dump(Json{{"construction", r.construction}, {"diagnostic", r.diagnostic}, {"phases", phases}});
      return kExitSearchCap;
    }
    auto doc = certificate_json(A, r, l, u);
    if (!a_out) {
      c.out << canonical_dump(doc);
      return kExitOk;
    }
    std::ofstream f(*a_out);
    if (!f) throw Error("cannot write certificate file '" + *a_out + "'");
    f << canonical_dump(doc);
    c.out << canonical_dump(Json{{"construction", r.construction},
                                 {"certificate", to_json(*r.certificate)},
                                 {"certificate_file", *a_out},
                                 {"certificate_sha256", sha256_hex(canonical_dump(doc))},
                                 {"self_audit", r.audit_passed}});
    return kExitOk;
  };

  // verify
  std::string vf_path;
  auto* verify = app.add_subcommand("verify", "Re-check a certificate file from its contents alone");
  verify->add_option("--certificate", vf_path, "Certificate JSON")->required();
  handlers[verify] = [&](Context& c) {
    std::ifstream f(vf_path);
    if (!f) throw ParseError("cannot open certificate '" + vf_path + "'", 0);
    Json doc;
    try {
      doc = Json::parse(f);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("certificate is not JSON: ") + e.what(), e.byte);
    }
    auto chk = verify_certificate_json(doc);
    c.out << canonical_dump(Json{{"ok", chk.ok}, {"failures", chk.failures}});
    return chk.ok ? kExitOk : kExitVerification;
  };

  // game
  std::string g_ideal = "z";
  Index g_rounds = 10, g_n = 0, g_tournament = 0;
  std::optional<std::string> g_si, g_sii, g_transcript, g_csv;
  auto* game = app.add_subcommand("game", "Play the filter game G(I)");
  game->add_option("--ideal", g_ideal, "Ideal I")->capture_default_str();
  game->add_option("--rounds", g_rounds, "Rounds")->capture_default_str();
  game->add_option("--strategy-i", g_si, "nu2, corpus or naturals (default: nu2 for finxfin, corpus otherwise)");
  game->add_option("--strategy-ii", g_sii,
                   "prefix-density, min, first-round, random or random:<seed> (default: min for finxfin, "
                   "prefix-density otherwise)");
  game->add_option("--n", g_n, "Scale for the legality verdicts")->capture_default_str();
  game->add_option("--transcript", g_transcript, "Write the transcript as JSONL");
  game->add_option("--tournament", g_tournament, "Play this many games with per-game seeds")->capture_default_str();
  game->add_option("--csv", g_csv, "Tournament summary CSV (stdout when absent)");
  handlers[game] = [&](Context& c) {
    auto I = parse_ideal(g_ideal);
    const bool fxf = I.kind() == IdealKind::FinXFin;
    const std::string si = g_si.value_or(fxf ? "nu2" : "corpus");
    std::string sii = g_sii.value_or(fxf ? "min" : "prefix-density");
    auto resolve_ii = [&](std::uint64_t s) { return sii == "random" ? "random:" + std::to_string(s) : sii; };
    if (g_tournament > 0) {
      std::vector<TournamentRow> rows;
      for (Index g = 1; g <= g_tournament; ++g) {
        const std::string name = resolve_ii(counter_hash(c.seed, g));
        auto run = play_game(I, g_rounds, named_strategy_I(si), named_strategy_II(name), g_n);
        rows.push_back({g, I.name(), si, name, g_rounds, run.adjudication});
      }
      if (g_csv) {
        std::ofstream f(*g_csv);
        if (!f) throw Error("cannot write '" + *g_csv + "'");
        write_tournament_csv(f, rows);
      } else {
        write_tournament_csv(c.out, rows);
      }
      return kExitOk;
    }
    const std::string name = resolve_ii(c.seed);
    auto run = play_game(I, g_rounds, named_strategy_I(si), named_strategy_II(name), g_n);
    if (g_transcript) {
      std::ofstream f(*g_transcript);
      if (!f) throw Error("cannot write '" + *g_transcript + "'");
      write_transcript_jsonl(f, run.transcript);
    }
    c.out << canonical_dump(Json{{"ideal", I.name()},
                                 {"rounds", g_rounds},
                                 {"strategy_i", si},
                                 {"strategy_ii", name},
                                 {"legality_replay", replay_legality(run.transcript)},
                                 {"adjudication", to_json(run.adjudication)}});
    return kExitOk;
  };

  // demo
  std::string dm_x = "n", dm_matrix = "cesaro", dm_ideal = "z";
  Index dm_rounds = 5;
  std::vector<std::string> dm_m;
  auto* demo = app.add_subcommand("demo", "Escape or oscillation from a sequence of adversarial stems");
  demo->add_option("--x", dm_x, "Sequence spec")->capture_default_str();
  demo->add_option("--matrix", dm_matrix, "Matrix spec")->capture_default_str();
  demo->add_option("--ideal", dm_ideal, "Ideal I")->capture_default_str();
  demo->add_option("--rounds", dm_rounds, "Rounds")->capture_default_str();
  demo->add_option("--m", dm_m, "Comma-separated bound schedule (default 1, 2, 4, ...)")->delimiter(',');
  handlers[demo] = [&](Context& c) {
    auto rounds = meagerness_demo(parse_sequence(dm_x), parse_matrix(dm_matrix), parse_ideal(dm_ideal),
                                  parse_rationals(dm_m), dm_rounds, c.seed);
    bool all = true;
    for (const auto& r : rounds) {
      c.out << to_json(r).dump() << "\n";
      all = all && r.verified;
    }
    return all ? kExitOk : kExitVerification;
  };

  std::vector<std::string> sub_names;
  for (const auto& [sub, h] : handlers) sub_names.push_back(sub->get_name());

  int code = kExitOk;
  std::ostringstream buffer;
  std::vector<std::string> args;
  try {
    args = apply_config(raw_args, sub_names);
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Context ctx{buffer, seed};
  try {
    code = handlers.at(chosen)(ctx);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    code = kExitParse;
  } catch (const ScaleCapError& e) {
    err << "scale cap: " << e.what() << "\n";
    code = kExitScaleCap;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    code = kExitPrecondition;
  } catch (const SearchCapError& e) {
    err << "search cap: " << e.what() << "\n";
    code = kExitSearchCap;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    code = kExitSearchCap;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << "\n";
    code = kExitVerification;
  } catch (const IllegalMoveError& e) {
    err << "illegal move: " << e.what() << "\n";
    code = kExitIllegalMove;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    code = kExitInternal;
  }

  const std::string output = buffer.str();
  out << output;
  if (!no_log) {
    Json config = Json::object();
    for (const CLI::Option* opt : chosen->get_options()) {
      if (opt->get_name() == "--help" || opt->get_lnames().empty()) continue;
      const std::string key = opt->get_lnames().front();
      if (opt->count() > 0) {
        auto res = opt->results();
        config[key] = res.size() == 1 ? Json(res.front()) : Json(res);
      } else if (!opt->get_default_str().empty()) {
        config[key] = opt->get_default_str();
      }
    }
    Json record{{"timestamp", utc_timestamp()},
                {"command", joined(raw_args)},
                {"subcommand", chosen->get_name()},
                {"config", config},
                {"seed", seed},
                {"prng", kPrngName},
                {"version", kArtifactVersion},
                {"exit_code", code},
                {"output_sha256", sha256_hex(output)}};
    std::ofstream log(run_log, std::ios::app);
    if (!log) {
      err << "warning: cannot append to run log '" << run_log << "'\n";
    } else {
      log << record.dump() << "\n";
    }
  }
  return code;
}

}  // namespace tauber
