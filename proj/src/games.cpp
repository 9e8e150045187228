#include "tauber/games.hpp"

#include <algorithm>
#include <set>

#include "tauber/errors.hpp"
#include "tauber/prng.hpp"

namespace tauber {
namespace {

constexpr unsigned kAuditColumns = 20;

std::vector<Index> union_of(const GameTranscript& t) {
  std::set<Index> u;
  for (const auto& r : t.rounds) u.insert(r.response.begin(), r.response.end());
  return {u.begin(), u.end()};
}

std::vector<Index> column_counts(const std::vector<Index>& u) {
  std::vector<Index> c(kAuditColumns + 1, 0);
  for (Index m : u)
    if (unsigned k = nu2(m); k <= kAuditColumns) ++c[k];
  return c;
}

MembershipVerdict check_move(const GameTranscript& t, const SetDescription& move) {
  return dual_member(t.ideal, move, t.scale);
}

}  // namespace

GameTranscript play_round(GameTranscript t, const SetDescription& move, const StrategyII& strategy) {
  auto legality = check_move(t, move);
  if (legality.status != Membership::In)
    throw IllegalMoveError("round " + std::to_string(t.rounds.size() + 1) + ": " + render(move) +
                           " is not certified in the dual filter of " + t.ideal.name() + " (" + legality.label() + ")");
  StrategyMove reply = strategy(t, move);
  if (reply.set.empty()) throw IllegalMoveError("player II returned an empty set");
  for (std::size_t i = 0; i < reply.set.size(); ++i) {
    if (i && reply.set[i] <= reply.set[i - 1]) throw IllegalMoveError("player II's set is not strictly increasing");
    if (!member(move, reply.set[i]))
      throw IllegalMoveError("player II's element " + std::to_string(reply.set[i]) + " lies outside " + render(move));
  }
  t.rounds.push_back(GameRound{move, std::move(reply.set), std::move(legality), reply.scale});
  return t;
}

bool replay_legality(const GameTranscript& t) {
  for (const auto& r : t.rounds) {
    auto again = check_move(t, r.move);
    if (again.status != r.legality.status || again.label() != r.legality.label()) return false;
    for (Index m : r.response)
      if (!member(r.move, m)) return false;
  }
  return true;
}

StrategyMove strategy_II_prefix_density(const GameTranscript& history, const SetDescription& A, Index cap) {
  const Index round = history.rounds.size() + 1;
  Index count = round > 1 ? count_prefix(A, round - 1) : 0;
  for (Index m = round; m <= cap; ++m) {
    count += member(A, m) ? 1 : 0;
    if (2 * count >= m) return {elements_upto(A, m), m};
  }
  throw SearchCapError("no m <= " + std::to_string(cap) + " with |A ∩ [1, m]| >= m/2 for " + render(A) +
                       "; evidence that the move is not in the dual filter");
}

SetDescription strategy_I_nu2(const GameTranscript& history) {
  return nu2_at_least(static_cast<unsigned>(history.rounds.size() + 1));
}

std::vector<Index> first_elements(const SetDescription& S, Index count, Index scan_cap) {
  std::vector<Index> out;
  if (auto* p = std::get_if<set_node::Progression>(&S.node().value)) {
    for (Index i = 0; i < count; ++i) out.push_back(p->first + i * p->step);
    return out;
  }
  if (auto* v = std::get_if<set_node::Nu2AtLeast>(&S.node().value)) {
    if (v->min_valuation > 40) throw SearchCapError("ν₂ threshold beyond 40");
    for (Index i = 1; i <= count; ++i) out.push_back(i << v->min_valuation);
    return out;
  }
  for (Index m = 1; m <= scan_cap && out.size() < count; ++m)
    if (member(S, m)) out.push_back(m);
  if (out.size() < count)
    throw SearchCapError("fewer than " + std::to_string(count) + " elements of " + render(S) + " below the scan cap");
  return out;
}

StrategyII named_strategy_II(const std::string& name) {
  if (name == "prefix-density")
    return [](const GameTranscript& t, const SetDescription& A) { return strategy_II_prefix_density(t, A); };
  if (name == "min")
    return [](const GameTranscript&, const SetDescription& A) { return StrategyMove{first_elements(A, 1), {}}; };
  if (name == "first-round")
    return [](const GameTranscript& t, const SetDescription& A) {
      return StrategyMove{first_elements(A, t.rounds.size() + 1), {}};
    };
  if (name.starts_with("random:")) {
    std::uint64_t seed = std::stoull(name.substr(7));
    return [seed](const GameTranscript& t, const SetDescription& A) {
      auto pool = first_elements(A, 8);
      Rng rng(counter_hash(seed, t.rounds.size()));
      std::vector<Index> pick;
      for (Index m : pool)
        if (rng.coin()) pick.push_back(m);
      if (pick.empty()) pick.push_back(pool[rng.uniform(0, pool.size() - 1)]);
      return StrategyMove{pick, {}};
    };
  }
  throw ParseError("unknown player II strategy '" + name + "'", 0);
}

std::vector<SetDescription> z_dual_corpus() {
  std::vector<std::string> texts{"ap:1,1",
                                 "complement:builtin:squares",
                                 "complement:builtin:powers2",
                                 "complement:finite:{1..5}",
                                 "complement:union:builtin:squares|builtin:powers2",
                                 "complement:finite:{1..100}",
                                 "complement:intersect:builtin:squares|ap:1,2",
                                 "complement:union:builtin:squares|finite:{2,3,5,7}",
                                 "complement:union:builtin:powers2|finite:{3}",
                                 "complement:finite:{2,4,6,8,10}"};
  std::vector<SetDescription> out;
  for (const auto& s : texts) out.push_back(parse_set(s));
  return out;
}

StrategyI named_strategy_I(const std::string& name) {
  if (name == "nu2") return strategy_I_nu2;
  if (name == "naturals") return [](const GameTranscript&) { return naturals(); };
  if (name == "corpus") {
    auto corpus = z_dual_corpus();
    return [corpus](const GameTranscript& t) { return corpus[t.rounds.size() % corpus.size()]; };
  }
  throw ParseError("unknown player I strategy '" + name + "'", 0);
}

std::string to_string(GameOutcome o) {
  switch (o) {
    case GameOutcome::IIWinningEvidence: return "II_winning_evidence";
    case GameOutcome::IWinningEvidence: return "I_winning_evidence";
    case GameOutcome::Undecided: return "Undecided";
  }
  return "?";
}

Adjudication adjudicate(const GameTranscript& t, const IdealPresentation& I) {
  Adjudication a;
  if (t.rounds.empty()) {
    a.reason = "empty transcript";
    return a;
  }
  const auto u = union_of(t);
  const auto cols = column_counts(u);
  for (unsigned k = 0; k <= kAuditColumns; ++k) a.column_audit.push_back({k, cols[k]});
  const Index rounds = t.rounds.size();
  const auto& last = t.rounds.back();
  const Index s = last.scale.value_or(last.response.back());
  const Index count = static_cast<Index>(std::upper_bound(u.begin(), u.end(), s) - u.begin());
  const Rational density = ratio(count, s);

  switch (I.kind()) {
    case IdealKind::Fin: {
      bool growing = true;
      for (Index r = 1; r < rounds; ++r) growing = growing && t.rounds[r].response.back() > t.rounds[r - 1].response.back();
      if (growing) {
        a.outcome = GameOutcome::IIWinningEvidence;
        a.reason = "largest element of F_n increases in every one of " + std::to_string(rounds) +
                   " rounds; finite play, evidence only";
      } else {
        a.reason = "the union did not grow in every round";
      }
      return a;
    }
    case IdealKind::FinXFin: {
      bool nested = true;
      for (Index r = 1; r <= rounds && nested; ++r)
        for (Index m : t.rounds[r - 1].response) nested = nested && nu2(m) + 1 >= r;
      if (nested) {
        a.outcome = GameOutcome::IWinningEvidence;
        a.reason = "every F_n lies in {m : nu2(m) >= n - 1}, so column k only changes up to round k + 1; "
                   "all columns of the union stay finite; finite play, evidence only";
      } else {
        a.reason = "some F_n reaches a column below n - 1";
      }
      return a;
    }
    default: {
      a.witness_scale = s;
      a.witness_density = density;
      if (2 * count >= s && s >= rounds) {
        a.outcome = GameOutcome::IIWinningEvidence;
        a.reason = "union has prefix density " + to_string(density) + " >= 1/2 at the witnessed scale " +
                   std::to_string(s) + "; finite play, evidence only";
      } else {
        a.reason = "prefix density " + to_string(density) + " at scale " + std::to_string(s) + " below 1/2";
      }
      return a;
    }
  }
}

GameRun play_game(const IdealPresentation& I, Index rounds, const StrategyI& player_I, const StrategyII& player_II,
                  Index scale, bool audit_columns) {
  GameRun run{GameTranscript{I, scale, {}}, {}, {}};
  for (Index r = 0; r < rounds; ++r) {
    run.transcript = play_round(std::move(run.transcript), player_I(run.transcript), player_II);
    if (audit_columns) run.column_history.push_back(column_counts(union_of(run.transcript)));
  }
  run.adjudication = adjudicate(run.transcript, I);
  return run;
}

DiagonalizationFamily fin_singleton_family() {
  return {"fin-singletons", [](Index, Index k) { return std::vector<Index>{k}; }};
}

DiagonalizationFamily interval_family() {
  return {"intervals", [](Index n, Index k) {
            std::vector<Index> v;
            for (Index i = 0; i < n; ++i) v.push_back(k + i);
            return v;
          }};
}

DiagonalizationFamily proportional_family() {
  return {"proportional", [](Index n, Index k) {
            std::vector<Index> v;
            for (Index i = 0; i < (k + n - 1) / n; ++i) v.push_back(k + i);
            return v;
          }};
}

std::vector<UniversalRowEntry> check_universal_row(const DiagonalizationFamily& D, Index n,
                                                   const std::vector<SetDescription>& corpus,
                                                   const IdealPresentation& I, Index k_cap) {
  std::vector<UniversalRowEntry> out;
  for (const auto& A : corpus) {
    auto v = dual_member(I, A, 0);
    if (v.status != Membership::In)
      throw PreconditionError(render(A) + " is not certified in the dual filter of " + I.name() + " (" + v.label() +
                              ")");
    UniversalRowEntry e{render(A), std::nullopt, 0};
    for (Index k = 1; k <= k_cap; ++k) {
      auto F = D.sets(n, k);
      bool inside = true, meets = false;
      for (Index m : F) {
        bool in = member(A, m);
        inside = inside && in;
        meets = meets || in;
      }
      if (inside && !e.least_k) e.least_k = k;
      if (!meets) e.onset = k;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace tauber
