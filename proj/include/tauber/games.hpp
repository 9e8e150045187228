#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tauber/ideals.hpp"
#include "tauber/rational.hpp"
#include "tauber/setlang.hpp"

namespace tauber {

struct GameRound {
  SetDescription move;          // A_n, played by I
  std::vector<Index> response;  // F_n, played by II, ascending
  MembershipVerdict legality;   // dual verdict of A_n
  /// The strategy's witnessed scale, when it reports one.
  std::optional<Index> scale;
};

struct GameTranscript {
  IdealPresentation ideal;
  /// Scale passed to the dual verdicts that check I's moves.
  Index scale = 0;
  std::vector<GameRound> rounds;
};

struct StrategyMove {
  std::vector<Index> set;
  std::optional<Index> scale;
};

using StrategyI = std::function<SetDescription(const GameTranscript&)>;
using StrategyII = std::function<StrategyMove(const GameTranscript&, const SetDescription&)>;

/// Appends (A_n, F_n). IllegalMoveError if A_n is not certified in the dual filter, or if F_n is empty,
/// unsorted, or leaves A_n.
GameTranscript play_round(GameTranscript t, const SetDescription& move, const StrategyII& strategy);

/// Replays every stored move through the legality checks; true when all verdicts match.
bool replay_legality(const GameTranscript& t);

/// F = A ∩ [1, m] for the least m >= round index with |A ∩ [1, m]| / m >= 1/2.
/// SearchCapError when no such m <= cap exists.
StrategyMove strategy_II_prefix_density(const GameTranscript& history, const SetDescription& A,
                                        Index cap = 1'000'000);

/// A_n = {m : ν₂(m) >= n} at round n.
SetDescription strategy_I_nu2(const GameTranscript& history);

/// The first `count` elements of S, found in closed form for progressions and ν₂ sets and by scanning otherwise.
std::vector<Index> first_elements(const SetDescription& S, Index count, Index scan_cap = 10'000'000);

/// II strategies: "prefix-density", "min" (least element), "first-round" (first n elements at round n),
/// "random:<seed>" (a seeded nonempty subset of the first 8 elements).
StrategyII named_strategy_II(const std::string& name);

/// Ten moves for I that lie in the dual filter of Z, cycled by round.
std::vector<SetDescription> z_dual_corpus();

/// I strategies: "nu2", "corpus" (cycles z_dual_corpus), "naturals".
StrategyI named_strategy_I(const std::string& name);

enum class GameOutcome { IIWinningEvidence, IWinningEvidence, Undecided };

std::string to_string(GameOutcome o);

struct Adjudication {
  GameOutcome outcome = GameOutcome::Undecided;
  std::string reason;
  std::optional<Index> witness_scale;
  std::optional<Rational> witness_density;
  /// (k, |(∪F) ∩ {m : ν₂(m) = k}|) for k <= 20.
  std::vector<std::pair<unsigned, Index>> column_audit;
};

/// Finite transcripts yield evidence, never a theorem.
Adjudication adjudicate(const GameTranscript& t, const IdealPresentation& I);

/// Plays `rounds` rounds. Column audits, when requested, are recorded after every round.
struct GameRun {
  GameTranscript transcript;
  Adjudication adjudication;
  /// column_history[r][k] = column-k count of ∪F after round r + 1.
  std::vector<std::vector<Index>> column_history;
};

GameRun play_game(const IdealPresentation& I, Index rounds, const StrategyI& player_I, const StrategyII& player_II,
                  Index scale = 0, bool audit_columns = false);

/// F_{n,k}: a double sequence of nonempty finite sets.
struct DiagonalizationFamily {
  std::string name;
  std::function<std::vector<Index>(Index n, Index k)> sets;
};

/// F_{n,k} = {k}.
DiagonalizationFamily fin_singleton_family();
/// F_{n,k} = [k, k + n).
DiagonalizationFamily interval_family();
/// F_{n,k} = [k, k + ceil(k / n)).
DiagonalizationFamily proportional_family();

struct UniversalRowEntry {
  std::string set;
  /// Least k <= cap with F_{n,k} ⊆ A.
  std::optional<Index> least_k;
  /// Least m with F_{n,k} ∩ A ≠ ∅ for every k in (m, cap].
  Index onset = 0;
};

/// PreconditionError unless every corpus member is certified in I's dual filter.
std::vector<UniversalRowEntry> check_universal_row(const DiagonalizationFamily& D, Index n,
                                                   const std::vector<SetDescription>& corpus,
                                                   const IdealPresentation& I, Index k_cap = 1000);

}  // namespace tauber
