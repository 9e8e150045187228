#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tauber/rational.hpp"
#include "tauber/sequence.hpp"

namespace tauber {

namespace selector_tail {
/// No tail: the selector is the finite stem (a search state).
struct None {};
/// σ(j+s) = from + s - 1.
struct Consecutive {
  Index from;
};
/// σ(n) = f(n) for n > j; f strictly increasing.
struct Mapped {
  std::string name;
  std::function<Index(Index)> f;
};
/// Increasing enumeration of {m >= from : keep(m)}; keep must hold infinitely often.
struct Filtered {
  std::string name;
  std::function<bool(Index)> keep;
  Index from;
};
}  // namespace selector_tail

using SelectorTail =
    std::variant<selector_tail::None, selector_tail::Consecutive, selector_tail::Mapped, selector_tail::Filtered>;

/// Strictly increasing σ: N → N given by a finite stem t_1 < ... < t_j and a tail rule.
class Selector {
 public:
  Selector(std::vector<Index> stem, SelectorTail tail);

  const std::vector<Index>& stem() const { return stem_; }
  const SelectorTail& tail() const { return tail_; }
  bool is_finite() const { return std::holds_alternative<selector_tail::None>(tail_); }

  /// σ(n). PreconditionError past the stem of a finite selector.
  Index operator()(Index n) const;

  /// σ(1..n) in one pass.
  std::vector<Index> prefix(Index n) const;

  bool in_image(Index i) const;

  /// Im(σ) ∩ [1, k], ascending. UnsupportedError when a finite selector cannot decide it.
  std::vector<Index> image_upto(Index k) const;

  /// Selector spec; Filtered tails built in code render with their name and need not reparse.
  std::string spec() const;

 private:
  std::vector<Index> stem_;
  SelectorTail tail_;
};

/// Scan budget for Filtered tails.
inline constexpr Index kSelectorScanCap = 50'000'000;

Selector identity_selector();
Selector consecutive_after(std::vector<Index> stem);
/// Bernoulli(p) image starting at `from`, drawn from counter_hash(seed, m).
Selector bernoulli_selector(std::vector<Index> stem, std::uint64_t seed, const Rational& p, Index from);

/// Selector specs:
///   "id" | "even" | "gen:<name>" | "random:<seed>:<p>"
///   "stem:{t1,...}" [ "+consec" [":" v] | "+gen:<name>" | "+random:<seed>:<p>" ]
/// Generator names: even (2n), odd (2n-1), succ (n+1), even-plus (2n+2), squares, powers2, shift:<k>.
Selector parse_selector(std::string_view spec);

/// y_n = x_{σ(n)} for n <= N.
std::vector<Rational> apply_selector(const Selector& s, const Sequence& x, Index N);

/// σ(x) as a lazily evaluated sequence; the first `horizon` indices of σ are precomputed.
Sequence subsequence(const Sequence& x, const Selector& s, Index horizon);

struct MetricInterval {
  Rational lo;
  Rational hi;
  Index resolution = 0;
};

/// Enclosure of d(σ1, σ2) = Σ_{i ∈ Im σ1 △ Im σ2} 2^{-i} from the indices i <= K.
MetricInterval metric(const Selector& a, const Selector& b, Index K);

/// σ(s) = t_s for every s <= |stem|.
bool ball_contains(const std::vector<Index>& stem, const Selector& s);

/// Absolutely summable row with a certified tail bound tail(k) >= Σ_{i>k} |a_i|.
struct SummableRow {
  std::string spec;
  std::function<Rational(Index)> entry;
  std::function<Rational(Index)> tail;
};

SummableRow geometric_row();
SummableRow finite_row(std::vector<Rational> entries);

struct Modulus {
  Index k0 = 0;
  /// Uniform radius 2^{-k0}; Rational(2) in the degenerate case x = 0.
  Rational delta;
  bool degenerate = false;

  /// Radius 2^{-σ(k0)} around a fixed σ: d < it forces agreement of σ and σ' on [1, k0].
  Rational anchored_delta(const Selector& s) const;
};

/// Least k0 with tail(k0) < ε / (2‖x‖), δ = 2^{-k0}. SearchCapError beyond k_cap.
Modulus modulus_of_continuity(const Rational& sup_norm, const SummableRow& a, const Rational& eps,
                              Index k_cap = 4096);

struct Enclosure {
  Rational lo;
  Rational hi;
};

/// Enclosure of Σ_k a_k x_{σ(k)} from the terms k <= K plus sup_norm · tail(K).
Enclosure functional_enclosure(const SummableRow& a, const Selector& s, const Sequence& x, const Rational& sup_norm,
                               Index K);

enum class ContractCheck { Holds, Violated, Inconclusive };

struct ModulusPairCheck {
  MetricInterval distance;
  /// distance.hi < radius, so the pair falls under the contract.
  bool in_scope = false;
  Enclosure gap;  // enclosure of |a·σ1(x) - a·σ2(x)|
  ContractCheck result = ContractCheck::Inconclusive;
};

/// Evaluates "d < radius ⇒ |a·σ1(x) − a·σ2(x)| < ε" on one pair at resolution K.
ModulusPairCheck check_modulus_pair(const SummableRow& a, const Sequence& x, const Rational& sup_norm,
                                    const Rational& eps, const Rational& radius, const Selector& s1,
                                    const Selector& s2, Index K);

/// Finite selector whose stem contains each n <= N independently with probability p.
Selector sample_selector(std::uint64_t seed, const Rational& p, Index N);

}  // namespace tauber
