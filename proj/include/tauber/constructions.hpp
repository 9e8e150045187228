#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tauber/ideal_limit.hpp"
#include "tauber/ideals.hpp"
#include "tauber/rational.hpp"
#include "tauber/sequence.hpp"
#include "tauber/sigma.hpp"
#include "tauber/summability.hpp"

namespace tauber {

/// Choices made while building an escape selector. Unused fields stay empty.
struct EscapeAudit {
  std::optional<Index> i0, t0;                 // single-row escape
  std::optional<Index> w0, n0, p1, q0, k0;     // row-finite escape
  std::optional<Rational> alpha;
  std::optional<Rational> stem_sum;            // Σ_{k<=j} a_k x_{t_k}
};

struct EscapeResult {
  Selector selector;
  /// Rows whose transformed values were required to escape.
  std::vector<Index> target_rows;
  /// Required magnitude for each target row.
  Rational bound;
  /// Exact values at the target rows.
  std::vector<Rational> values;
  /// min |value| over the target rows.
  Rational achieved;
  bool verified = false;
  EscapeAudit audit;
};

struct SearchCaps {
  Index index_cap = 1'000'000;    // nonzero-entry search
  Index scan_cap = 10'000'000;    // |x_t| search without a growth witness
};

/// Extends `stem` so that |Σ_{k<=i0} a_k x_{σ0(k)}| >= m0 + 1, where i0 is the first nonzero entry past the stem.
/// VerificationError if the exact postcondition fails (it never should).
EscapeResult escape_unbounded(const std::vector<Index>& stem, const SummableRow& a, const Sequence& x,
                              const Rational& m0, const SearchCaps& caps = {});

/// Extends `stem` so that |(Aσ0(x))_n| >= m0 on a whole block of I's partition restricted to the rows
/// depending on columns past the stem. PreconditionError unless that row set is certified in the dual filter.
EscapeResult escape_rowfinite(const std::vector<Index>& stem, const SummabilityMatrix& A, const Sequence& x,
                              const IdealPresentation& I, const Rational& m0, Index p0 = 1,
                              const SearchCaps& caps = {});

struct OscillationPair {
  Selector upper;  // picks x_n >= alpha - tol
  Selector lower;  // picks x_n <= beta + tol
  Rational alpha;  // max of x over the second half of the prefix
  Rational beta;   // min of x over the second half of the prefix
  Index row = 0;
  /// (Aσ1(x))_row - (Aσ2(x))_row, and a certified bound on its truncation error.
  Rational gap;
  Rational gap_error;
};

/// Two selectors through `stem`, one tracking the prefix limsup of x and one the liminf.
/// PreconditionError when alpha - beta <= 2 tol on both the last half and the last quarter of x_1..x_N.
OscillationPair oscillation_pair(const std::vector<Index>& stem, const Sequence& x, const SummabilityMatrix& A,
                                 Index N, const Rational& tol);

enum class AdversaryMode { Blocks, Greedy };

struct AdversaryPhase {
  bool high = true;
  Index start = 0;   // first position of the run
  Index length = 0;
  bool met_quota = false;
};

struct AdversaryResult {
  std::vector<char> x;  // x[n-1] = x_n ∈ {0, 1}
  /// (Ax)_1..(Ax)_N.
  std::vector<Rational> y;
  std::optional<OscillationCertificate> certificate;
  /// "blocks:unit", "blocks:doubling" or "greedy".
  std::string construction;
  std::vector<AdversaryPhase> phases;
  bool audit_passed = false;
  std::string diagnostic;
};

/// Densities below this are reported as a failure rather than a certificate.
inline const Rational kAdversaryMinDensity{1, 16};

/// Searches for x ∈ {0,1}^N with Ax oscillating across (lower, upper). A must be row-finite and
/// Regular (or RegularUpTo) under `under`; PreconditionError otherwise.
AdversaryResult steinhaus_adversary(const SummabilityMatrix& A, AdversaryMode mode, Index N, const Rational& lower,
                                    const Rational& upper, const IdealPresentation& under = IdealPresentation::fin());

/// 1 on [4^j, 2·4^j), 0 on [2·4^j, 4^{j+1}).
std::vector<char> doubling_blocks(Index N);

enum class DemoKind { Escape, Oscillation };

struct DemoRound {
  Index round = 0;
  std::vector<Index> stem;
  DemoKind kind = DemoKind::Escape;
  std::string selector;         // escape selector, or the upper selector of a pair
  std::string partner;          // lower selector of a pair
  Rational bound;               // m_r
  Rational achieved;
  bool verified = false;
};

/// Each round draws a stem from the seeded stream and escapes from it (unbounded x with a growth witness)
/// or splits it into an oscillation pair (bounded x). An empty schedule means m_r = 2^{r-1}.
std::vector<DemoRound> meagerness_demo(const Sequence& x, const SummabilityMatrix& A, const IdealPresentation& I,
                                       std::vector<Rational> m_schedule, Index rounds, std::uint64_t seed);

}  // namespace tauber
