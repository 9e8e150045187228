#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tauber/rational.hpp"
#include "tauber/setlang.hpp"
#include "tauber/summability.hpp"

namespace tauber {

enum class IdealKind { Fin, Z, BD, FinXFin, NonnegMatrix };

/// A named ideal on N together with its default checkpoint ladder.
class IdealPresentation {
 public:
  static IdealPresentation fin();
  static IdealPresentation z();
  static IdealPresentation bd();
  static IdealPresentation fin_x_fin();
  /// Requires certified nonnegative entries and a Regular verdict under Fin (PreconditionError otherwise).
  static IdealPresentation nonneg_matrix(SummabilityMatrix A);

  IdealKind kind() const { return kind_; }
  const std::optional<SummabilityMatrix>& matrix() const { return matrix_; }

  /// "fin", "z", "bd", "finxfin", "matrix:<spec>".
  std::string name() const;

  /// N/16, N/8, N/4, N/2, N (deduplicated, all >= 1).
  std::vector<Index> checkpoints(Index scale) const;

 private:
  IdealPresentation(IdealKind kind, std::optional<SummabilityMatrix> m) : kind_(kind), matrix_(std::move(m)) {}
  IdealKind kind_;
  std::optional<SummabilityMatrix> matrix_;
};

IdealPresentation parse_ideal(std::string_view name);

enum class Membership { In, NotIn, Undecided };

std::string to_string(Membership m);

struct MembershipVerdict {
  Membership status = Membership::Undecided;
  /// Scale of the evidence; for Undecided this is N in UndecidedUpTo(N). 0 when no scale was used.
  Index scale = 0;
  /// The verdict concerns the dual filter (dual_member).
  bool dual = false;
  std::string reason;
  std::optional<DensityReport> density;
  /// (L, max window density) for the Banach engine.
  std::vector<std::pair<Index, Rational>> windows;
  /// (k, |S ∩ {m <= N : ν₂(m) = k}|) for Fin×Fin.
  std::vector<std::pair<unsigned, Index>> column_audit;
  /// (n, (A 1_S)_n) for matrix ideals.
  std::vector<std::pair<Index, Rational>> transform_values;
  /// Fin×Fin: columns k >= this are uniform in status.
  std::optional<unsigned> column_threshold;

  /// "In", "NotIn", "UndecidedUpTo(N)", with a "-dual" suffix for dual queries.
  std::string label() const;
};

/// Three-valued membership of S in I. Closed forms and structural facts decide In/NotIn;
/// otherwise UndecidedUpTo(scale) with prefix evidence. scale = 0 skips evidence.
MembershipVerdict verdict(const IdealPresentation& I, const SetDescription& S, Index scale);

/// verdict(I, complement(S), scale), labelled for the dual filter.
MembershipVerdict dual_member(const IdealPresentation& I, const SetDescription& S, Index scale);

/// Tail status of one ν₂-column trace {n ∈ S : ν₂(n) = k}.
struct ColumnStatus {
  Tri finite = Tri::Unknown;
  Tri cofinite = Tri::Unknown;  // relative to the column
};

/// Column k has status head[k] for k < head.size(), else cycle[(k - head.size()) % cycle.size()].
struct ColumnProfile {
  std::vector<ColumnStatus> head;
  std::vector<ColumnStatus> cycle;

  ColumnStatus at(Index k) const;
};

std::optional<ColumnProfile> column_profile(const SetDescription& S);

/// Blocks I_q = [σ(q), σ(q+1)) of an interval partition, optionally intersected with a set T
/// (empty intersections dropped and the rest reindexed from 1).
class IntervalPartition {
 public:
  enum class Shape { Singletons, Dyadic };

  static IntervalPartition singletons();
  static IntervalPartition dyadic();

  IntervalPartition restricted_to(SetDescription T) const;

  Shape shape() const { return shape_; }
  const std::optional<SetDescription>& restriction() const { return restriction_; }
  std::string name() const;

  /// σ(q) for the unrestricted partition: q for singletons, 2^q for dyadic (q >= 1).
  Index boundary(Index q) const;

  /// Elements of block q (q >= 1), ascending.
  std::vector<Index> block(Index q) const;

  /// Index of the block containing n. PreconditionError if n is not covered.
  Index block_of(Index n) const;

 private:
  IntervalPartition(Shape s, std::optional<SetDescription> t) : shape_(s), restriction_(std::move(t)) {}
  std::pair<Index, Index> ambient(Index q) const;
  Index ambient_of(Index n) const;
  bool ambient_nonempty(Index q) const;

  Shape shape_;
  std::optional<SetDescription> restriction_;
};

/// Fin: singletons. Z, BD: dyadic. NonnegMatrix: Cesàro-like matrices follow Z, Identity follows Fin.
IntervalPartition talagrand_partition(const IdealPresentation& I);

/// ∪_{q ∈ selector} I_q for an unrestricted partition. The selector must be certifiably infinite.
SetDescription nonideal_from_partition(const IntervalPartition& P, const SetDescription& block_selector);

/// I restricted to a dual-filter set T.
struct RestrictedIdeal {
  IdealPresentation ambient;
  SetDescription domain;
  IntervalPartition partition;

  MembershipVerdict verdict(const SetDescription& S, Index scale) const;
};

/// PreconditionError unless dual_member(I, T) is In.
RestrictedIdeal restrict(const IdealPresentation& I, const SetDescription& T, Index scale = 0);

}  // namespace tauber
