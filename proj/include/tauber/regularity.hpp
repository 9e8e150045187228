#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tauber/ideals.hpp"
#include "tauber/summability.hpp"

namespace tauber {

enum class ConditionStatus { Holds, HoldsUpTo, Fails, Undecided };

struct ConditionVerdict {
  ConditionStatus status = ConditionStatus::Undecided;
  std::optional<Rational> bound;
  std::vector<Index> witness_rows;
  std::optional<Index> witness_column;
  Index scale = 0;
  std::string reason;
};

enum class RegularityStatus { Regular, RegularUpTo, NotRegular, Undecided };

struct RegularityVerdict {
  ConditionVerdict r1;
  /// Summary over all columns.
  ConditionVerdict r2;
  /// Details for the first columns.
  std::vector<ConditionVerdict> r2_columns;
  ConditionVerdict r3;
  RegularityStatus overall = RegularityStatus::Undecided;
  Index scale = 0;
  std::string witness;

  /// "Regular", "RegularUpTo(N)", "NotRegular(<witness>)", "UndecidedUpTo(N)".
  std::string label() const;
};

std::string to_string(ConditionStatus s);

/// (Fin, I)-regularity via R1 (bounded absolute row sums), R2 (columns I-tend to 0) and
/// R3 (row sums I-tend to 1). Regular only when all three are certified.
RegularityVerdict regularity_verdict(const SummabilityMatrix& A, const IdealPresentation& I, Index n_rows,
                                     Index k_cols);

}  // namespace tauber
