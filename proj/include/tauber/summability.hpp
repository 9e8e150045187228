#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tauber/rational.hpp"
#include "tauber/sequence.hpp"
#include "tauber/setlang.hpp"

namespace tauber {

struct MatrixNode;

/// Nonzero entries of one row, ascending by column.
using SparseRow = std::vector<std::pair<Index, Rational>>;

/// Immutable infinite matrix (a_{n,k}), n, k >= 1. Copies share structure.
class SummabilityMatrix {
 public:
  explicit SummabilityMatrix(std::shared_ptr<const MatrixNode> node) : node_(std::move(node)) {}
  const MatrixNode& node() const { return *node_; }

 private:
  std::shared_ptr<const MatrixNode> node_;
};

/// Facts a generator may declare about itself. Unset fields are treated as unknown.
struct GeneratorTraits {
  /// Exact sup_n Σ_k |a_{n,k}|.
  std::optional<Rational> abs_row_sum_sup;
  /// Row with Σ_k |a_{n,k}| = ∞, if any.
  std::optional<Index> infinite_row;
  /// Every column tends to 0 along n (Yes), or some column is constant nonzero (No).
  Tri columns_vanish = Tri::Unknown;
  /// Column with constant nonzero value, witnessing columns_vanish == No.
  std::optional<Index> constant_column;
  /// Σ_k a_{n,k} = 1 for every n.
  bool row_sums_one = false;
  Tri nonnegative = Tri::Unknown;
  /// Structural Z_w when known.
  std::function<SetDescription(Index w)> zero_rows;
};

/// |a_{n,k}| <= coefficient * ratio^k for every n, k.
struct GeometricDecay {
  Rational coefficient;
  Rational ratio;  // in (0, 1)
};

namespace matrix_kind {
struct Cesaro {};
struct Identity {};
struct RowDrop {
  SummabilityMatrix base;
  SetDescription dropped;
};
/// Stored rows 1..rows.size(); later rows are row n of `tail`, or zero rows when absent.
struct Explicit {
  std::vector<SparseRow> rows;
  std::optional<SummabilityMatrix> tail;
};
struct Generator {
  std::string name;
  std::function<Rational(Index n, Index k)> entry;
  /// a_{n,k} = 0 for k > support(n). Absent for rows with infinite support.
  std::function<Index(Index n)> support;
  std::optional<GeometricDecay> decay;
  GeneratorTraits traits;
};
}  // namespace matrix_kind

struct MatrixNode {
  std::variant<matrix_kind::Cesaro, matrix_kind::Identity, matrix_kind::RowDrop, matrix_kind::Explicit,
               matrix_kind::Generator>
      value;
};

SummabilityMatrix cesaro();
SummabilityMatrix identity_matrix();
SummabilityMatrix row_drop(SummabilityMatrix base, SetDescription dropped);
/// Drops zero entries; validates column order.
SummabilityMatrix explicit_matrix(std::vector<SparseRow> rows, std::optional<SummabilityMatrix> tail = std::nullopt);
SummabilityMatrix dense_explicit_matrix(const std::vector<std::vector<Rational>>& rows,
                                        std::optional<SummabilityMatrix> tail = std::nullopt);
SummabilityMatrix generator_matrix(matrix_kind::Generator g);

/// Named generators: "geometric" (a_{n,k} = 2^-k), "harmonic" (a_{n,k} = 1/k),
/// "window2" (a_{n,n} = a_{n,n+1} = 1/2), "tail-ones" (a_{n,k} = 1 for k >= 3).
SummabilityMatrix named_generator(std::string_view name);

/// "cesaro", "identity", "rowdrop:<base>:<set>", "explicit:@file.csv[+<tail spec>]", "gen:<name>".
/// <base> is any spec without a colon, or "gen:<name>".
SummabilityMatrix parse_matrix(std::string_view spec);

/// Canonical spec string. Explicit matrices render as "explicit:inline" and need matrix_rows() to rebuild.
std::string matrix_spec(const SummabilityMatrix& A);

/// CSV rows of rationals; column k is the k-th field.
std::vector<std::vector<Rational>> read_matrix_csv(const std::string& path);

Rational entry(const SummabilityMatrix& A, Index n, Index k);

/// (a_{n,1}, ..., a_{n,K}).
std::vector<Rational> row(const SummabilityMatrix& A, Index n, Index K);

/// Every row has finite support, structurally.
bool row_finite(const SummabilityMatrix& A);

/// Last nonzero column of row n, 0 for a zero row. UnsupportedError if the row is not finitely supported.
Index last_nonzero(const SummabilityMatrix& A, Index n);

/// Nonzero entries of a finitely supported row.
SparseRow row_entries(const SummabilityMatrix& A, Index n);

/// Entrywise nonnegativity, certified structurally.
Tri nonnegative(const SummabilityMatrix& A);

struct TransformValue {
  Index n;
  Rational value;
  Rational tail_bound;
};

/// (Ax)_n for n = 1..n_max. Row-finite matrices are exact. Rows with infinite support need a
/// GeometricDecay tag and a growth envelope on x; columns are added until the certified tail
/// drops to tail_tol (SearchCapError past column_cap).
std::vector<TransformValue> transform_prefix(const SummabilityMatrix& A, const Sequence& x, Index n_max,
                                             const Rational& tail_tol, Index column_cap = 1'000'000);

/// Exact (Ax)_n for n = 1..n_max given a row-finite A and x known through column needed.
/// x[k-1] = x_k. Throws PreconditionError if a row reaches past x.
std::vector<Rational> transform_rowfinite(const SummabilityMatrix& A, const std::vector<Rational>& x, Index n_max);

/// Columns of A needed to evaluate rows 1..n_max exactly.
Index columns_needed(const SummabilityMatrix& A, Index n_max);

enum class DomainStatus { Converged, Diverging, Inconclusive };

struct DomainCheck {
  DomainStatus status;
  Rational value;       // partial sum at `columns`
  Rational error_bound; // certified |series - value| when Converged
  Index columns = 0;
  std::string evidence;
};

/// Convergence of Σ_k a_{n,k} x_k.
DomainCheck domain_check(const SummabilityMatrix& A, const Sequence& x, Index n, const Rational& tol, Index column_cap);

struct RowProfile {
  Index n_max = 0;
  std::vector<Index> r;  // r[n-1] = last nonzero column of row n
  SummabilityMatrix matrix;

  Index last_nonzero(Index n) const;
  /// Z_w ∩ [1, n_max].
  std::vector<Index> zero_rows_prefix(Index w) const;
};

RowProfile row_profile(const SummabilityMatrix& A, Index n_max);

/// Z_w = {n : a_{n,k} = 0 for all k >= w} as a description, when the structure determines it.
std::optional<SetDescription> zero_row_set(const SummabilityMatrix& A, Index w);

/// Closed-form knowledge used by the regularity verdict.
struct ClosedForms {
  std::optional<Rational> abs_row_sum_sup;
  std::optional<Index> infinite_row;
  Tri columns_vanish = Tri::Unknown;
  std::optional<Index> constant_column;
  /// Row sums equal exactly 1 off this set; on it, |s_n - 1| >= row_sum_gap.
  std::optional<SetDescription> row_sum_exceptions;
  Rational row_sum_gap{1};
};

ClosedForms closed_forms(const SummabilityMatrix& A);

}  // namespace tauber
