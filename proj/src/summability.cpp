#include "tauber/summability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tauber/errors.hpp"

namespace tauber {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

SummabilityMatrix make(auto value) {
  return SummabilityMatrix(std::make_shared<const MatrixNode>(MatrixNode{std::move(value)}));
}

const SparseRow* stored_row(const matrix_kind::Explicit& e, Index n) {
  return n <= e.rows.size() ? &e.rows[n - 1] : nullptr;
}

Rational lookup(const SparseRow& row, Index k) {
  auto it = std::lower_bound(row.begin(), row.end(), k, [](const auto& p, Index c) { return p.first < c; });
  return it != row.end() && it->first == k ? it->second : Rational(0);
}

SetDescription initial_segment(Index last) {
  std::vector<Index> e;
  for (Index i = 1; i <= last; ++i) e.push_back(i);
  return finite_set(std::move(e));
}

bool is_empty_finite(const SetDescription& s) {
  const auto* f = std::get_if<set_node::Finite>(&s.node().value);
  return f && f->elements.empty();
}

/// Whether row n alone has finite support.
bool row_is_finite(const SummabilityMatrix& A, Index n) {
  return std::visit(Overloaded{
                        [&](const matrix_kind::RowDrop& d) { return member(d.dropped, n) || row_is_finite(d.base, n); },
                        [&](const matrix_kind::Explicit& e) {
                          if (stored_row(e, n)) return true;
                          return !e.tail || row_is_finite(*e.tail, n);
                        },
                        [&](const matrix_kind::Generator& g) { return static_cast<bool>(g.support); },
                        [](const auto&) { return true; },
                    },
                    A.node().value);
}

/// Decay tag governing an infinitely supported row n.
std::optional<GeometricDecay> row_decay(const SummabilityMatrix& A, Index n) {
  return std::visit(Overloaded{
                        [&](const matrix_kind::RowDrop& d) { return row_decay(d.base, n); },
                        [&](const matrix_kind::Explicit& e) -> std::optional<GeometricDecay> {
                          if (!e.tail) return std::nullopt;
                          return row_decay(*e.tail, n);
                        },
                        [&](const matrix_kind::Generator& g) { return g.decay; },
                        [](const auto&) -> std::optional<GeometricDecay> { return std::nullopt; },
                    },
                    A.node().value);
}

Rational pow_q(const Rational& base, Index e) {
  Rational out = 1;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  out.canonicalize();
  return out;
}

/// Certified bound on Σ_{k>K} C ρ^k B k^d; nullopt while the term ratio bound is not yet below 1.
std::optional<Rational> weighted_tail(const GeometricDecay& decay, const GrowthEnvelope& env, Index K) {
  const Rational& rho = decay.ratio;
  Rational step = rho * pow_q(ratio(K + 2, K + 1), env.degree);
  if (step >= 1) return std::nullopt;
  Rational first = decay.coefficient * env.coefficient * pow_q(rho, K + 1) * pow_q(ratio(K + 1, 1), env.degree);
  return first / (1 - step);
}

/// Least K <= cap (found by doubling then bisection) with weighted_tail(K) <= tol.
std::optional<std::pair<Index, Rational>> tail_columns(const GeometricDecay& decay, const GrowthEnvelope& env,
                                                       const Rational& tol, Index cap) {
  if (tol <= 0) return std::nullopt;
  auto ok = [&](Index K) {
    auto t = weighted_tail(decay, env, K);
    return t && *t <= tol;
  };
  Index hi = 1;
  while (!ok(hi)) {
    if (hi >= cap) return std::nullopt;
    hi = std::min(cap, hi * 2);
  }
  Index lo = hi / 2;  // ok(lo) false or lo == 0
  while (lo + 1 < hi) {
    Index mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return std::make_pair(hi, *weighted_tail(decay, env, hi));
}

void check_decay(const GeometricDecay& d) {
  if (d.coefficient < 0 || d.ratio <= 0 || d.ratio >= 1)
    throw std::invalid_argument("geometric decay needs coefficient >= 0 and ratio in (0,1)");
}

void fill_rowfinite(const SummabilityMatrix& A, const std::vector<Rational>& x, Index n_max,
                    std::vector<Rational>& out) {
  auto xk = [&](Index k) -> const Rational& {
    if (k > x.size())
      throw PreconditionError("row reaches column " + std::to_string(k) + " beyond the " + std::to_string(x.size()) +
                              " known terms of x");
    return x[k - 1];
  };
  std::visit(Overloaded{
                 [&](const matrix_kind::Cesaro&) {
                   Rational sum = 0;
                   for (Index n = 1; n <= n_max; ++n) {
                     sum += xk(n);
                     out[n - 1] = sum / ratio(n, 1);
                   }
                 },
                 [&](const matrix_kind::Identity&) {
                   for (Index n = 1; n <= n_max; ++n) out[n - 1] = xk(n);
                 },
                 [&](const matrix_kind::RowDrop& d) {
                   fill_rowfinite(d.base, x, n_max, out);
                   for (Index n : elements_upto(d.dropped, n_max)) out[n - 1] = 0;
                 },
                 [&](const matrix_kind::Explicit& e) {
                   if (e.tail && n_max > e.rows.size())
                     fill_rowfinite(*e.tail, x, n_max, out);
                   else
                     std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_max), Rational(0));
                   for (Index n = 1; n <= std::min<Index>(n_max, e.rows.size()); ++n) {
                     Rational v = 0;
                     for (const auto& [k, a] : e.rows[n - 1]) v += a * xk(k);
                     out[n - 1] = v;
                   }
                 },
                 [&](const matrix_kind::Generator&) {
                   for (Index n = 1; n <= n_max; ++n) {
                     Rational v = 0;
                     for (const auto& [k, a] : row_entries(A, n)) v += a * xk(k);
                     out[n - 1] = v;
                   }
                 },
             },
             A.node().value);
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

SummabilityMatrix cesaro() { return make(matrix_kind::Cesaro{}); }
SummabilityMatrix identity_matrix() { return make(matrix_kind::Identity{}); }
SummabilityMatrix row_drop(SummabilityMatrix base, SetDescription dropped) {
  return make(matrix_kind::RowDrop{std::move(base), std::move(dropped)});
}

SummabilityMatrix explicit_matrix(std::vector<SparseRow> rows, std::optional<SummabilityMatrix> tail) {
  for (auto& r : rows) {
    std::erase_if(r, [](const auto& p) { return p.second == 0; });
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].first == 0) throw std::invalid_argument("matrix columns start at 1");
      if (i > 0 && r[i].first <= r[i - 1].first) throw std::invalid_argument("row columns must increase");
    }
  }
  return make(matrix_kind::Explicit{std::move(rows), std::move(tail)});
}

SummabilityMatrix dense_explicit_matrix(const std::vector<std::vector<Rational>>& rows,
                                        std::optional<SummabilityMatrix> tail) {
  std::vector<SparseRow> sparse;
  for (const auto& r : rows) {
    SparseRow s;
    for (Index k = 1; k <= r.size(); ++k)
      if (r[k - 1] != 0) s.emplace_back(k, r[k - 1]);
    sparse.push_back(std::move(s));
  }
  return explicit_matrix(std::move(sparse), std::move(tail));
}

SummabilityMatrix generator_matrix(matrix_kind::Generator g) {
  if (!g.entry) throw std::invalid_argument("generator needs an entry function");
  if (g.decay) check_decay(*g.decay);
  return make(std::move(g));
}

SummabilityMatrix named_generator(std::string_view name) {
  matrix_kind::Generator g;
  g.name = std::string(name);
  if (name == "geometric") {
    g.entry = [](Index, Index k) { return pow2_inv(static_cast<unsigned>(k)); };
    g.decay = GeometricDecay{Rational(1), Rational(1, 2)};
    g.traits.abs_row_sum_sup = Rational(1);
    g.traits.columns_vanish = Tri::No;
    g.traits.constant_column = 1;
    g.traits.row_sums_one = true;
    g.traits.nonnegative = Tri::Yes;
  } else if (name == "harmonic") {
    g.entry = [](Index, Index k) { return ratio(1, k); };
    g.traits.infinite_row = 1;
    g.traits.columns_vanish = Tri::No;
    g.traits.constant_column = 1;
    g.traits.nonnegative = Tri::Yes;
  } else if (name == "window2") {
    g.entry = [](Index n, Index k) { return k == n || k == n + 1 ? Rational(1, 2) : Rational(0); };
    g.support = [](Index n) { return n + 1; };
    g.traits.abs_row_sum_sup = Rational(1);
    g.traits.columns_vanish = Tri::Yes;
    g.traits.row_sums_one = true;
    g.traits.nonnegative = Tri::Yes;
    g.traits.zero_rows = [](Index w) { return initial_segment(w >= 2 ? w - 2 : 0); };
  } else if (name == "tail-ones") {
    g.entry = [](Index, Index k) { return Rational(k >= 3 ? 1 : 0); };
    g.traits.infinite_row = 1;
    g.traits.columns_vanish = Tri::No;
    g.traits.constant_column = 3;
    g.traits.nonnegative = Tri::Yes;
  } else {
    throw ParseError("unknown generator '" + std::string(name) + "'", 0);
  }
  return generator_matrix(std::move(g));
}

std::vector<std::vector<Rational>> read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'", 0);
  std::vector<std::vector<Rational>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<Rational> r;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) r.push_back(parse_rational(trim(field)));
    rows.push_back(std::move(r));
  }
  return rows;
}

SummabilityMatrix parse_matrix(std::string_view spec) {
  if (spec == "cesaro") return cesaro();
  if (spec == "identity") return identity_matrix();
  if (spec.rfind("gen:", 0) == 0) return named_generator(spec.substr(4));
  if (spec.rfind("rowdrop:", 0) == 0) {
    std::string_view rest = spec.substr(8);
    std::size_t cut = rest.find(':');
    if (rest.rfind("gen:", 0) == 0) cut = rest.find(':', 4);
    if (cut == std::string_view::npos) throw ParseError("rowdrop needs <base>:<set>", spec.size());
    auto base = parse_matrix(rest.substr(0, cut));
    SetDescription dropped = [&] {
      try {
        return parse_set(rest.substr(cut + 1));
      } catch (const ParseError& e) {
        throw ParseError(std::string("in drop set: ") + e.what(), 8 + cut + 1 + e.position());
      }
    }();
    return row_drop(std::move(base), std::move(dropped));
  }
  if (spec.rfind("explicit:@", 0) == 0) {
    std::string_view rest = spec.substr(10);
    std::optional<SummabilityMatrix> tail;
    std::size_t plus = rest.find('+');
    if (plus != std::string_view::npos) {
      tail = parse_matrix(rest.substr(plus + 1));
      rest = rest.substr(0, plus);
    }
    return dense_explicit_matrix(read_matrix_csv(std::string(rest)), std::move(tail));
  }
  throw ParseError("unknown matrix spec '" + std::string(spec) + "'", 0);
}

std::string matrix_spec(const SummabilityMatrix& A) {
  return std::visit(Overloaded{
                        [](const matrix_kind::Cesaro&) { return std::string("cesaro"); },
                        [](const matrix_kind::Identity&) { return std::string("identity"); },
                        [](const matrix_kind::RowDrop& d) {
                          return "rowdrop:" + matrix_spec(d.base) + ":" + render(d.dropped);
                        },
                        [](const matrix_kind::Explicit& e) {
                          std::string s = "explicit:inline";
                          if (e.tail) s += "+" + matrix_spec(*e.tail);
                          return s;
                        },
                        [](const matrix_kind::Generator& g) { return "gen:" + g.name; },
                    },
                    A.node().value);
}

Rational entry(const SummabilityMatrix& A, Index n, Index k) {
  return std::visit(Overloaded{
                        [&](const matrix_kind::Cesaro&) { return k <= n ? ratio(1, n) : Rational(0); },
                        [&](const matrix_kind::Identity&) { return Rational(k == n ? 1 : 0); },
                        [&](const matrix_kind::RowDrop& d) {
                          return member(d.dropped, n) ? Rational(0) : entry(d.base, n, k);
                        },
                        [&](const matrix_kind::Explicit& e) {
                          if (const auto* r = stored_row(e, n)) return lookup(*r, k);
                          return e.tail ? entry(*e.tail, n, k) : Rational(0);
                        },
                        [&](const matrix_kind::Generator& g) {
                          if (g.support && k > g.support(n)) return Rational(0);
                          return g.entry(n, k);
                        },
                    },
                    A.node().value);
}

std::vector<Rational> row(const SummabilityMatrix& A, Index n, Index K) {
  if (n == 0 || K == 0) throw PreconditionError("row needs n, K >= 1");
  std::vector<Rational> out;
  out.reserve(K);
  for (Index k = 1; k <= K; ++k) out.push_back(entry(A, n, k));
  return out;
}

bool row_finite(const SummabilityMatrix& A) {
  return std::visit(Overloaded{
                        [](const matrix_kind::RowDrop& d) { return row_finite(d.base); },
                        [](const matrix_kind::Explicit& e) { return !e.tail || row_finite(*e.tail); },
                        [](const matrix_kind::Generator& g) { return static_cast<bool>(g.support); },
                        [](const auto&) { return true; },
                    },
                    A.node().value);
}

Index last_nonzero(const SummabilityMatrix& A, Index n) {
  return std::visit(Overloaded{
                        [&](const matrix_kind::Cesaro&) { return n; },
                        [&](const matrix_kind::Identity&) { return n; },
                        [&](const matrix_kind::RowDrop& d) {
                          return member(d.dropped, n) ? Index{0} : last_nonzero(d.base, n);
                        },
                        [&](const matrix_kind::Explicit& e) {
                          if (const auto* r = stored_row(e, n)) return r->empty() ? Index{0} : r->back().first;
                          return e.tail ? last_nonzero(*e.tail, n) : Index{0};
                        },
                        [&](const matrix_kind::Generator& g) {
                          if (!g.support)
                            throw UnsupportedError("generator '" + g.name + "' has rows with infinite support");
                          for (Index k = g.support(n); k >= 1; --k)
                            if (g.entry(n, k) != 0) return k;
                          return Index{0};
                        },
                    },
                    A.node().value);
}

SparseRow row_entries(const SummabilityMatrix& A, Index n) {
  return std::visit(Overloaded{
                        [&](const matrix_kind::Cesaro&) {
                          SparseRow r;
                          r.reserve(n);
                          Rational v = ratio(1, n);
                          for (Index k = 1; k <= n; ++k) r.emplace_back(k, v);
                          return r;
                        },
                        [&](const matrix_kind::Identity&) { return SparseRow{{n, Rational(1)}}; },
                        [&](const matrix_kind::RowDrop& d) {
                          return member(d.dropped, n) ? SparseRow{} : row_entries(d.base, n);
                        },
                        [&](const matrix_kind::Explicit& e) {
                          if (const auto* r = stored_row(e, n)) return *r;
                          return e.tail ? row_entries(*e.tail, n) : SparseRow{};
                        },
                        [&](const matrix_kind::Generator& g) {
                          if (!g.support)
                            throw UnsupportedError("generator '" + g.name + "' has rows with infinite support");
                          SparseRow r;
                          for (Index k = 1, top = g.support(n); k <= top; ++k) {
                            Rational v = g.entry(n, k);
                            if (v != 0) r.emplace_back(k, std::move(v));
                          }
                          return r;
                        },
                    },
                    A.node().value);
}

Tri nonnegative(const SummabilityMatrix& A) {
  return std::visit(Overloaded{
                        [](const matrix_kind::RowDrop& d) { return nonnegative(d.base); },
                        [](const matrix_kind::Explicit& e) {
                          for (const auto& r : e.rows)
                            for (const auto& p : r)
                              if (p.second < 0) return Tri::No;
                          return e.tail ? nonnegative(*e.tail) : Tri::Yes;
                        },
                        [](const matrix_kind::Generator& g) { return g.traits.nonnegative; },
                        [](const auto&) { return Tri::Yes; },
                    },
                    A.node().value);
}

Index columns_needed(const SummabilityMatrix& A, Index n_max) {
  return std::visit(Overloaded{
                        [&](const matrix_kind::RowDrop& d) { return columns_needed(d.base, n_max); },
                        [&](const matrix_kind::Explicit& e) {
                          Index c = 0;
                          for (Index n = 1; n <= std::min<Index>(n_max, e.rows.size()); ++n)
                            if (!e.rows[n - 1].empty()) c = std::max(c, e.rows[n - 1].back().first);
                          if (e.tail && n_max > e.rows.size()) c = std::max(c, columns_needed(*e.tail, n_max));
                          return c;
                        },
                        [&](const matrix_kind::Generator& g) {
                          if (!g.support)
                            throw UnsupportedError("generator '" + g.name + "' has rows with infinite support");
                          Index c = 0;
                          for (Index n = 1; n <= n_max; ++n) c = std::max(c, g.support(n));
                          return c;
                        },
                        [&](const auto&) { return n_max; },
                    },
                    A.node().value);
}

std::vector<Rational> transform_rowfinite(const SummabilityMatrix& A, const std::vector<Rational>& x, Index n_max) {
  if (!row_finite(A)) throw UnsupportedError("matrix is not row-finite");
  std::vector<Rational> out(n_max);
  fill_rowfinite(A, x, n_max, out);
  return out;
}

std::vector<TransformValue> transform_prefix(const SummabilityMatrix& A, const Sequence& x, Index n_max,
                                             const Rational& tail_tol, Index column_cap) {
  std::vector<TransformValue> out;
  out.reserve(n_max);
  if (row_finite(A)) {
    auto values = transform_rowfinite(A, x.prefix(columns_needed(A, n_max)), n_max);
    for (Index n = 1; n <= n_max; ++n) out.push_back({n, std::move(values[n - 1]), Rational(0)});
    return out;
  }
  auto norm = x.sup_norm();
  if (!norm)
    throw UnsupportedError("x carries no sup-norm bound; refusing to transform it by a matrix with infinite rows");
  for (Index n = 1; n <= n_max; ++n) {
    if (row_is_finite(A, n)) {
      Rational v = 0;
      for (const auto& [k, a] : row_entries(A, n)) v += a * x(k);
      out.push_back({n, v, Rational(0)});
      continue;
    }
    auto decay = row_decay(A, n);
    if (!decay) throw UnsupportedError("row " + std::to_string(n) + " has infinite support and no decay tag");
    auto cols = tail_columns(*decay, GrowthEnvelope{*norm, 0}, tail_tol, column_cap);
    if (!cols)
      throw SearchCapError("tail tolerance " + to_string(tail_tol) + " unreachable within " +
                           std::to_string(column_cap) + " columns at row " + std::to_string(n));
    Rational v = 0;
    for (Index k = 1; k <= cols->first; ++k) v += entry(A, n, k) * x(k);
    out.push_back({n, v, cols->second});
  }
  return out;
}

DomainCheck domain_check(const SummabilityMatrix& A, const Sequence& x, Index n, const Rational& tol,
                         Index column_cap) {
  if (n == 0) throw PreconditionError("domain_check needs n >= 1");
  DomainCheck out{DomainStatus::Inconclusive, Rational(0), Rational(0), 0, ""};
  if (row_is_finite(A, n)) {
    for (const auto& [k, a] : row_entries(A, n)) {
      out.value += a * x(k);
      out.columns = k;
    }
    out.status = DomainStatus::Converged;
    out.evidence = "row " + std::to_string(n) + " is finitely supported";
    return out;
  }
  auto decay = row_decay(A, n);
  if (decay && x.envelope()) {
    if (auto cols = tail_columns(*decay, *x.envelope(), tol, column_cap)) {
      for (Index k = 1; k <= cols->first; ++k) out.value += entry(A, n, k) * x(k);
      out.status = DomainStatus::Converged;
      out.columns = cols->first;
      out.error_bound = cols->second;
      out.evidence = "geometric row decay against the growth envelope of x bounds the tail beyond column " +
                     std::to_string(cols->first) + " by " + to_string(cols->second);
      return out;
    }
  }
  // No certificate available: scan terms up to the cap.
  long double partial = 0, half = 0;
  Index last_big = 0;
  Rational big_term = 0;
  const Rational threshold = 2 * tol;
  for (Index k = 1; k <= column_cap; ++k) {
    Rational t = entry(A, n, k) * x(k);
    if (abs(t) > threshold) {
      last_big = k;
      big_term = t;
    }
    partial += static_cast<long double>(to_double(t));
    if (k == column_cap / 2) half = partial;
  }
  out.columns = column_cap;
  out.value = Rational(static_cast<double>(partial));
  std::ostringstream ev;
  if (last_big > column_cap / 2) {
    out.status = DomainStatus::Diverging;
    ev << "term " << to_string(big_term) << " at column " << last_big << " exceeds 2*tol beyond column "
       << column_cap / 2;
  } else {
    ev.precision(12);
    ev << "no tail certificate; partial sums " << static_cast<double>(half) << " at column " << column_cap / 2
       << " and " << static_cast<double>(partial) << " at column " << column_cap;
  }
  out.evidence = ev.str();
  return out;
}

Index RowProfile::last_nonzero(Index n) const {
  if (n == 0 || n > n_max) throw PreconditionError("row outside the profiled range");
  return r[n - 1];
}

std::vector<Index> RowProfile::zero_rows_prefix(Index w) const {
  std::vector<Index> out;
  for (Index n = 1; n <= n_max; ++n)
    if (r[n - 1] < w) out.push_back(n);
  return out;
}

RowProfile row_profile(const SummabilityMatrix& A, Index n_max) {
  if (!row_finite(A)) throw UnsupportedError("row_profile needs a row-finite matrix");
  RowProfile p{n_max, {}, A};
  p.r.reserve(n_max);
  for (Index n = 1; n <= n_max; ++n) p.r.push_back(tauber::last_nonzero(A, n));
  return p;
}

std::optional<SetDescription> zero_row_set(const SummabilityMatrix& A, Index w) {
  return std::visit(
      Overloaded{
          [&](const matrix_kind::Cesaro&) -> std::optional<SetDescription> { return initial_segment(w - 1); },
          [&](const matrix_kind::Identity&) -> std::optional<SetDescription> { return initial_segment(w - 1); },
          [&](const matrix_kind::RowDrop& d) -> std::optional<SetDescription> {
            auto base = zero_row_set(d.base, w);
            if (!base) return std::nullopt;
            return set_union(d.dropped, *base);
          },
          [&](const matrix_kind::Explicit& e) -> std::optional<SetDescription> {
            std::vector<Index> head;
            for (Index n = 1; n <= e.rows.size(); ++n) {
              const auto& r = e.rows[n - 1];
              if ((r.empty() ? 0 : r.back().first) < w) head.push_back(n);
            }
            SetDescription beyond = complement(initial_segment(e.rows.size()));
            if (e.tail) {
              auto t = zero_row_set(*e.tail, w);
              if (!t) return std::nullopt;
              beyond = intersection(*t, beyond);
            }
            return set_union(finite_set(std::move(head)), beyond);
          },
          [&](const matrix_kind::Generator& g) -> std::optional<SetDescription> {
            if (!g.traits.zero_rows) return std::nullopt;
            return g.traits.zero_rows(w);
          },
      },
      A.node().value);
}

ClosedForms closed_forms(const SummabilityMatrix& A) {
  return std::visit(
      Overloaded{
          [](const matrix_kind::RowDrop& d) {
            ClosedForms b = closed_forms(d.base);
            ClosedForms f;
            f.abs_row_sum_sup = b.abs_row_sum_sup;
            if (b.infinite_row && !member(d.dropped, *b.infinite_row)) f.infinite_row = b.infinite_row;
            f.columns_vanish = b.columns_vanish == Tri::Yes ? Tri::Yes : Tri::Unknown;
            if (b.row_sum_exceptions) {
              f.row_sum_exceptions =
                  is_empty_finite(*b.row_sum_exceptions) ? d.dropped : set_union(d.dropped, *b.row_sum_exceptions);
              f.row_sum_gap = b.row_sum_gap < 1 ? b.row_sum_gap : Rational(1);
            }
            return f;
          },
          [](const matrix_kind::Explicit& e) {
            ClosedForms f;
            ClosedForms t;
            if (e.tail) t = closed_forms(*e.tail);
            Rational sup = 0;
            std::vector<Index> off;
            Rational gap = 1;
            for (Index n = 1; n <= e.rows.size(); ++n) {
              Rational abs_sum = 0, sum = 0;
              for (const auto& p : e.rows[n - 1]) {
                abs_sum += abs(p.second);
                sum += p.second;
              }
              sup = std::max(sup, abs_sum);
              if (sum != 1) {
                off.push_back(n);
                gap = std::min(gap, Rational(abs(sum - 1)));
              }
            }
            SetDescription beyond = complement(initial_segment(e.rows.size()));
            if (!e.tail) {
              f.abs_row_sum_sup = sup;
              f.columns_vanish = Tri::Yes;
              f.row_sum_exceptions = set_union(finite_set(std::move(off)), beyond);
              f.row_sum_gap = gap;
              return f;
            }
            if (t.abs_row_sum_sup) f.abs_row_sum_sup = std::max(sup, *t.abs_row_sum_sup);
            if (t.infinite_row && *t.infinite_row > e.rows.size()) f.infinite_row = t.infinite_row;
            f.columns_vanish = t.columns_vanish == Tri::Yes ? Tri::Yes : Tri::Unknown;
            if (t.row_sum_exceptions) {
              f.row_sum_exceptions = set_union(finite_set(std::move(off)), intersection(*t.row_sum_exceptions, beyond));
              f.row_sum_gap = std::min(gap, t.row_sum_gap);
            }
            return f;
          },
          [](const matrix_kind::Generator& g) {
            ClosedForms f;
            f.abs_row_sum_sup = g.traits.abs_row_sum_sup;
            f.infinite_row = g.traits.infinite_row;
            f.columns_vanish = g.traits.columns_vanish;
            f.constant_column = g.traits.constant_column;
            if (g.traits.row_sums_one) f.row_sum_exceptions = finite_set({});
            return f;
          },
          [](const auto&) {
            ClosedForms f;
            f.abs_row_sum_sup = Rational(1);
            f.columns_vanish = Tri::Yes;
            f.row_sum_exceptions = finite_set({});
            return f;
          },
      },
      A.node().value);
}

}  // namespace tauber
