#include "tauber/regularity.hpp"

#include <algorithm>

#include "tauber/ideal_limit.hpp"

namespace tauber {

namespace {

constexpr Index kDetailedColumns = 8;
constexpr std::size_t kWitnessRows = 3;



ConditionVerdict from_limit(const IdealLimitVerdict& v, const Rational& target, Index scale) {
  ConditionVerdict c;
  c.scale = scale;
  c.reason = v.reason;
  if (v.status == LimitStatus::Limit && v.eta && *v.eta == target)
    c.status = v.certified ? ConditionStatus::Holds : ConditionStatus::HoldsUpTo;
  else if (v.status == LimitStatus::NoLimitEvidence && v.certified)
    c.status = ConditionStatus::Fails;
  return c;
}

ConditionVerdict r1_verdict(const SummabilityMatrix& A, const ClosedForms& cf, Index n_rows, Index k_cols) {
  ConditionVerdict c;
  c.scale = n_rows;
  if (cf.infinite_row) {
    c.status = ConditionStatus::Fails;
    c.witness_rows = {*cf.infinite_row};
    c.reason = "row " + std::to_string(*cf.infinite_row) + " has divergent absolute sum";
    return c;
  }
  if (cf.abs_row_sum_sup) {
    c.status = ConditionStatus::Holds;
    c.bound = cf.abs_row_sum_sup;
    c.reason = "closed form: sup_n sum_k |a_{n,k}| = " + to_string(*cf.abs_row_sum_sup);
    return c;
  }
  Rational best = 0;
  Index arg = 1;
  for (Index n = 1; n <= n_rows; ++n) {
    Rational s = 0;
    if (row_finite(A)) {
      for (const auto& [k, a] : row_entries(A, n)) s += abs(a);
    } else {
      for (Index k = 1; k <= k_cols; ++k) s += abs(entry(A, n, k));
    }
    if (s > best) {
      best = s;
      arg = n;
    }
  }
  c.status = ConditionStatus::HoldsUpTo;
  c.bound = best;
  c.witness_rows = {arg};
  c.reason = "sampled sup over rows <= " + std::to_string(n_rows);
  return c;
}

std::vector<Rational> column_values(const SummabilityMatrix& A, Index k, Index n_rows) {
  std::vector<Rational> y;
  y.reserve(n_rows);
  for (Index n = 1; n <= n_rows; ++n) y.push_back(entry(A, n, k));
  return y;
}

ConditionVerdict column_verdict(const SummabilityMatrix& A, const IdealPresentation& I, const ClosedForms& cf, Index k,
                                Index n_rows) {
  if (cf.columns_vanish == Tri::Yes) {
    auto lv = ideal_limit(LimitShape{Rational(0), finite_set({}), Rational(1)}, I, n_rows);
    auto c = from_limit(lv, Rational(0), n_rows);
    c.witness_column = k;
    c.reason = "closed form: column " + std::to_string(k) + " tends to 0";
    return c;
  }
  auto lv = ideal_limit(column_values(A, k, n_rows), I, {}, {Rational(0)});
  auto c = from_limit(lv, Rational(0), n_rows);
  c.witness_column = k;
  return c;
}

ConditionVerdict r2_verdict(const SummabilityMatrix& A, const IdealPresentation& I, const ClosedForms& cf,
                            Index n_rows, Index k_cols, std::vector<ConditionVerdict>& details) {
  ConditionVerdict c;
  c.scale = n_rows;
  if (cf.columns_vanish == Tri::No && cf.constant_column) {
    c.status = ConditionStatus::Fails;
    c.witness_column = cf.constant_column;
    c.reason = "column " + std::to_string(*cf.constant_column) + " is a nonzero constant";
  } else if (cf.columns_vanish == Tri::Yes) {
    c.status = ConditionStatus::Holds;
    c.reason = "closed form: every column tends to 0";
  }
  const Index shown = std::min(k_cols, kDetailedColumns);
  bool all_up_to = true;
  for (Index k = 1; k <= (c.status == ConditionStatus::Undecided ? k_cols : shown); ++k) {
    auto d = column_verdict(A, I, cf, k, n_rows);
    all_up_to = all_up_to && (d.status == ConditionStatus::Holds || d.status == ConditionStatus::HoldsUpTo);
    if (k <= shown) details.push_back(std::move(d));
  }
  if (c.status == ConditionStatus::Undecided && all_up_to) {
    c.status = ConditionStatus::HoldsUpTo;
    c.reason = "columns 1.." + std::to_string(k_cols) + " show vanishing evidence up to row " + std::to_string(n_rows);
  } else if (c.status == ConditionStatus::Undecided) {
    c.reason = "column limits undecided at scale " + std::to_string(n_rows);
  }
  return c;
}

ConditionVerdict r3_verdict(const SummabilityMatrix& A, const IdealPresentation& I, const ClosedForms& cf,
                            Index n_rows, Index k_cols) {
  if (cf.row_sum_exceptions) {
    auto lv = ideal_limit(LimitShape{Rational(1), *cf.row_sum_exceptions, cf.row_sum_gap}, I, n_rows);
    auto c = from_limit(lv, Rational(1), n_rows);
    if (c.status == ConditionStatus::Fails) {
      std::vector<Index> rows;
      try {
        rows = elements_upto(*cf.row_sum_exceptions, std::max<Index>(n_rows, 1));
      } catch (const std::exception&) {
      }
      if (rows.size() > kWitnessRows) rows.resize(kWitnessRows);
      c.witness_rows = rows;
    }
    if (c.status == ConditionStatus::Holds) c.bound = Rational(1);
    return c;
  }
  std::vector<Rational> sums;
  sums.reserve(n_rows);
  for (Index n = 1; n <= n_rows; ++n) {
    Rational s = 0;
    if (row_finite(A)) {
      for (const auto& [k, a] : row_entries(A, n)) s += a;
    } else {
      for (Index k = 1; k <= k_cols; ++k) s += entry(A, n, k);
    }
    sums.push_back(std::move(s));
  }
  auto lv = ideal_limit(sums, I, {}, {Rational(1)});
  auto c = from_limit(lv, Rational(1), n_rows);
  if (!row_finite(A) && c.status == ConditionStatus::HoldsUpTo)
    c.reason += " (row sums truncated at column " + std::to_string(k_cols) + ")";
  return c;
}

}  // namespace

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Holds: return "Holds";
    case ConditionStatus::HoldsUpTo: return "HoldsUpTo";
    case ConditionStatus::Fails: return "Fails";
    case ConditionStatus::Undecided: return "Undecided";
  }
  return "?";
}

std::string RegularityVerdict::label() const {
  switch (overall) {
    case RegularityStatus::Regular: return "Regular";
    case RegularityStatus::RegularUpTo: return "RegularUpTo(" + std::to_string(scale) + ")";
    case RegularityStatus::NotRegular: return "NotRegular(" + witness + ")";
    case RegularityStatus::Undecided: return "UndecidedUpTo(" + std::to_string(scale) + ")";
  }
  return "?";
}

RegularityVerdict regularity_verdict(const SummabilityMatrix& A, const IdealPresentation& I, Index n_rows,
                                     Index k_cols) {

  RegularityVerdict v;
  v.scale = n_rows;
  ClosedForms cf = closed_forms(A);
  v.r1 = r1_verdict(A, cf, n_rows, k_cols);
  v.r2 = r2_verdict(A, I, cf, n_rows, k_cols, v.r2_columns);
  v.r3 = r3_verdict(A, I, cf, n_rows, k_cols);

  auto describe = [](const char* name, const ConditionVerdict& c) {
    std::string w = std::string(name) + " fails";
    if (!c.witness_rows.empty()) {
      w += " at rows";
      for (Index r : c.witness_rows) w += " " + std::to_string(r);
    }
    if (c.witness_column) w += " at column " + std::to_string(*c.witness_column);
    return w;
  };
  const ConditionVerdict* all[] = {&v.r1, &v.r2, &v.r3};
  const char* names[] = {"R1", "R2", "R3"};
  bool certified = true, up_to = true;
  for (int i = 0; i < 3; ++i) {
    const auto& c = *all[i];
    if (c.status == ConditionStatus::Fails) {
      v.overall = RegularityStatus::NotRegular;
      v.witness = describe(names[i], c);
      return v;
    }
    certified = certified && c.status == ConditionStatus::Holds;
    up_to = up_to && (c.status == ConditionStatus::Holds || c.status == ConditionStatus::HoldsUpTo);
  }
  v.overall = certified ? RegularityStatus::Regular : up_to ? RegularityStatus::RegularUpTo : RegularityStatus::Undecided;
  return v;
}

}  // namespace tauber
