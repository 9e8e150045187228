#include "tauber/ideals.hpp"

#include <algorithm>
#include <numeric>

#include "tauber/errors.hpp"
#include "tauber/regularity.hpp"

namespace tauber {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Index floor_log2(Index n) { return 63 - static_cast<Index>(__builtin_clzll(n)); }

constexpr unsigned kAuditColumns = 20;
constexpr Index kMaxColumnPeriod = Index{1} << 20;

ColumnStatus normalized(ColumnStatus s) {
  if (s.finite == Tri::Yes) s.cofinite = Tri::No;
  if (s.cofinite == Tri::Yes) s.finite = Tri::No;
  return s;
}

ColumnStatus flip(ColumnStatus s) { return {s.cofinite, s.finite}; }

ColumnStatus join(ColumnStatus a, ColumnStatus b) {
  ColumnStatus r;
  if (a.finite == Tri::Yes && b.finite == Tri::Yes)
    r.finite = Tri::Yes;
  else if (a.finite == Tri::No || b.finite == Tri::No)
    r.finite = Tri::No;
  if (a.cofinite == Tri::Yes || b.cofinite == Tri::Yes) r.cofinite = Tri::Yes;
  return normalized(r);
}

ColumnStatus meet(ColumnStatus a, ColumnStatus b) { return flip(join(flip(a), flip(b))); }

ColumnProfile combine(const ColumnProfile& a, const ColumnProfile& b, ColumnStatus (*op)(ColumnStatus, ColumnStatus)) {
  ColumnProfile out;
  std::size_t h = std::max(a.head.size(), b.head.size());
  std::size_t c = std::lcm(a.cycle.size(), b.cycle.size());
  for (std::size_t k = 0; k < h; ++k) out.head.push_back(op(a.at(k), b.at(k)));
  for (std::size_t i = 0; i < c; ++i) out.cycle.push_back(op(a.at(h + i), b.at(h + i)));
  return out;
}

std::optional<ColumnProfile> periodic_profile(const SetDescription& S, const Periodicity& p) {
  const Index P = p.period;
  if (P > kMaxColumnPeriod) return std::nullopt;
  const unsigned e = nu2(P);
  const Index o = P >> e;
  const Index T = std::max<Index>(p.threshold, 1);
  ColumnProfile out;
  for (unsigned k = 0; k < e; ++k) {
    Index total = 0, in = 0;
    for (Index n = T; n < T + P; ++n) {
      if (nu2(n) != k) continue;
      ++total;
      in += member(S, n) ? 1 : 0;
    }
    out.head.push_back(normalized({in == 0 ? Tri::Yes : Tri::No, in == total ? Tri::Yes : Tri::No}));
  }
  // Columns k >= e meet every residue class mod o; membership there depends only on n mod o.
  const Index step = Index{1} << e;
  const Index J = (T + step - 1) / step;
  Index in = 0;
  for (Index j = J; j < J + o; ++j) in += member(S, j * step) ? 1 : 0;
  out.cycle.push_back(normalized({in == 0 ? Tri::Yes : Tri::No, in == o ? Tri::Yes : Tri::No}));
  return out;
}

std::vector<Index> evidence_ladder(const IdealPresentation& I, Index scale) { return I.checkpoints(scale); }

void add_density_evidence(MembershipVerdict& v, const IdealPresentation& I, const SetDescription& S, Index scale) {
  if (scale == 0) return;
  v.density = density_report(S, scale, evidence_ladder(I, scale));
}

MembershipVerdict finite_verdict(const IdealPresentation& I, const SetDescription& S, Index scale) {
  MembershipVerdict v;
  v.scale = scale;
  SetFacts f = analyze(S);
  if (f.finite == Tri::Yes) {
    v.status = Membership::In;
    v.reason = "finite by structure";
  } else if (f.finite == Tri::No) {
    v.status = Membership::NotIn;
    v.reason = "infinite by structure";
  } else {
    v.reason = "finiteness not derivable from the description";
  }
  add_density_evidence(v, I, S, scale);
  return v;
}

MembershipVerdict density_verdict(const IdealPresentation& I, const SetDescription& S, Index scale) {
  MembershipVerdict v;
  v.scale = scale;
  SetFacts f = analyze(S);
  if (f.upper_density.hi == 0) {
    v.status = Membership::In;
    if (std::holds_alternative<set_node::Squares>(S.node().value))
      v.reason = "closed form: |S ∩ [1,N]| = floor(sqrt(N)), so the density is 0";
    else
      v.reason = "upper density 0 by structure";
  } else if (f.upper_density.lo > 0) {
    v.status = Membership::NotIn;
    if (auto d = f.density())
      v.reason = "exact density " + to_string(*d);
    else
      v.reason = "upper density >= " + to_string(f.upper_density.lo) + " by structure";
  } else {
    v.reason = "density not derivable from the description";
  }
  add_density_evidence(v, I, S, scale);
  return v;
}

MembershipVerdict banach_verdict(const IdealPresentation& I, const SetDescription& S, Index scale) {
  MembershipVerdict v;
  v.scale = scale;
  SetFacts f = analyze(S);
  if (f.upper_banach.hi == 0) {
    v.status = Membership::In;
    v.reason = "upper Banach density 0 by structure";
  } else if (f.upper_banach.lo > 0) {
    v.status = Membership::NotIn;
    v.reason = "upper Banach density >= " + to_string(f.upper_banach.lo) + " by structure";
  } else {
    v.reason = "Banach density not derivable from the description";
  }
  add_density_evidence(v, I, S, scale);
  if (scale > 0 && v.status == Membership::Undecided) {
    auto bits = indicator(S, scale);
    for (Index L = 1; L <= scale; L *= 2) v.windows.emplace_back(L, max_window_density(bits, scale, L));
  }
  return v;
}

MembershipVerdict column_verdict(const SetDescription& S, Index scale) {
  MembershipVerdict v;
  v.scale = scale;
  auto profile = column_profile(S);
  if (profile) {
    bool all_finite = true, some_infinite = false;
    for (const auto& c : profile->cycle) {
      all_finite = all_finite && c.finite == Tri::Yes;
      some_infinite = some_infinite || c.finite == Tri::No;
    }
    if (all_finite) {
      v.status = Membership::In;
      v.column_threshold = static_cast<unsigned>(profile->head.size());
      v.reason = "every column k >= " + std::to_string(profile->head.size()) + " is finite by structure";
    } else if (some_infinite) {
      v.status = Membership::NotIn;
      v.reason = "infinitely many infinite columns by structure";
    } else {
      v.reason = "column traces not decided by structure";
    }
  } else {
    v.reason = "no column structure derivable from the description";
  }
  if (scale > 0) {
    auto bits = indicator(S, scale);
    std::vector<Index> counts(kAuditColumns + 1, 0);
    for (Index n = 1; n <= scale; ++n)
      if (bits[n] && nu2(n) <= kAuditColumns) ++counts[nu2(n)];
    for (unsigned k = 0; k <= kAuditColumns && (Index{1} << k) <= scale; ++k) v.column_audit.emplace_back(k, counts[k]);
  }
  return v;
}

MembershipVerdict matrix_verdict(const IdealPresentation& I, const SetDescription& S, Index scale) {
  const auto& A = *I.matrix();
  if (std::holds_alternative<matrix_kind::Cesaro>(A.node().value)) {
    auto v = density_verdict(I, S, scale);
    v.reason = "Cesàro transform of an indicator is its prefix density; " + v.reason;
    return v;
  }
  if (std::holds_alternative<matrix_kind::Identity>(A.node().value)) {
    auto v = finite_verdict(I, S, scale);
    v.reason = "identity transform of an indicator is the indicator; " + v.reason;
    return v;
  }
  MembershipVerdict v;
  v.scale = scale;
  SetFacts f = analyze(S);
  if (f.finite == Tri::Yes) {
    v.status = Membership::In;
    v.reason = "finite set: columns of a regular matrix tend to 0";
  } else if (f.cofinite == Tri::Yes) {
    v.status = Membership::NotIn;
    v.reason = "cofinite set: row sums of a regular matrix tend to 1";
  } else {
    v.reason = "no certified dominating bound for the transform of the indicator";
  }
  if (scale > 0 && row_finite(A)) {
    auto ladder = I.checkpoints(scale);
    Index cols = columns_needed(A, ladder.back());
    if (cols <= kEnumerationCap) {
      std::vector<Rational> ind;
      ind.reserve(cols);
      auto bits = indicator(S, cols);
      for (Index k = 1; k <= cols; ++k) ind.emplace_back(bits[k] ? 1 : 0);
      auto t = transform_rowfinite(A, ind, ladder.back());
      for (Index n : ladder) v.transform_values.emplace_back(n, t[n - 1]);
    }
  }
  return v;
}

}  // namespace

ColumnStatus ColumnProfile::at(Index k) const {
  if (k < head.size()) return head[k];
  return cycle[(k - head.size()) % cycle.size()];
}

IdealPresentation IdealPresentation::fin() { return {IdealKind::Fin, std::nullopt}; }
IdealPresentation IdealPresentation::z() { return {IdealKind::Z, std::nullopt}; }
IdealPresentation IdealPresentation::bd() { return {IdealKind::BD, std::nullopt}; }
IdealPresentation IdealPresentation::fin_x_fin() { return {IdealKind::FinXFin, std::nullopt}; }

IdealPresentation IdealPresentation::nonneg_matrix(SummabilityMatrix A) {
  if (nonnegative(A) != Tri::Yes) throw PreconditionError("matrix ideal needs certified nonnegative entries");
  auto r = regularity_verdict(A, fin(), 1024, 64);
  if (r.overall != RegularityStatus::Regular)
    throw PreconditionError("matrix ideal needs a regular matrix; verdict under fin: " + r.label());
  return {IdealKind::NonnegMatrix, std::move(A)};
}

std::string IdealPresentation::name() const {
  switch (kind_) {
    case IdealKind::Fin: return "fin";
    case IdealKind::Z: return "z";
    case IdealKind::BD: return "bd";
    case IdealKind::FinXFin: return "finxfin";
    case IdealKind::NonnegMatrix: return "matrix:" + matrix_spec(*matrix_);
  }
  return "?";
}

std::vector<Index> IdealPresentation::checkpoints(Index scale) const {
  std::vector<Index> out;
  for (int shift = 4; shift >= 0; --shift) {
    Index n = scale >> shift;
    if (n >= 1 && (out.empty() || n > out.back())) out.push_back(n);
  }
  return out;
}

IdealPresentation parse_ideal(std::string_view name) {
  if (name == "fin") return IdealPresentation::fin();
  if (name == "z") return IdealPresentation::z();
  if (name == "bd") return IdealPresentation::bd();
  if (name == "finxfin") return IdealPresentation::fin_x_fin();
  if (name.rfind("matrix:", 0) == 0) return IdealPresentation::nonneg_matrix(parse_matrix(name.substr(7)));
  throw ParseError("unknown ideal '" + std::string(name) + "'", 0);
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::In: return "In";
    case Membership::NotIn: return "NotIn";
    case Membership::Undecided: return "Undecided";
  }
  return "?";
}

std::string MembershipVerdict::label() const {
  std::string s = status == Membership::Undecided ? "UndecidedUpTo(" + std::to_string(scale) + ")" : to_string(status);
  return dual ? s + "-dual" : s;
}

std::optional<ColumnProfile> column_profile(const SetDescription& S) {
  SetFacts facts = analyze(S);
  if (facts.periodic) return periodic_profile(S, *facts.periodic);
  const ColumnStatus finite_col{Tri::Yes, Tri::No};
  const ColumnStatus full_col{Tri::No, Tri::Yes};
  const ColumnStatus partial_col{Tri::No, Tri::No};
  return std::visit(
      Overloaded{
          [&](const set_node::Squares&) -> std::optional<ColumnProfile> {
            // ν₂ of a square is even, and each even column holds infinitely many (but not all) squares.
            return ColumnProfile{{}, {partial_col, finite_col}};
          },
          [&](const set_node::Powers2&) -> std::optional<ColumnProfile> { return ColumnProfile{{}, {finite_col}}; },
          [&](const set_node::Nu2AtLeast& v) -> std::optional<ColumnProfile> {
            if (v.min_valuation > 64) return std::nullopt;
            return ColumnProfile{std::vector<ColumnStatus>(v.min_valuation, finite_col), {full_col}};
          },
          [&](const set_node::DyadicBlocks& d) -> std::optional<ColumnProfile> {
            SetFacts sel = analyze(d.selector);
            if (sel.finite == Tri::Yes) return ColumnProfile{{}, {finite_col}};
            if (sel.finite == Tri::No) {
              // Every block [2^q, 2^{q+1}) with q > k meets column k.
              Tri cof = sel.cofinite == Tri::Yes ? Tri::Yes : sel.cofinite == Tri::No ? Tri::No : Tri::Unknown;
              return ColumnProfile{{}, {normalized({Tri::No, cof})}};
            }
            return std::nullopt;
          },
          [&](const set_node::Complement& c) -> std::optional<ColumnProfile> {
            auto inner = column_profile(c.inner);
            if (!inner) return std::nullopt;
            for (auto& s : inner->head) s = flip(s);
            for (auto& s : inner->cycle) s = flip(s);
            return inner;
          },
          [&](const set_node::Union& u) -> std::optional<ColumnProfile> {
            auto a = column_profile(u.left);
            auto b = column_profile(u.right);
            if (!a || !b) return std::nullopt;
            return combine(*a, *b, join);
          },
          [&](const set_node::Intersection& u) -> std::optional<ColumnProfile> {
            auto a = column_profile(u.left);
            auto b = column_profile(u.right);
            if (!a || !b) return std::nullopt;
            return combine(*a, *b, meet);
          },
          [](const auto&) -> std::optional<ColumnProfile> { return std::nullopt; },
      },
      S.node().value);
}

MembershipVerdict verdict(const IdealPresentation& I, const SetDescription& S, Index scale) {
  if (scale > kEnumerationCap)
    throw ScaleCapError("scale " + std::to_string(scale) + " exceeds the cap of " + std::to_string(kEnumerationCap));
  switch (I.kind()) {
    case IdealKind::Fin: return finite_verdict(I, S, scale);
    case IdealKind::Z: return density_verdict(I, S, scale);
    case IdealKind::BD: return banach_verdict(I, S, scale);
    case IdealKind::FinXFin: return column_verdict(S, scale);
    case IdealKind::NonnegMatrix: return matrix_verdict(I, S, scale);
  }
  throw Error("unknown ideal kind");
}

MembershipVerdict dual_member(const IdealPresentation& I, const SetDescription& S, Index scale) {
  // Unwrap an explicit complement so structural facts of the inner set survive.
  const auto* c = std::get_if<set_node::Complement>(&S.node().value);
  auto v = verdict(I, c ? c->inner : complement(S), scale);
  v.dual = true;
  return v;
}

IntervalPartition IntervalPartition::singletons() { return {Shape::Singletons, std::nullopt}; }
IntervalPartition IntervalPartition::dyadic() { return {Shape::Dyadic, std::nullopt}; }

IntervalPartition IntervalPartition::restricted_to(SetDescription T) const {
  if (restriction_) return {shape_, intersection(*restriction_, std::move(T))};
  return {shape_, std::move(T)};
}

std::string IntervalPartition::name() const {
  std::string s = shape_ == Shape::Singletons ? "singletons" : "dyadic";
  if (restriction_) s += " restricted to " + render(*restriction_);
  return s;
}

std::pair<Index, Index> IntervalPartition::ambient(Index q) const {
  if (q == 0) throw PreconditionError("block indices start at 1");
  if (shape_ == Shape::Singletons) return {q, q};
  if (q > 62) throw SearchCapError("dyadic block index beyond 62");
  return {Index{1} << q, (Index{1} << (q + 1)) - 1};
}

Index IntervalPartition::ambient_of(Index n) const {
  if (shape_ == Shape::Singletons) {
    if (n == 0) throw PreconditionError("0 is not covered");
    return n;
  }
  if (n < 2) throw PreconditionError("1 is not covered by the dyadic blocks");
  return floor_log2(n);
}

bool IntervalPartition::ambient_nonempty(Index q) const {
  if (!restriction_) return true;
  auto [lo, hi] = ambient(q);
  for (Index m = lo; m <= hi; ++m) {
    if (member(*restriction_, m)) return true;
    if (m - lo >= kEnumerationCap) throw SearchCapError("block scan exceeded the enumeration cap");
  }
  return false;
}

Index IntervalPartition::boundary(Index q) const {
  if (!restriction_) return ambient(q).first;
  return block(q).front();
}

std::vector<Index> IntervalPartition::block(Index q) const {
  if (q == 0) throw PreconditionError("block indices start at 1");
  Index aq = q;
  if (restriction_) {
    Index seen = 0;
    for (aq = 1;; ++aq) {
      if (aq > kEnumerationCap) throw SearchCapError("restricted block not found within the cap");
      if (ambient_nonempty(aq) && ++seen == q) break;
    }
  }
  auto [lo, hi] = ambient(aq);
  if (hi - lo >= kEnumerationCap) throw ScaleCapError("block too large to enumerate");
  std::vector<Index> out;
  for (Index m = lo; m <= hi; ++m)
    if (!restriction_ || member(*restriction_, m)) out.push_back(m);
  return out;
}

Index IntervalPartition::block_of(Index n) const {
  Index aq = ambient_of(n);
  if (!restriction_) return aq;
  if (!member(*restriction_, n)) throw PreconditionError(std::to_string(n) + " lies outside the restriction");
  if (shape_ == Shape::Singletons) return count_prefix(*restriction_, n);
  Index idx = 0;
  for (Index q = 1; q <= aq; ++q) idx += ambient_nonempty(q) ? 1 : 0;
  return idx;
}

IntervalPartition talagrand_partition(const IdealPresentation& I) {
  switch (I.kind()) {
    case IdealKind::Fin: return IntervalPartition::singletons();
    case IdealKind::Z:
    case IdealKind::BD: return IntervalPartition::dyadic();
    case IdealKind::NonnegMatrix:
      if (std::holds_alternative<matrix_kind::Cesaro>(I.matrix()->node().value)) return IntervalPartition::dyadic();
      if (std::holds_alternative<matrix_kind::Identity>(I.matrix()->node().value))
        return IntervalPartition::singletons();
      break;
    case IdealKind::FinXFin: break;
  }
  throw UnsupportedError("no Talagrand partition is provided for ideal " + I.name());
}

SetDescription nonideal_from_partition(const IntervalPartition& P, const SetDescription& block_selector) {
  if (P.restriction()) throw UnsupportedError("nonideal_from_partition needs an unrestricted partition");
  if (analyze(block_selector).finite != Tri::No)
    throw PreconditionError("block selector " + render(block_selector) + " is not certifiably infinite");
  if (P.shape() == IntervalPartition::Shape::Singletons) return block_selector;
  return dyadic_blocks(block_selector);
}

MembershipVerdict RestrictedIdeal::verdict(const SetDescription& S, Index scale) const {
  return tauber::verdict(ambient, S, scale);
}

RestrictedIdeal restrict(const IdealPresentation& I, const SetDescription& T, Index scale) {
  auto v = dual_member(I, T, scale);
  if (v.status != Membership::In)
    throw PreconditionError(render(T) + " is not certified in the dual filter of " + I.name() + " (" + v.label() +
                            ")");
  return RestrictedIdeal{I, T, talagrand_partition(I).restricted_to(T)};
}

}  // namespace tauber
