#include "tauber/constructions.hpp"

#include <algorithm>
#include <map>

#include "tauber/errors.hpp"
#include "tauber/prng.hpp"
#include "tauber/regularity.hpp"

namespace tauber {
namespace {

bool is_cesaro_like(const SummabilityMatrix& A) {
  const auto& v = A.node().value;
  if (std::holds_alternative<matrix_kind::Cesaro>(v)) return true;
  if (auto* d = std::get_if<matrix_kind::RowDrop>(&v)) return std::holds_alternative<matrix_kind::Cesaro>(d->base.node().value);
  return false;
}

// Rows of Ax that become exact as x grows, evaluated once each.
class IncrementalTransform {
 public:
  explicit IncrementalTransform(const SummabilityMatrix& A) : A_(A), cesaro_(is_cesaro_like(A)) {
    if (auto* d = std::get_if<matrix_kind::RowDrop>(&A.node().value)) dropped_ = d->dropped;
  }

  /// Evaluates every row whose support lies inside x; returns the new values.
  std::vector<Rational> advance(const std::vector<char>& x, Index row_cap) {
    std::vector<Rational> fresh;
    while (ready_ < row_cap) {
      const Index n = ready_ + 1;
      if (cesaro_) {
        if (n > x.size()) break;
        running_ += x[n - 1];
        fresh.push_back(dropped_ && member(*dropped_, n) ? Rational(0) : ratio(running_, n));
      } else {
        if (last_nonzero(A_, n) > x.size()) break;
        Rational v = 0;
        for (const auto& [k, a] : row_entries(A_, n))
          if (x[k - 1]) v += a;
        fresh.push_back(v);
      }
      ++ready_;
    }
    return fresh;
  }

  Index ready() const { return ready_; }

 private:
  const SummabilityMatrix& A_;
  bool cesaro_;
  std::optional<SetDescription> dropped_;
  Index ready_ = 0;
  Index running_ = 0;
};

std::vector<Rational> as_rationals(const std::vector<char>& bits) {
  std::vector<Rational> out;
  out.reserve(bits.size());
  for (char b : bits) out.push_back(Rational(b ? 1 : 0));
  return out;
}

// Best witnessed scale on the ladder N/16, N/8, ..., N.
std::pair<Index, Index> best_scale(const std::vector<Rational>& y, Index N, bool upper, const Rational& threshold) {
  std::vector<Index> prefix(N + 1, 0);
  for (Index n = 1; n <= N; ++n)
    prefix[n] = prefix[n - 1] + ((upper ? y[n - 1] >= threshold : y[n - 1] <= threshold) ? 1 : 0);
  std::vector<Index> ladder;
  for (Index c = std::max<Index>(N >> 4, 1); c < N; c *= 2) ladder.push_back(c);
  ladder.push_back(N);
  Index best = N;
  for (Index c : ladder)
    if (prefix[c] * best > prefix[best] * c) best = c;
  return {best, prefix[best]};
}

std::optional<OscillationCertificate> certify(const std::vector<Rational>& y, Index N, const Rational& lower,
                                              const Rational& upper) {
  const Index su = best_scale(y, N, true, upper).first;
  const Index sl = best_scale(y, N, false, lower).first;
  std::vector<Rational> head(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(N));
  auto c = make_certificate(head, lower, upper, su, sl);
  if (!c.valid() || c.upper_density() < kAdversaryMinDensity || c.lower_density() < kAdversaryMinDensity)
    return std::nullopt;
  return c;
}

// Recounts the certificate and re-evaluates a sample of rows straight from their entries.
bool self_audit(const SummabilityMatrix& A, const std::vector<char>& x, const std::vector<Rational>& y,
                const OscillationCertificate& c) {
  std::vector<Rational> head(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(c.scale));
  if (!audit_certificate(c, head)) return false;
  std::vector<Index> rows{1, c.scale, c.upper_scale, c.lower_scale};
  for (Index n = 2; n < c.scale; n *= 2) rows.push_back(n);
  for (Index n : rows) {
    Rational v = 0;
    for (const auto& [k, a] : row_entries(A, n)) {
      if (k > x.size()) return false;
      if (x[k - 1]) v += a;
    }
    if (v != y[n - 1]) return false;
  }
  return true;
}

std::string density_summary(const std::vector<Rational>& y, Index N, const Rational& lower, const Rational& upper) {
  auto [su, cu] = best_scale(y, N, true, upper);
  auto [sl, cl] = best_scale(y, N, false, lower);
  return "best upper density " + to_string(ratio(cu, su)) + " at " + std::to_string(su) + ", best lower density " +
         to_string(ratio(cl, sl)) + " at " + std::to_string(sl);
}

}  // namespace

EscapeResult escape_unbounded(const std::vector<Index>& stem, const SummableRow& a, const Sequence& x,
                              const Rational& m0, const SearchCaps& caps) {
  if (m0 < 0) throw PreconditionError("m0 must be non-negative");
  const Index j = stem.size();
  const Index tj = stem.empty() ? 0 : stem.back();
  Rational S = 0;
  for (Index k = 1; k <= j; ++k) S += a.entry(k) * x(stem[k - 1]);

  Index i0 = 0;
  for (Index k = j + 1; k <= j + caps.index_cap; ++k) {
    if (a.entry(k) != 0) {
      i0 = k;
      break;
    }
  }
  if (i0 == 0) throw SearchCapError("row has no nonzero entry within " + std::to_string(caps.index_cap) + " past the stem");

  const Rational need = m0 + 1 + abs(S);
  const Rational target = need / abs(a.entry(i0));
  const Index t0 = x.least_index_at_least(target, tj + i0, caps.scan_cap);

  std::vector<Index> head = stem;
  for (Index s = 1; s + j < i0; ++s) head.push_back(tj + s);
  head.push_back(t0);
  Selector sigma(head, selector_tail::Consecutive{t0 + 1});

  Rational sum = 0;
  for (Index k = 1; k <= i0; ++k) sum += a.entry(k) * x(sigma(k));
  EscapeResult r{sigma, {i0}, m0 + 1, {sum}, abs(sum), false, {}};
  r.audit.i0 = i0;
  r.audit.t0 = t0;
  r.audit.stem_sum = S;
  r.verified = r.achieved >= r.bound;
  if (!r.verified) throw VerificationError("escape postcondition failed: |sum| = " + to_string(r.achieved));
  return r;
}

EscapeResult escape_rowfinite(const std::vector<Index>& stem, const SummabilityMatrix& A, const Sequence& x,
                              const IdealPresentation& I, const Rational& m0, Index p0, const SearchCaps& caps) {
  if (!row_finite(A)) throw UnsupportedError("escape_rowfinite needs a row-finite matrix");
  if (m0 < 0) throw PreconditionError("m0 must be non-negative");
  if (p0 == 0) p0 = 1;
  const Index j0 = stem.size();
  const Index w0 = j0 + 1;
  auto Z = zero_row_set(A, w0);
  if (!Z) throw PreconditionError("Z_" + std::to_string(w0) + " has no structural description for " + matrix_spec(A));
  auto zv = verdict(I, *Z, 0);
  if (zv.status != Membership::In)
    throw PreconditionError("Z_" + std::to_string(w0) + " = " + render(*Z) + " is not certified in " + I.name() + " (" +
                            zv.label() + ")");
  const SetDescription T = complement(*Z);
  const RestrictedIdeal R = restrict(I, T);

  // The dyadic partition starts at 2, so n0 is the least element of T inside the covered tail.
  Index n0 = 0;
  for (Index n = R.partition.boundary(1); n <= caps.index_cap; ++n) {
    if (member(T, n)) {
      n0 = n;
      break;
    }
  }
  if (n0 == 0) throw SearchCapError("no row depends on columns past the stem within the cap");
  const Index p1 = R.partition.block_of(n0);
  const Index q0 = std::max(p0, p1 + 1);
  const std::vector<Index> block = R.partition.block(q0);
  if (block.empty()) throw PreconditionError("block " + std::to_string(q0) + " is empty after restriction");
  if (block.size() > caps.index_cap) throw SearchCapError("target block exceeds the index cap");

  std::map<Index, SparseRow> rows;
  Rational alpha = -1;
  Index k0 = 0;
  for (Index n : block) {
    auto e = row_entries(A, n);
    if (e.empty() || e.back().first < w0) throw VerificationError("block row " + std::to_string(n) + " lies in Z_w");
    for (const auto& [k, v] : e)
      if (alpha < 0 || abs(v) < alpha) alpha = abs(v);
    k0 = std::max(k0, e.back().first);
    rows.emplace(n, std::move(e));
  }

  std::vector<Index> sel = stem;
  Index prev = stem.empty() ? 0 : stem.back();
  for (Index s = w0; s <= k0; ++s) {
    Rational worst = -1;
    for (const auto& [n, e] : rows) {
      if (e.back().first != s) continue;
      Rational partial = 0;
      for (const auto& [k, v] : e)
        if (k < s) partial += v * x(sel[k - 1]);
      worst = std::max(worst, Rational(abs(partial)));
    }
    Index next = prev + 1;
    if (m0 > 0 && worst >= 0) next = x.least_index_at_least((m0 + worst) / alpha, prev + 1, caps.scan_cap);
    sel.push_back(next);
    prev = next;
  }
  Selector sigma(sel, selector_tail::Consecutive{prev + 1});

  EscapeResult r{sigma, block, m0, {}, Rational(0), false, {}};
  bool first = true;
  for (const auto& [n, e] : rows) {
    Rational v = 0;
    for (const auto& [k, a] : e) v += a * x(sel[k - 1]);
    if (first || abs(v) < r.achieved) r.achieved = abs(v);
    first = false;
    r.values.push_back(v);
  }
  r.audit.w0 = w0;
  r.audit.n0 = n0;
  r.audit.p1 = p1;
  r.audit.q0 = q0;
  r.audit.alpha = alpha;
  r.audit.k0 = k0;
  r.verified = r.achieved >= m0;
  if (!r.verified) throw VerificationError("escape postcondition failed: min |(A sigma x)_n| = " + to_string(r.achieved));
  return r;
}

OscillationPair oscillation_pair(const std::vector<Index>& stem, const Sequence& x, const SummabilityMatrix& A,
                                 Index N, const Rational& tol) {
  if (N < 4) throw PreconditionError("oscillation_pair needs N >= 4");
  if (tol < 0) throw PreconditionError("tol must be non-negative");
  auto y = x.prefix(N);
  auto spread = [&](Index from) {
    Rational hi = y[from - 1], lo = y[from - 1];
    for (Index n = from; n <= N; ++n) {
      hi = std::max(hi, y[n - 1]);
      lo = std::min(lo, y[n - 1]);
    }
    return std::pair{hi, lo};
  };
  auto [alpha, beta] = spread(N / 2 + 1);
  auto [a4, b4] = spread(3 * N / 4 + 1);
  if (alpha - beta <= 2 * tol || a4 - b4 <= 2 * tol)
    throw PreconditionError("limsup and liminf of " + x.spec() + " are not separated by more than 2 tol at scale " +
                            std::to_string(N));

  const Index from = (stem.empty() ? 0 : stem.back()) + 1;
  const Rational hi_level = alpha - tol, lo_level = beta + tol;
  Selector upper(stem, selector_tail::Filtered{"level>=" + to_string(hi_level) + "(" + x.spec() + ")",
                                               [x, hi_level](Index n) { return x(n) >= hi_level; }, from});
  Selector lower(stem, selector_tail::Filtered{"level<=" + to_string(lo_level) + "(" + x.spec() + ")",
                                               [x, lo_level](Index n) { return x(n) <= lo_level; }, from});

  const Index horizon = row_finite(A) ? columns_needed(A, N) : N;
  const Rational tail_tol = pow2_inv(30);
  auto u = transform_prefix(A, subsequence(x, upper, horizon), N, tail_tol);
  auto l = transform_prefix(A, subsequence(x, lower, horizon), N, tail_tol);
  return OscillationPair{upper,
                         lower,
                         alpha,
                         beta,
                         N,
                         u.back().value - l.back().value,
                         u.back().tail_bound + l.back().tail_bound};
}

std::vector<char> doubling_blocks(Index N) {
  std::vector<char> x(N, 0);
  for (Index start = 1; start <= N; start *= 4)
    for (Index n = start; n < 2 * start && n <= N; ++n) x[n - 1] = 1;
  return x;
}

AdversaryResult steinhaus_adversary(const SummabilityMatrix& A, AdversaryMode mode, Index N, const Rational& lower,
                                    const Rational& upper, const IdealPresentation& under) {
  if (!(0 < lower && lower < upper && upper < 1)) throw PreconditionError("thresholds need 0 < lower < upper < 1");
  if (N < 16) throw PreconditionError("adversary scale must be at least 16");
  if (N > kEnumerationCap) throw ScaleCapError("adversary scale beyond " + std::to_string(kEnumerationCap));
  if (!row_finite(A)) throw UnsupportedError("the adversary evaluates Ax exactly and needs a row-finite matrix");
  auto reg = regularity_verdict(A, under, std::min<Index>(N, 4096), 64);
  if (reg.overall != RegularityStatus::Regular && reg.overall != RegularityStatus::RegularUpTo)
    throw PreconditionError(matrix_spec(A) + " is not regular under " + under.name() + ": " + reg.label());

  AdversaryResult out;
  auto finish = [&](std::vector<char> x) -> bool {
    const Index cols = columns_needed(A, N);
    if (x.size() < cols) x.resize(cols, 0);
    out.y = transform_rowfinite(A, as_rationals(x), N);
    out.x = std::move(x);
    out.certificate = certify(out.y, N, lower, upper);
    if (!out.certificate) {
      out.diagnostic = out.construction + ": " + density_summary(out.y, N, lower, upper);
      return false;
    }
    out.audit_passed = self_audit(A, out.x, out.y, *out.certificate);
    if (!out.audit_passed) {
      out.diagnostic = out.construction + ": self-audit mismatch, certificate withheld";
      out.certificate.reset();
      return false;
    }
    return true;
  };

  if (mode == AdversaryMode::Blocks) {
    std::vector<char> unit(N);
    for (Index n = 1; n <= N; ++n) unit[n - 1] = n % 2;
    out.construction = "blocks:unit";
    std::string first;
    if (finish(unit)) return out;
    first = out.diagnostic;
    out.construction = "blocks:doubling";
    if (finish(doubling_blocks(N))) return out;
    out.diagnostic = first + "; " + out.diagnostic;
    return out;
  }

  out.construction = "greedy";
  IncrementalTransform inc(A);
  std::vector<char> x;
  std::vector<Rational> y;
  Index up = 0, low = 0;
  bool high = true;
  while (inc.ready() < N) {
    AdversaryPhase ph{high, x.size() + 1, 0, false};
    const Index before = high ? up : low;
    const Index cap = std::max<Index>(1024, 16 * x.size());
    while (ph.length < cap && inc.ready() < N) {
      x.push_back(high ? 1 : 0);
      ++ph.length;
      for (auto& v : inc.advance(x, N)) {
        up += v >= upper ? 1 : 0;
        low += v <= lower ? 1 : 0;
        y.push_back(std::move(v));
      }
      const Index now = high ? up : low;
      if (now > before && 4 * now >= inc.ready()) {
        ph.met_quota = true;
        break;
      }
    }
    out.phases.push_back(ph);
    if (!ph.met_quota && inc.ready() < N) {
      out.x = x;
      out.y = y;
      out.diagnostic = "greedy: phase " + std::to_string(out.phases.size()) + " (" + (high ? "high" : "low") +
                       ") stalled after " + std::to_string(ph.length) + " steps with " + std::to_string(inc.ready()) +
                       " rows evaluated, " + std::to_string(up) + " >= upper, " + std::to_string(low) + " <= lower";
      return out;
    }
    high = !high;
  }
  finish(std::move(x));
  return out;
}

std::vector<DemoRound> meagerness_demo(const Sequence& x, const SummabilityMatrix& A, const IdealPresentation& I,
                                       std::vector<Rational> m_schedule, Index rounds, std::uint64_t seed) {
  std::vector<DemoRound> out;
  if (rounds == 0) return out;
  const bool unbounded = x.has_growth_witness();
  if (!unbounded && !x.sup_norm()) throw UnsupportedError(x.spec() + " is neither witnessed unbounded nor bounded");
  Rng rng(seed);
  for (Index r = 1; r <= rounds; ++r) {
    DemoRound d;
    d.round = r;
    Index v = 0;
    for (Index i = 0, len = rng.uniform(0, 3); i < len; ++i) d.stem.push_back(v += rng.uniform(1, 6));
    d.bound = r <= m_schedule.size() ? m_schedule[r - 1]
              : m_schedule.empty()   ? Rational(Integer(1) << static_cast<mp_bitcnt_t>(r - 1))
                                     : m_schedule.back();
    if (unbounded) {
      d.kind = DemoKind::Escape;
      EscapeResult e = row_finite(A) ? escape_rowfinite(d.stem, A, x, I, d.bound)
                                     : escape_unbounded(d.stem,
                                                        SummableRow{matrix_spec(A) + "[1]",
                                                                    [A](Index k) { return entry(A, 1, k); }, nullptr},
                                                        x, d.bound);
      d.selector = e.selector.spec();
      d.achieved = e.achieved;
      d.verified = e.verified;
    } else {
      d.kind = DemoKind::Oscillation;
      auto p = oscillation_pair(d.stem, x, A, 1024, Rational(0));
      d.selector = p.upper.spec();
      d.partner = p.lower.spec();
      d.bound = Rational(9, 10) * (p.alpha - p.beta);
      d.achieved = p.gap;
      d.verified = p.gap - p.gap_error >= d.bound;
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace tauber
