#include "tauber/ideal_limit.hpp"

#include <algorithm>
#include <tuple>

#include "tauber/errors.hpp"

namespace tauber {

namespace {

enum class Proxy { Fin, Z, BD, None };

/// Which finite-scale evidence rule speaks for I.
Proxy proxy_for(const IdealPresentation& I) {
  switch (I.kind()) {
    case IdealKind::Fin: return Proxy::Fin;
    case IdealKind::Z: return Proxy::Z;
    case IdealKind::BD: return Proxy::BD;
    case IdealKind::FinXFin: return Proxy::None;
    case IdealKind::NonnegMatrix: {
      const auto& v = I.matrix()->node().value;
      if (std::holds_alternative<matrix_kind::Cesaro>(v)) return Proxy::Z;
      if (std::holds_alternative<matrix_kind::Identity>(v)) return Proxy::Fin;
      return Proxy::None;
    }
  }
  return Proxy::None;
}

bool outside(const Rational& y, const Rational& eta, const Rational& eps, bool closed) {
  Rational d = abs(y - eta);
  return closed ? d >= eps : d > eps;
}

/// Vanishing-trend evidence for an exception set given as a bitmap over 1..N.
bool vanishing(Proxy proxy, const std::vector<char>& bits, const std::vector<std::pair<Index, Index>>& counts) {
  const Index N = bits.size() - 1;
  switch (proxy) {
    case Proxy::Fin:
      for (Index n = N / 2 + 1; n <= N; ++n)
        if (bits[n]) return false;
      return true;
    case Proxy::Z: {
      for (std::size_t i = 1; i < counts.size(); ++i) {
        // density non-increasing along the ladder: c_i / n_i <= c_{i-1} / n_{i-1}
        if (Rational(ratio(counts[i].second, counts[i].first)) > ratio(counts[i - 1].second, counts[i - 1].first))
          return false;
      }
      return ratio(counts.back().second, counts.back().first) <= kVanishingDensity;
    }
    case Proxy::BD: {
      Index L = std::max<Index>(1, N / 16);
      Index from = N / 2 + 1;
      if (N - from + 1 < L) return false;
      Index run = 0, best = 0;
      for (Index n = from; n <= N; ++n) {
        run += bits[n] ? 1 : 0;
        if (n >= from + L) run -= bits[n - L] ? 1 : 0;
        if (n + 1 >= from + L) best = std::max(best, run);
      }
      return ratio(best, L) <= kVanishingDensity;
    }
    case Proxy::None: return false;
  }
  return false;
}

Rational snap(const Rational& v, const Rational& unit) {
  Rational q = v / unit;
  Integer f = q.get_num() / q.get_den();  // truncation toward zero
  if (q < 0 && Rational(f) != q) f -= 1;  // floor
  Rational frac = q - Rational(f);
  if (frac * 2 >= 1) f += 1;
  return Rational(f) * unit;
}

std::vector<Rational> second_half_sorted(const std::vector<Rational>& y) {
  std::vector<Rational> tail(y.begin() + static_cast<std::ptrdiff_t>(y.size() / 2), y.end());
  std::sort(tail.begin(), tail.end());
  return tail;
}

const Rational& quantile(const std::vector<Rational>& sorted, unsigned percent) {
  std::size_t idx = (sorted.size() - 1) * percent / 100;
  return sorted[idx];
}

}  // namespace

Rational OscillationCertificate::upper_density() const {
  return upper_scale ? ratio(upper_count, upper_scale) : Rational(0);
}
Rational OscillationCertificate::lower_density() const {
  return lower_scale ? ratio(lower_count, lower_scale) : Rational(0);
}

bool OscillationCertificate::valid() const {
  return upper > lower && upper_count > 0 && lower_count > 0 && upper_scale >= 1 && lower_scale >= 1 &&
         upper_scale <= scale && lower_scale <= scale;
}

OscillationCertificate make_certificate(const std::vector<Rational>& y, const Rational& lower, const Rational& upper,
                                        Index upper_scale, Index lower_scale) {
  if (upper_scale > y.size() || lower_scale > y.size()) throw PreconditionError("witness scale beyond the prefix");
  OscillationCertificate c{lower, upper, y.size(), upper_scale, 0, lower_scale, 0};
  for (Index n = 1; n <= upper_scale; ++n) c.upper_count += y[n - 1] >= upper ? 1 : 0;
  for (Index n = 1; n <= lower_scale; ++n) c.lower_count += y[n - 1] <= lower ? 1 : 0;
  return c;
}

bool audit_certificate(const OscillationCertificate& c, const std::vector<Rational>& y) {
  if (c.scale > y.size() || c.upper_scale > c.scale || c.lower_scale > c.scale) return false;
  auto again = make_certificate(y, c.lower, c.upper, c.upper_scale, c.lower_scale);
  return again.upper_count == c.upper_count && again.lower_count == c.lower_count;
}

std::string to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::Limit: return "Limit";
    case LimitStatus::NoLimitEvidence: return "NoLimitEvidence";
    case LimitStatus::Undecided: return "Undecided";
  }
  return "?";
}

std::vector<Rational> default_eps_grid() {
  std::vector<Rational> g;
  for (unsigned i = 1; i <= 6; ++i) g.push_back(pow2_inv(i));
  return g;
}

std::vector<Rational> default_eta_grid(const std::vector<Rational>& y) {
  std::vector<Rational> out;
  if (y.empty()) return out;
  auto sorted = second_half_sorted(y);
  const Rational unit = pow2_inv(6);
  for (unsigned pct : {50u, 25u, 75u, 10u, 90u}) {
    const Rational& v = quantile(sorted, pct);
    for (const Rational& c : {snap(v, Rational(1)), snap(v, unit)})
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

std::vector<ExceptionProfile> exception_profiles(const std::vector<Rational>& y, const IdealPresentation& I,
                                                 const std::vector<Rational>& eta_grid,
                                                 const std::vector<Rational>& eps_grid, bool closed) {
  std::vector<ExceptionProfile> out;
  const Index N = y.size();
  if (N == 0) return out;
  const Proxy proxy = proxy_for(I);
  const auto ladder = I.checkpoints(N);
  for (const auto& eta : eta_grid) {
    for (const auto& eps : eps_grid) {
      std::vector<char> bits(N + 1, 0);
      for (Index n = 1; n <= N; ++n) bits[n] = outside(y[n - 1], eta, eps, closed) ? 1 : 0;
      ExceptionProfile p{eta, eps, {}, false};
      Index c = 0, next = 0;
      for (Index n = 1; n <= N && next < ladder.size(); ++n) {
        c += bits[n];
        if (n == ladder[next]) {
          p.counts.emplace_back(n, c);
          ++next;
        }
      }
      p.compatible = vanishing(proxy, bits, p.counts);
      out.push_back(std::move(p));
    }
  }
  return out;
}

IdealLimitVerdict ideal_limit(const std::vector<Rational>& y, const IdealPresentation& I,
                              std::vector<Rational> eps_grid, std::vector<Rational> eta_grid) {
  if (y.empty()) throw PreconditionError("ideal_limit needs a nonempty prefix");
  if (eps_grid.empty()) eps_grid = default_eps_grid();
  if (eta_grid.empty()) eta_grid = default_eta_grid(y);
  IdealLimitVerdict v;
  v.scale = y.size();
  v.resolution = *std::min_element(eps_grid.begin(), eps_grid.end());
  v.evidence = exception_profiles(y, I, eta_grid, eps_grid);
  const Proxy proxy = proxy_for(I);

  // Candidates compatible at every ε; ranked by final exception count, then simplicity.
  std::optional<std::tuple<Index, Integer, Rational>> best;
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    bool all = true;
    Index total = 0;
    for (std::size_t j = 0; j < eps_grid.size(); ++j) {
      const auto& p = v.evidence[i * eps_grid.size() + j];
      all = all && p.compatible;
      total += p.counts.back().second;
    }
    if (!all) continue;
    std::tuple<Index, Integer, Rational> key{total, eta_grid[i].get_den(), eta_grid[i]};
    if (!best || key < *best) best = key;
  }
  if (best) {
    v.status = LimitStatus::Limit;
    v.eta = std::get<2>(*best);
    v.reason = "exception sets at every ε show a vanishing trend at scale " + std::to_string(v.scale);
    return v;
  }
  if (proxy == Proxy::None) {
    v.reason = "no finite-scale evidence rule for ideal " + I.name();
    return v;
  }

  auto sorted = second_half_sorted(y);
  const Rational lo = quantile(sorted, 25);
  const Rational hi = quantile(sorted, 75);
  if (hi > lo) {
    const Index N = y.size();
    auto cert = make_certificate(y, lo, hi, N, N);
    bool strong = cert.valid() && cert.upper_density() >= kVanishingDensity && cert.lower_density() >= kVanishingDensity;
    if (strong && proxy == Proxy::Fin) {
      bool up_late = false, low_late = false;
      for (Index n = N / 2 + 1; n <= N; ++n) {
        up_late = up_late || y[n - 1] >= hi;
        low_late = low_late || y[n - 1] <= lo;
      }
      strong = up_late && low_late;
    }
    if (strong) {
      v.status = LimitStatus::NoLimitEvidence;
      v.certificate = cert;
      v.reason = "values >= " + to_string(hi) + " and <= " + to_string(lo) + " both have density >= " +
                 to_string(kVanishingDensity) + " at scale " + std::to_string(N);
      return v;
    }
  }
  v.reason = "no candidate limit and no oscillation certificate on the grid";
  return v;
}

IdealLimitVerdict ideal_limit(const LimitShape& shape, const IdealPresentation& I, Index scale) {
  IdealLimitVerdict v;
  v.scale = scale;
  v.certified = true;
  auto m = verdict(I, shape.exceptions, scale);
  if (m.status == Membership::In) {
    v.status = LimitStatus::Limit;
    v.eta = shape.eta;
    v.reason = "the sequence tends to " + to_string(shape.eta) + " off " + render(shape.exceptions) +
               ", which is in " + I.name() + " (" + m.reason + ")";
  } else if (m.status == Membership::NotIn && shape.gap > 0) {
    v.status = LimitStatus::NoLimitEvidence;
    v.reason = "the sequence stays " + to_string(shape.gap) + " away from " + to_string(shape.eta) + " on " +
               render(shape.exceptions) + ", which is not in " + I.name() + " (" + m.reason + ")";
  } else {
    v.certified = false;
    v.reason = "membership of the exceptional set is undecided: " + m.reason;
  }
  return v;
}

std::vector<ExceptionProfile> matrix_ideal_limit_defect(const SummabilityMatrix& A, const Sequence& x,
                                                        const IdealPresentation& I, Index N,
                                                        const std::vector<Rational>& eta_grid,
                                                        const std::vector<Rational>& eps_grid) {
  auto t = transform_prefix(A, x, N, Rational(0));
  std::vector<Rational> y;
  y.reserve(t.size());
  for (auto& tv : t) y.push_back(std::move(tv.value));
  return exception_profiles(y, I, eta_grid, eps_grid);
}

}  // namespace tauber
