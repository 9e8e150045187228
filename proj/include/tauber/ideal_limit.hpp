#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tauber/ideals.hpp"
#include "tauber/rational.hpp"
#include "tauber/sequence.hpp"
#include "tauber/summability.hpp"

namespace tauber {

/// Finite-scale evidence against statistical convergence of y:
/// U = {n : y_n >= upper}, L = {n : y_n <= lower}, both with positive prefix density at their scales.
struct OscillationCertificate {
  Rational lower;
  Rational upper;
  Index scale = 0;
  Index upper_scale = 0;
  Index upper_count = 0;  // |U ∩ [1, upper_scale]|
  Index lower_scale = 0;
  Index lower_count = 0;  // |L ∩ [1, lower_scale]|

  Rational upper_density() const;
  Rational lower_density() const;
  bool valid() const;
};

/// Counts U and L at the given scales (1-based, <= y.size()).
OscillationCertificate make_certificate(const std::vector<Rational>& y, const Rational& lower, const Rational& upper,
                                        Index upper_scale, Index lower_scale);

/// Recomputes both counts from y and compares them with the stored ones.
bool audit_certificate(const OscillationCertificate& c, const std::vector<Rational>& y);

/// Prefix counts of an exception set {n : |y_n - eta| > eps} (or >= eps when closed).
struct ExceptionProfile {
  Rational eta;
  Rational eps;
  std::vector<std::pair<Index, Index>> counts;
  bool compatible = false;  // vanishing-trend evidence for the ideal at hand
};

enum class LimitStatus { Limit, NoLimitEvidence, Undecided };

std::string to_string(LimitStatus s);

struct IdealLimitVerdict {
  LimitStatus status = LimitStatus::Undecided;
  std::optional<Rational> eta;
  /// Finest ε examined.
  Rational resolution;
  Index scale = 0;
  /// Decided by a structural argument rather than prefix evidence.
  bool certified = false;
  std::optional<OscillationCertificate> certificate;
  std::vector<ExceptionProfile> evidence;
  std::string reason;
};

/// 2^-1, ..., 2^-6.
std::vector<Rational> default_eps_grid();

/// Values at the 10/25/50/75/90% quantiles of the second half of y, each snapped to the nearest
/// integer and to the nearest multiple of 2^-6.
std::vector<Rational> default_eta_grid(const std::vector<Rational>& y);

/// Exception densities below this at scale N (with a non-increasing ladder) count as a vanishing trend.
inline const Rational kVanishingDensity{1, 16};

/// Finite-scale I-limit estimate from the prefix y_1..y_N. Empty grids select the defaults.
IdealLimitVerdict ideal_limit(const std::vector<Rational>& y, const IdealPresentation& I,
                              std::vector<Rational> eps_grid = {}, std::vector<Rational> eta_grid = {});

/// y_n = eta + (vanishing term) off `exceptions`; on `exceptions`, |y_n - eta| >= gap > 0.
struct LimitShape {
  Rational eta;
  SetDescription exceptions;
  Rational gap;
};

/// Certified I-limit question "I-lim y = eta?" decided by verdict(I, exceptions).
IdealLimitVerdict ideal_limit(const LimitShape& shape, const IdealPresentation& I, Index scale);

/// Exception-set prefix densities for each candidate η and ε, at I's checkpoints.
std::vector<ExceptionProfile> exception_profiles(const std::vector<Rational>& y, const IdealPresentation& I,
                                                 const std::vector<Rational>& eta_grid,
                                                 const std::vector<Rational>& eps_grid, bool closed = false);

/// exception_profiles of (Ax)_1..(Ax)_N.
std::vector<ExceptionProfile> matrix_ideal_limit_defect(const SummabilityMatrix& A, const Sequence& x,
                                                        const IdealPresentation& I, Index N,
                                                        const std::vector<Rational>& eta_grid,
                                                        const std::vector<Rational>& eps_grid);

}  // namespace tauber
