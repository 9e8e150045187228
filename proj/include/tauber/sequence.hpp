#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tauber/rational.hpp"
#include "tauber/setlang.hpp"

namespace tauber {

/// |x_n| <= coefficient * n^degree for all n. degree 0 is a sup-norm bound.
struct GrowthEnvelope {
  Rational coefficient;
  unsigned degree = 0;
};

/// A real sequence x_1, x_2, ... evaluated on demand, with optional certified tags.
class Sequence {
 public:
  using Term = std::function<Rational(Index)>;
  /// Least n >= from with |x_n| >= target. Must be exact.
  using GrowthWitness = std::function<Index(const Rational& target, Index from)>;

  Sequence(std::string spec, Term term, std::optional<GrowthEnvelope> envelope = std::nullopt,
           GrowthWitness witness = nullptr);

  Rational operator()(Index n) const { return term_(n); }

  const std::string& spec() const { return spec_; }
  const std::optional<GrowthEnvelope>& envelope() const { return envelope_; }

  /// Certified ‖x‖_∞ when the envelope has degree 0.
  std::optional<Rational> sup_norm() const;

  /// Registered proof that x is unbounded.
  bool has_growth_witness() const { return static_cast<bool>(witness_); }

  /// Least n >= from with |x_n| >= target: answered by the witness when present,
  /// otherwise by scanning at most scan_cap indices (SearchCapError when exhausted).
  Index least_index_at_least(const Rational& target, Index from, Index scan_cap) const;

  std::vector<Rational> prefix(Index n) const;

 private:
  std::string spec_;
  Term term_;
  std::optional<GrowthEnvelope> envelope_;
  GrowthWitness witness_;
};

/// Sequence spec strings:
///   "n"                  x_n = n (growth witness)
///   "signed-n"           x_n = (-1)^n n (growth witness)
///   "alt"                (0,1,0,1,...)
///   "alt10"              (1,0,1,0,...)
///   "one"                constant 1
///   "const:<q>"          constant rational q
///   "inv-n"              x_n = 1/n
///   "squares-perturbed"  1 + 1/n off the squares, n on the squares (growth witness)
///   "indicator:<set>"    0/1 indicator of a set description
///   "bits:<0/1 string>"  finite prefix, zero beyond it
Sequence parse_sequence(std::string_view spec);

/// 0/1 sequence given by an explicit prefix; terms beyond it are 0.
Sequence bits_sequence(std::vector<char> bits, std::string spec);

/// Rational prefix; terms beyond it are 0.
Sequence prefix_sequence(std::vector<Rational> values, std::string spec);

}  // namespace tauber
