#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tauber/rational.hpp"

namespace tauber {

/// Enumeration fallbacks refuse scales beyond this.
inline constexpr Index kEnumerationCap = 10'000'000;

struct SetNode;

/// Immutable symbolic description of a subset of N = {1, 2, ...}.
///
/// Copies share the underlying tree. Every node supports exact membership;
/// prefix counts use closed forms where one exists and enumerate otherwise.
class SetDescription {
 public:
  explicit SetDescription(std::shared_ptr<const SetNode> node) : node_(std::move(node)) {}

  const SetNode& node() const { return *node_; }

  friend bool operator==(const SetDescription& a, const SetDescription& b);

 private:
  std::shared_ptr<const SetNode> node_;
};

namespace set_node {
struct Finite {
  std::vector<Index> elements;  // strictly increasing, all >= 1
};
struct Progression {
  Index first;
  Index step;
};
struct Squares {};
struct Powers2 {};
struct Nu2AtLeast {
  unsigned min_valuation;
};
/// Union of the blocks [2^q, 2^{q+1}) over q in the selector.
struct DyadicBlocks {
  SetDescription selector;
};
struct Complement {
  SetDescription inner;
};
struct Union {
  SetDescription left, right;
};
struct Intersection {
  SetDescription left, right;
};
/// {n + offset : n in inner} restricted to N.
struct Shift {
  SetDescription inner;
  std::int64_t offset;
};
}  // namespace set_node

struct SetNode {
  std::variant<set_node::Finite, set_node::Progression, set_node::Squares, set_node::Powers2,
               set_node::Nu2AtLeast, set_node::DyadicBlocks, set_node::Complement, set_node::Union,
               set_node::Intersection, set_node::Shift>
      value;
};

SetDescription finite_set(std::vector<Index> elements);
SetDescription progression(Index first, Index step);
SetDescription naturals();
SetDescription squares();
SetDescription powers_of_two();
SetDescription nu2_at_least(unsigned c);
SetDescription dyadic_blocks(SetDescription selector);
SetDescription complement(SetDescription s);
SetDescription set_union(SetDescription a, SetDescription b);
SetDescription intersection(SetDescription a, SetDescription b);
SetDescription shift(SetDescription s, std::int64_t offset);

/// Parses the colon/pipe DSL:
///
///   set  := "finite:{" ints "}" | "ap:" int "," int | "builtin:" name
///         | "complement:" set | "union:" set "|" set | "intersect:" set "|" set
///         | "shift:" set "," int
///   name := "squares" | "powers2" | "nu2_ge(" int ")" | "dyadic_blocks(" set ")"
///
/// Inside finite braces "a..b" abbreviates a run of consecutive integers.
SetDescription parse_set(std::string_view text);

/// Canonical DSL text; parse_set(render(s)) == s.
std::string render(const SetDescription& s);

/// n >= 1.
bool member(const SetDescription& s, Index n);

/// |S ∩ [1, n]|. Throws ScaleCapError when enumeration would exceed kEnumerationCap.
Index count_prefix(const SetDescription& s, Index n);

/// Membership bitmap for 1..n (entry 0 unused). Subject to kEnumerationCap.
std::vector<char> indicator(const SetDescription& s, Index n);

/// Elements of S in [1, n], ascending.
std::vector<Index> elements_upto(const SetDescription& s, Index n);

enum class Tri { No, Yes, Unknown };

struct RationalInterval {
  Rational lo{0};
  Rational hi{1};
};

/// For n >= threshold, n ∈ S iff n + period ∈ S.
struct Periodicity {
  Index period;
  Index threshold;
};

/// Certified asymptotic facts derived from the description's structure alone.
/// Every interval encloses the true value; finite/cofinite are proven or Unknown.
struct SetFacts {
  std::optional<Periodicity> periodic;
  Tri finite = Tri::Unknown;
  Tri cofinite = Tri::Unknown;
  RationalInterval lower_density;
  RationalInterval upper_density;
  RationalInterval upper_banach;

  /// Present when lower and upper density are pinned to the same value.
  std::optional<Rational> density() const;
};

SetFacts analyze(const SetDescription& s);

/// Exact asymptotic density of an eventually periodic description.
std::optional<Rational> periodic_density(const SetDescription& s);

struct DensityReport {
  std::vector<std::pair<Index, Index>> prefix_counts;  // (n, |S ∩ [1,n]|)
  Rational lower_estimate;
  Rational upper_estimate;
  std::optional<Rational> exact;
  std::optional<Rational> banach_upper;
  std::optional<Index> window;
};

/// Prefix profile at the checkpoints (nonempty, increasing, all <= scale).
/// `exact` is filled only when the description is eventually periodic (finite
/// sets, progressions, nu2_ge, and their boolean combinations and shifts).
DensityReport density_report(const SetDescription& s, Index scale, const std::vector<Index>& checkpoints,
                             std::optional<Index> window = std::nullopt);

/// max over windows [a, a+len) ⊆ [1, n] of |S ∩ window| / len.
Rational max_window_density(const std::vector<char>& bitmap, Index n, Index len);

/// CSV with header "n,count,density"; density is count/n to 12 decimal places.
void write_density_csv(std::ostream& os, const DensityReport& report);

}  // namespace tauber
