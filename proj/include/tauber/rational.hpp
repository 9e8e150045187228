#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tauber {

using Index = std::uint64_t;
using Integer = mpz_class;
using Rational = mpq_class;

/// Exact 2^-k.
Rational pow2_inv(unsigned k);

/// Exact 2^k as an integer.
Integer pow2(unsigned k);

Rational abs(const Rational& q);

Rational make_rational(long long num, long long den = 1);

/// Exact num/den for non-negative machine integers.
Rational ratio(Index num, Index den);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

/// Parses "p/q", "p", or a finite decimal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

/// Fixed-point rendering rounded half away from zero, e.g. decimal(1/3, 12) = "0.333333333333".
std::string decimal(const Rational& q, int places);

double to_double(const Rational& q);

/// Smallest integer >= q (q may be negative).
Integer ceil(const Rational& q);

/// Least index n with n >= q; q <= 1 gives 1. Throws SearchCapError if the index overflows 64 bits.
Index ceil_index(const Rational& q);

Index isqrt(Index n);

unsigned nu2(Index n);

}  // namespace tauber
