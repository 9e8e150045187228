#include "tauber/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "tauber/errors.hpp"

namespace tauber {

Integer pow2(unsigned k) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
  return r;
}

Rational pow2_inv(unsigned k) {
  Rational r(Integer(1), pow2(k));
  r.canonicalize();
  return r;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational make_rational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational r(Integer(std::to_string(num)), Integer(std::to_string(den)));
  r.canonicalize();
  return r;
}

Rational ratio(Index num, Index den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational r{Integer(static_cast<unsigned long>(num)), Integer(static_cast<unsigned long>(den))};
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return ParseError("malformed rational '" + s + "'", 0); };
  if (s.empty()) throw bad();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0) throw bad();
    if (den == 0) throw bad();
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (neg || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) throw bad();
    for (char c : whole + frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    Integer num(whole + frac), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational r(neg ? Integer(-num) : num, den);
    r.canonicalize();
    return r;
  }
  Integer num;
  if (s[0] == '+') s = s.substr(1);
  if (num.set_str(s, 10) != 0) throw bad();
  return Rational(num);
}

std::string decimal(const Rational& q, int places) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
  Rational scaled = abs(q) * scale;
  // round half away from zero
  Integer twice = (2 * scaled.get_num() + scaled.get_den()) / (2 * scaled.get_den());
  std::string digits = twice.get_str();
  if (static_cast<int>(digits.size()) <= places) digits.insert(0, places + 1 - digits.size(), '0');
  std::string out = q < 0 && twice != 0 ? "-" : "";
  out += digits.substr(0, digits.size() - places);
  if (places > 0) out += "." + digits.substr(digits.size() - places);
  return out;
}

double to_double(const Rational& q) { return q.get_d(); }

Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Index ceil_index(const Rational& q) {
  Integer c = ceil(q);
  if (c <= 1) return 1;
  if (!mpz_fits_ulong_p(c.get_mpz_t()) || c > Integer(std::to_string(std::numeric_limits<Index>::max() / 2)))
    throw SearchCapError("required index " + c.get_str() + " exceeds the 63-bit index range");
  return c.get_ui();
}

Index isqrt(Index n) {
  auto r = static_cast<Index>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

unsigned nu2(Index n) { return n == 0 ? 64u : static_cast<unsigned>(__builtin_ctzll(n)); }

}  // namespace tauber
