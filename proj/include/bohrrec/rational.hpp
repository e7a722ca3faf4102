#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1)
{
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational make_rational(const Integer &num, const Integer &den)
{
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Integer floor_of(const Rational &x)
{
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

inline Integer ceil_of(const Rational &x)
{
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

// representative in [0,1)
inline Rational frac(const Rational &x)
{
  Rational r = x - Rational(floor_of(x));
  return r;
}

// distance to the nearest integer
inline Rational torus_norm(const Rational &x)
{
  Rational f = frac(x);
  Rational g = Rational(1) - f;
  return f < g ? f : g;
}

inline Rational rational_pow(const Rational &x, unsigned long e)
{
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), x.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), x.get_den_mpz_t(), e);
  return make_rational(n, d);
}

inline Integer integer_pow(unsigned long base, unsigned long e)
{
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

inline Integer binomial(unsigned long n, unsigned long k)
{
  Integer r;
  if (k > n) return r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// "p/q" or "p" or a finite decimal such as "0.95" or "1e-6"
inline Rational parse_rational(const std::string &text)
{
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Integer n, d;
    if (n.set_str(text.substr(0, slash), 10) != 0 || d.set_str(text.substr(slash + 1), 10) != 0)
      throw std::invalid_argument("bad rational: " + text);
    return make_rational(n, d);
  }
  std::string mant = text;
  long exp10 = 0;
  auto e = text.find_first_of("eE");
  if (e != std::string::npos) {
    mant = text.substr(0, e);
    try {
      std::size_t used = 0;
      exp10 = std::stol(text.substr(e + 1), &used);
      if (used != text.size() - e - 1) throw std::invalid_argument("x");
    } catch (...) {
      throw std::invalid_argument("bad rational: " + text);
    }
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant = mant.substr(1);
  }
  auto dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad rational: " + text);
  Integer n(digits, 10);
  if (neg) n = -n;
  if (exp10 >= 0) return Rational(n * integer_pow(10, static_cast<unsigned long>(exp10)));
  return make_rational(n, integer_pow(10, static_cast<unsigned long>(-exp10)));
}

inline std::string to_string(const Rational &q) { return q.get_str(); }

inline double to_double(const Rational &q) { return q.get_d(); }

// primality by trial division; moduli here are small
inline bool is_prime(std::uint64_t n)
{
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

inline std::uint64_t next_prime(std::uint64_t n)
{
  while (!is_prime(n)) ++n;
  return n;
}

} // namespace bohrrec
