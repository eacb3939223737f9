#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

#include "staircase/error.hpp"

namespace staircase {

/// Unbounded integer used for every height, level index and cut count.
using Int = mpz_class;
/// Exact rational used for widths and measures.
using Rational = mpq_class;

inline Rational make_rational(const Int& num, const Int& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Floor of the square root of a nonnegative integer.
inline Int isqrt(const Int& x) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return r;
}

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Rational abs_rational(const Rational& x) { return x < 0 ? Rational(-x) : x; }

/// Converts to size_t, throwing ResourceLimit when the value does not fit.
std::size_t to_size(const Int& x, std::string_view what);

/// Largest x >= 0 with x*a + x*(x-1)/2 <= n, for n >= 0 and a >= 0.
/// This is the index of the last triangular-staircase block starting at or
/// below n; it is found from the quadratic root and corrected by one step.
Int staircase_block_index(const Int& n, const Int& a);

/// Lower and upper rational bounds of sqrt(x) for x >= 0. The bounds agree when
/// x is the square of a rational; otherwise they differ by 2^-bits relative to
/// the denominator scale.
struct SqrtBounds {
  Rational lo, hi;
};
SqrtBounds sqrt_bounds(const Rational& x, unsigned bits = 64);

Int parse_int(std::string_view text);
/// Accepts "p", "p/q" and "-p/q".
Rational parse_rational(std::string_view text);
/// Canonical exact text: "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);
std::string to_string(const Int& z);

}  // namespace staircase
