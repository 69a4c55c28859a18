#ifndef MORAN_RATIONAL_HPP
#define MORAN_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace moran {

// Exact arbitrary-precision fraction, canonical form (den > 0, lowest terms).
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Parses "p", "p/q" or a plain decimal like "0.25" into an exact rational.
Rational parse_rational(const std::string& text);

// "num/den" in lowest terms, denominator always present ("4" prints as "4/1").
std::string format_rational(const Rational& q);

// Nearest-double conversion; relative error below 1e-15 for representable
// magnitudes, which is well inside every tolerance used here.
inline double to_double(const Rational& q) { return q.get_d(); }

// ceil(q) as a big integer.
BigInt ceil_rational(const Rational& q);

// Continued-fraction approximation of x with denominator at most den_cap.
// Callers holding a float fitness must go through this before using the
// exact-solver interfaces.
Rational rationalize(double x, unsigned long den_cap = 1000000);

// log(num/den) without overflow, valid for q > 0.
double log_rational(const Rational& q);

}  // namespace moran

#endif
