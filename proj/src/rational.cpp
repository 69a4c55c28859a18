#include "moran/rational.hpp"

#include <cmath>

namespace moran {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("rational: empty string");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    Rational q{BigInt(text)};
    return q;
  }
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::size_t frac_len = text.size() - dot - 1;
  if (frac_len == 0 || digits.empty()) throw std::invalid_argument("rational: malformed decimal");
  BigInt num(digits);
  BigInt den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigInt ceil_rational(const Rational& q) {
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return out;
}

Rational rationalize(double x, unsigned long den_cap) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite input");
  bool neg = x < 0;
  double v = neg ? -x : x;
  // Stern-Brocot style continued fraction with bounded denominator.
  unsigned long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int iters = 0; iters < 64; ++iters) {
    double fl = std::floor(frac);
    if (fl > 1e18) break;
    auto a = static_cast<unsigned long>(fl);
    if (q1 != 0 && a > (den_cap - q0) / q1) break;
    unsigned long p2 = a * p1 + p0;
    unsigned long q2 = a * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = frac - fl;
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  Rational q(static_cast<long>(p1), static_cast<long>(q1 == 0 ? 1 : q1));
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

double log_rational(const Rational& q) {
  if (q <= 0) throw std::invalid_argument("log_rational: non-positive input");
  signed long exp_num = 0, exp_den = 0;
  double mant_num = mpz_get_d_2exp(&exp_num, q.get_num().get_mpz_t());
  double mant_den = mpz_get_d_2exp(&exp_den, q.get_den().get_mpz_t());
  constexpr double ln2 = 0.6931471805599453;
  return std::log(mant_num) - std::log(mant_den) + ln2 * static_cast<double>(exp_num - exp_den);
}

}  // namespace moran
