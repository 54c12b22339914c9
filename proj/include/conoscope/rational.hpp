#ifndef CONOSCOPE_RATIONAL_HPP
#define CONOSCOPE_RATIONAL_HPP

#include <gmpxx.h>
#include <string>
#include <stdexcept>

namespace cono {

using Rational = mpq_class;
using Integer = mpz_class;

inline int sign(const Rational& q) { return sgn(q); }

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses "a", "a/b", or decimal "a.b" into an exact rational.
Rational parse_rational(const std::string& text);

// Decimal rendering with the given number of fractional digits, round-to-nearest.
std::string to_decimal(const Rational& q, int digits);

std::string to_string(const Rational& q);

} // namespace cono

#endif
