#include "conoscope/interval.hpp"

#include <algorithm>

namespace cono {

Interval operator+(const Interval& a, const Interval& b) {
    return Interval(a.lo + b.lo, a.hi + b.hi);
}

Interval operator-(const Interval& a, const Interval& b) {
    return Interval(a.lo - b.hi, a.hi - b.lo);
}

Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

Interval operator*(const Interval& a, const Interval& b) {
    Rational c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
    return Interval(std::min(std::min(c1, c2), std::min(c3, c4)),
                    std::max(std::max(c1, c2), std::max(c3, c4)));
}

Interval pow(const Interval& a, unsigned e) {
    if (e == 0) return Interval::point(1);
    Interval r = a;
    for (unsigned i = 1; i < e; i++) r = r * a;
    return r;
}

Interval scale(const Interval& a, const Rational& c) {
    if (sign(c) >= 0) return Interval(a.lo * c, a.hi * c);
    return Interval(a.hi * c, a.lo * c);
}

} // namespace cono
