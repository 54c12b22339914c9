#ifndef CONOSCOPE_INTERVAL_HPP
#define CONOSCOPE_INTERVAL_HPP

#include "conoscope/rational.hpp"

namespace cono {

// Closed interval with exact rational endpoints.
struct Interval {
    Rational lo, hi;

    Interval() : lo(0), hi(0) {}
    Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {}
    static Interval point(const Rational& q) { return Interval(q, q); }

    bool is_point() const { return lo == hi; }
    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / 2; }
    bool contains(const Rational& q) const { return lo <= q && q <= hi; }
    bool contains_zero() const { return sign(lo) <= 0 && sign(hi) >= 0; }

    // Sign if the interval is sign-definite, otherwise 2 (unknown).
    int definite_sign() const {
        if (sign(lo) > 0) return 1;
        if (sign(hi) < 0) return -1;
        if (is_point() && sign(lo) == 0) return 0;
        return 2;
    }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval pow(const Interval& a, unsigned e);
Interval scale(const Interval& a, const Rational& c);

inline bool disjoint(const Interval& a, const Interval& b) {
    return a.hi < b.lo || b.hi < a.lo;
}

} // namespace cono

#endif
