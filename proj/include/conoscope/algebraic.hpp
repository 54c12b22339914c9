#ifndef CONOSCOPE_ALGEBRAIC_HPP
#define CONOSCOPE_ALGEBRAIC_HPP

#include "conoscope/poly.hpp"

#include <vector>

namespace cono {

// Exact real algebraic number: square-free univariate defining polynomial plus
// an isolating interval with rational endpoints. Rational values are stored
// with lo == hi.
class AlgebraicNumber {
public:
    AlgebraicNumber();  // zero
    AlgebraicNumber(Polynomial defining, Interval iv);
    static AlgebraicNumber from_rational(const Rational& q);

    const Polynomial& defining() const { return defining_; }
    const Interval& interval() const { return iv_; }
    bool is_rational() const { return iv_.is_point(); }
    Rational rational_value() const;  // requires is_rational()

    // Halve the isolating interval (no-op for rationals). May collapse to a
    // rational point when the midpoint happens to be the root.
    void refine();
    void refine_below(const Rational& width);

    int sign() const;  // sign of the number itself
    double approx() const;
    std::string decimal(int digits) const;

    friend int compare(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend int compare(const AlgebraicNumber& a, const Rational& q);
    bool operator==(const AlgebraicNumber& o) const { return compare(*this, o) == 0; }
    bool operator<(const AlgebraicNumber& o) const { return compare(*this, o) < 0; }

private:
    Polynomial defining_;  // univariate (nvars = 1), square-free, primitive
    Interval iv_;
    void normalize();
};

// All distinct real roots of a nonzero univariate polynomial, ascending.
// Throws std::invalid_argument on the zero polynomial.
std::vector<AlgebraicNumber> isolate_real_roots(const Polynomial& f);

// Number of distinct real roots of f in (a, b], via Sturm's theorem.
int count_real_roots(const Polynomial& f, const Rational& a, const Rational& b);

// Exact sign of a multivariate polynomial at a point with algebraic
// coordinates. point.size() must equal f.nvars().
int sign_at(const Polynomial& f, const std::vector<AlgebraicNumber>& point);

// Exact sign of a univariate polynomial at one algebraic number.
int sign_at(const Polynomial& f, const AlgebraicNumber& a);

} // namespace cono

#endif
