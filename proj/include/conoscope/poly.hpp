#ifndef CONOSCOPE_POLY_HPP
#define CONOSCOPE_POLY_HPP

#include "conoscope/rational.hpp"
#include "conoscope/interval.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cono {

// Exponent vector; length = variable count of the owning polynomial.
using Monomial = std::vector<unsigned>;

// Graded-lexicographic order (ties by lex), the canonical term order everywhere.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

// Sparse multivariate polynomial over Q. Immutable in spirit: all operations
// return new values; no stored zero coefficients.
class Polynomial {
public:
    Polynomial() : nv_(0) {}
    explicit Polynomial(int nvars) : nv_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c);
    static Polynomial variable(int nvars, int var);
    // monomial c * x_var^e
    static Polynomial mono(int nvars, int var, unsigned e, const Rational& c = 1);

    int nvars() const { return nv_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Constant term value; requires is_constant().
    Rational constant_value() const;

    const std::map<Monomial, Rational, GrlexLess>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    int degree(int var) const;       // -1 for the zero polynomial
    int total_degree() const;        // -1 for the zero polynomial

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Rational& c) const;
    Polynomial pow(unsigned e) const;
    bool operator==(const Polynomial& o) const;
    bool operator!=(const Polynomial& o) const { return !(*this == o); }
    bool operator<(const Polynomial& o) const;  // arbitrary total order for containers

    Polynomial derivative(int var) const;

    // Coefficient of var^k, as a polynomial with exponent 0 in var.
    Polynomial coeff(int var, unsigned k) const;
    Polynomial leading_coeff(int var) const;
    // Drop the leading term in var (the "reductum").
    Polynomial reductum(int var) const;

    Rational eval(const std::vector<Rational>& point) const;
    // Substitute a rational for one variable.
    Polynomial subst(int var, const Rational& value) const;
    // Substitute a polynomial for one variable.
    Polynomial subst(int var, const Polynomial& value) const;
    Interval eval_interval(const std::vector<Interval>& box) const;

    // Reinterpret with a new variable space: new_index[i] is the slot of old
    // variable i; target space has new_nvars variables.
    Polynomial remap(int new_nvars, const std::vector<int>& new_index) const;
    Polynomial extended(int new_nvars) const;  // append fresh unused variables

    // Divide by the integer content and fix the leading sign positive.
    Polynomial normalized() const;
    std::vector<int> used_vars() const;

    std::string to_string(const std::vector<std::string>& names) const;
    std::string to_string() const;  // default names x1..xn

    void add_term(const Monomial& m, const Rational& c);  // builder helper

private:
    int nv_;
    std::map<Monomial, Rational, GrlexLess> terms_;
};

// Exact division; throws std::domain_error when not divisible.
Polynomial exact_divide(const Polynomial& a, const Polynomial& b);
std::optional<Polynomial> try_exact_divide(const Polynomial& a, const Polynomial& b);

// Multivariate gcd over Q (primitive, positive leading coefficient).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

// Content / primitive part with respect to one variable.
Polynomial content(const Polynomial& f, int var);
Polynomial primitive_part(const Polynomial& f, int var);

// Square-free part: f / gcd(f, f') taken over all used variables.
Polynomial squarefree_part(const Polynomial& f);

// Resultant with respect to var. Convention: if one argument is constant in
// var, returns c^deg(other); both constant is an error.
Polynomial resultant(const Polynomial& f, const Polynomial& g, int var);

// Principal subresultant coefficients psc_0..psc_{min(deg f,deg g)-1} of f, g
// w.r.t. var, via the subresultant PRS. Entries are determined up to sign
// (psc_0 is +-resultant); only their zero sets carry meaning downstream.
std::vector<Polynomial> principal_subresultant_coeffs(const Polynomial& f,
                                                      const Polynomial& g,
                                                      int var);

// Determinant-based reference for principal_subresultant_coeffs (slow; kept
// for cross-checking in tests). Values are the exact Sylvester-submatrix
// determinants.
std::vector<Polynomial> psc_determinant(const Polynomial& f,
                                        const Polynomial& g,
                                        int var);

// Determinant of the Sylvester matrix (test oracle for resultant).
Polynomial sylvester_determinant(const Polynomial& f, const Polynomial& g, int var);

Polynomial discriminant(const Polynomial& f, int var);

} // namespace cono

#endif
