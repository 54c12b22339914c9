#ifndef CONOSCOPE_FOGEN_HPP
#define CONOSCOPE_FOGEN_HPP

#include "conoscope/formula.hpp"

namespace cono {

// First-order query generator. Every generator returns a Formula over the
// ordered field language plus a free relation symbol "S" of arity n ("S1" and
// "S2" for the Whitney query). Instantiating the relation with a concrete
// semi-algebraic set turns the query into an ordinary sentence/formula that
// the QE engine can evaluate.

enum class QueryName { Tangent, Kreg, Whitney, Stratum, Crit, Val, Radius, Interior };

// The cone-radius query ships in two variants. Corrected mode guards the
// critical-point query with x != p (so the trivial critical value 0 at x = p
// is excluded) and compares r*r against the squared-distance critical values,
// yielding radii in distance units. PaperLiteral mode omits the guard and
// compares r directly against squared values; it accepts no radii on typical
// inputs and exists to document that defect in regression tests.
enum class RadiusMode { PaperLiteral, Corrected };

struct GeneratedQuery {
    QueryName name;
    int n = 0;   // ambient dimension
    int k = -1;  // dimension parameter where applicable (kreg, stratum)
    Formula formula;
};

// v in the tangent set of S at x, via the contingent-cone characterization:
// for all eps > 0, delta > 0 there is y in S with 0 < |y-x|^2 < delta and
// some lambda > 0 with |lambda(y-x) - v|^2 < eps; the zero vector is always
// tangent. Free variables: x1..xn, v1..vn.
GeneratedQuery gen_tangent(int n);

// x lies in S and S is a C^1 manifold of dimension k near x. Free: x1..xn.
GeneratedQuery gen_kreg(int n, int k);

// The triple (S1, x, S2) satisfies Whitney condition (b) at x: secant
// directions from nearby x' in S1 to nearby y in S2 are eps-close to the
// tangent set of S2 at y. Free: x1..xn; relations S1, S2.
GeneratedQuery gen_whitney(int n);

// x belongs to the k-th stratum Z_k of the canonical C^1 Whitney
// stratification of cl(S) compatible with S. Free: x1..xn.
GeneratedQuery gen_stratum(int n, int k);

// x lies in the topological interior of S. Free: x1..xn.
GeneratedQuery gen_interior(int n);

// x is a guarded critical point of the squared-distance map f_p on some
// stratum of cl(S): p in S, x != p (corrected mode only), x in stratum j, and
// (x - p) is orthogonal to every tangent vector of stratum j at x.
// Free: p1..pn, x1..xn.
GeneratedQuery gen_crit(int n, RadiusMode mode = RadiusMode::Corrected);

// r is a critical value of f_p: exists x with crit(p, x) and r = |x - p|^2.
// Free: p1..pn, r.
GeneratedQuery gen_val(int n, RadiusMode mode = RadiusMode::Corrected);

// Cone-radius acceptance: corrected mode is
//   S(p) and r > 0 and forall r' (val(p, r') -> r*r < r'),
// paper-literal mode compares r < r' without the positivity guard.
// Free: p1..pn, r.
GeneratedQuery gen_radius(int n, RadiusMode mode);

// Substitute a concrete set description for the query's relation symbol.
// The single-set overload serves every query except Whitney; the two-set
// overload instantiates S1 and S2.
Formula instantiate(const GeneratedQuery& q, const SetDescription& a);
Formula instantiate(const GeneratedQuery& q, const SetDescription& a1,
                    const SetDescription& a2);

} // namespace cono

#endif
