#ifndef CONOSCOPE_QE_HPP
#define CONOSCOPE_QE_HPP

#include "conoscope/algebraic.hpp"
#include "conoscope/budget.hpp"
#include "conoscope/formula.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace cono {

// One cell of a cylindrical algebraic decomposition. `index` gives the stack
// position per level (1-based; odd = sector, even = section), `sample` the
// exact sample point, `dimension` the number of sector coordinates.
struct CadCell {
    std::vector<int> index;
    std::vector<AlgebraicNumber> sample;
    int dimension = 0;
    bool truth = false;
};

// Sign-invariant CAD of R^n for a set of input polynomials.
struct Cad {
    int nvars = 0;
    std::vector<int> order;                         // order[i] = input variable at CAD level i+1
    std::vector<std::vector<Polynomial>> levels;    // projection polys per level (CAD space)
    std::vector<CadCell> cells;                     // leaf cells, lexicographic by index
    long cell_count() const { return (long)cells.size(); }
};

// Builds a CAD sign-invariant for the given polynomials (Collins projection).
Cad cad_build(const std::vector<Polynomial>& polys, int nvars,
              const QeOptions& opts = {});

// Truth of a sentence (no free variables, no relation symbols) over R.
bool decide(const Formula& sentence, const QeOptions& opts = {});

// Quantifier elimination: equivalent quantifier-free formula over the frees.
Formula eliminate(const Formula& phi, const QeOptions& opts = {});

// A satisfying assignment for the free variables, if any.
std::optional<std::vector<AlgebraicNumber>> sample_point(const Formula& phi,
                                                         const QeOptions& opts = {});

// Real roots, ascending, of p(point, y) in variable `var`; the coordinates
// point[0..var) bind the variables below `var` and no higher variable may
// occur. Throws std::domain_error when the substituted polynomial vanishes
// identically.
std::vector<AlgebraicNumber> roots_at(const Polynomial& p, int var,
                                      const std::vector<AlgebraicNumber>& point,
                                      const QeOptions& opts = {});

// Exact truth of a quantifier-free formula at a point covering its free
// variables (position i of the point binds variable index i).
bool evaluate_at(const Formula& phi, const std::vector<AlgebraicNumber>& point);
bool evaluate_at(const Formula& phi, const std::vector<Rational>& point);

// Solutions of a formula in which exactly one variable is free: requires the
// solution set to be finite and returns it sorted ascending; throws
// std::domain_error if a whole interval satisfies the formula.
std::vector<AlgebraicNumber> finite_solution_set(const Formula& phi, int free_var,
                                                 const QeOptions& opts = {});

} // namespace cono

#endif
