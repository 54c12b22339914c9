#ifndef CONOSCOPE_STRATA_HPP
#define CONOSCOPE_STRATA_HPP

#include "conoscope/qe.hpp"

#include <string>
#include <vector>

namespace cono {

enum class StratumFlag { InSet, InFrontier };

// One smooth piece of cl(A): the points of V(equations) satisfying the side
// conditions, on which the Jacobian of the equations has rank exactly `rank`.
struct Stratum {
    int n = 0;
    std::vector<Polynomial> equations;  // n-variate, vanish on the stratum
    int rank = 0;                       // Jacobian rank everywhere on the stratum
    Formula side;                       // quantifier-free sign conditions over x1..xn
    StratumFlag flag = StratumFlag::InSet;
    std::vector<std::vector<AlgebraicNumber>> samples;  // exact points, nonempty

    int dimension() const { return n - rank; }
    // equations = 0 AND side, as a quantifier-free formula over x1..xn.
    Formula membership() const;
};

// Decomposition of cl(A) into smooth strata, ordered by dimension descending.
struct Stratification {
    int n = 0;
    SetDescription set;       // the input A
    SetDescription closure;   // cl(A), quantifier-free
    std::vector<Stratum> strata;

    bool empty() const { return strata.empty(); }
    std::vector<const Stratum*> of_dimension(int k) const;
};

// Topological closure as a quantifier-free description (syntactic shortcut for
// formulas built from closed atoms; epsilon-delta QE otherwise).
SetDescription closure(const SetDescription& A, const QeOptions& opts = {});

// cl(A) - A (empty for closed A).
SetDescription frontier(const SetDescription& A, const QeOptions& opts = {});

// Dimension of the set: -1 when empty, else the maximum CAD cell dimension.
int dimension(const SetDescription& A, const QeOptions& opts = {});

// Decomposes cl(A) into smooth strata compatible with A: the construction runs
// on A and on cl(A) - A separately; strata are grouped by the sign assignment
// of the description's polynomials and split by iterated singular loci.
Stratification stratify(const SetDescription& A, const QeOptions& opts = {});

// Jacobian matrix of the system E (rows = equations, columns = variables).
std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& E, int n);

// All k x k minors of a polynomial matrix.
std::vector<Polynomial> matrix_minors(const std::vector<std::vector<Polynomial>>& M,
                                      int k);

// JSON report: per stratum - dimension, equations, rank, side conditions,
// flag, sample points (decimal to `precision` digits).
std::string stratification_report(const Stratification& s, int precision = 6);

}  // namespace cono

#endif
