#include "conoscope/qe.hpp"

#include <algorithm>
#include <map>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cono {

namespace {

// ------------------------------------------------------------- projection

void place_poly(std::vector<std::set<Polynomial>>& levels, const Polynomial& p) {
    Polynomial q = squarefree_part(p);
    if (q.is_zero() || q.is_constant()) return;
    auto used = q.used_vars();
    levels[used.back()].insert(q.normalized());
}

// Collins projection of the polynomials at one level (main variable mv) into
/// the lower levels: contents, reducta leading coefficients, psc chains of
// each reductum with its derivative and of cross pairs.
// Replaces a level set by a pairwise-coprime square-free basis with the same
// union of zero sets. Every original member is a product of basis members (up
// to a constant), so sign-invariance of the basis gives sign-invariance of the
// originals, while degrees and duplicate factors shrink sharply.
void refine_basis(std::set<Polynomial>& S) {
    std::vector<Polynomial> L(S.begin(), S.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < L.size() && !changed; i++) {
            for (std::size_t j = i + 1; j < L.size() && !changed; j++) {
                Polynomial g = gcd(L[i], L[j]);
                if (g.is_constant()) continue;
                Polynomial a = exact_divide(L[i], g).normalized();
                Polynomial b = exact_divide(L[j], g).normalized();
                std::vector<Polynomial> nl;
                for (std::size_t k = 0; k < L.size(); k++)
                    if (k != i && k != j) nl.push_back(L[k]);
                for (const Polynomial& q : {g.normalized(), a, b})
                    if (!q.is_zero() && !q.is_constant() &&
                        std::find(nl.begin(), nl.end(), q) == nl.end())
                        nl.push_back(q);
                L = std::move(nl);
                changed = true;
            }
        }
    }
    S.clear();
    S.insert(L.begin(), L.end());
}

struct ProjectionAbort {};

void project_level(std::vector<std::set<Polynomial>>& levels, int mv,
                   Budget& budget, std::size_t max_total = SIZE_MAX) {
    {
        std::size_t n = 0;
        for (const auto& L : levels) n += L.size();
        if (n > max_total) throw ProjectionAbort{};
    }
    refine_basis(levels[mv]);
    std::vector<Polynomial> B(levels[mv].begin(), levels[mv].end());
    auto emit = [&](const Polynomial& p) {
        budget.check_time();
        if (p.is_zero() || p.is_constant()) return;
        place_poly(levels, p);
        if (max_total != SIZE_MAX) {
            std::size_t n = 0;
            for (const auto& L : levels) n += L.size();
            if (n > max_total) throw ProjectionAbort{};
        }
    };
    // Reducta chains per input. The chain stops at the first reductum whose
    // leading coefficient is a nonzero constant: that coefficient cannot
    // vanish anywhere, so on every cell the effective polynomial is one of the
    // kept reducta and the lower ones never come into play.
    std::vector<std::vector<Polynomial>> reducta(B.size());
    for (std::size_t i = 0; i < B.size(); i++) {
        Polynomial f = primitive_part(B[i], mv);
        emit(content(B[i], mv));
        bool truncated = false;
        while (f.degree(mv) >= 1) {
            reducta[i].push_back(f);
            Polynomial lc = f.leading_coeff(mv);
            if (lc.is_constant()) { truncated = true; break; }
            emit(lc);
            f = f.reductum(mv);
        }
        if (!truncated && !f.is_zero()) emit(f);  // trailing coefficient
    }
    for (std::size_t i = 0; i < B.size(); i++) {
        for (const Polynomial& r : reducta[i]) {
            Polynomial dr = r.derivative(mv);
            if (r.degree(mv) >= 2 && dr.degree(mv) >= 1) {
                for (const Polynomial& s : principal_subresultant_coeffs(r, dr, mv))
                    emit(s);
            }
        }
        for (std::size_t j = i + 1; j < B.size(); j++) {
            for (const Polynomial& r : reducta[i]) {
                for (const Polynomial& s : reducta[j]) {
                    if (r.degree(mv) >= 1 && s.degree(mv) >= 1) {
                        for (const Polynomial& c : principal_subresultant_coeffs(r, s, mv))
                            emit(c);
                    }
                }
            }
        }
    }
}

// Full projection: levels[j] holds polynomials whose highest CAD variable is
// j. Input polys live in CAD space (nvars = total). When a size cap is given
// and exceeded, throws ProjectionAbort; callers comparing candidate variable
// orders treat the order as infeasible.
std::vector<std::vector<Polynomial>> project_all(const std::vector<Polynomial>& input,
                                                 int total, Budget& budget,
                                                 std::size_t max_total = SIZE_MAX) {
    std::vector<std::set<Polynomial>> levels(total);
    for (const auto& p : input) {
        if (p.is_zero() || p.is_constant()) continue;
        place_poly(levels, p);
    }
    for (int mv = total - 1; mv >= 1; mv--) {
        project_level(levels, mv, budget, max_total);
        std::size_t n = 0;
        for (const auto& L : levels) n += L.size();
        if (n > max_total) throw ProjectionAbort{};
    }
    refine_basis(levels[0]);
    std::vector<std::vector<Polynomial>> out(total);
    for (int j = 0; j < total; j++) out[j].assign(levels[j].begin(), levels[j].end());
    return out;
}

// ------------------------------------------------------------------ lifting

// Full-size sample point (CAD space, unused slots zero).
std::vector<AlgebraicNumber> padded(const std::vector<AlgebraicNumber>& prefix, int total) {
    std::vector<AlgebraicNumber> pt = prefix;
    pt.resize(total, AlgebraicNumber::from_rational(0));
    return pt;
}

// Real roots of p(prefix, y) where y is CAD variable mv = prefix.size().
// Returns nullopt when p vanishes identically over the prefix.
std::optional<std::vector<AlgebraicNumber>> roots_over(
    const Polynomial& p, int mv, int total,
    const std::vector<AlgebraicNumber>& prefix, Budget& budget) {
    budget.check_time();
    // substitute rational prefix coordinates
    Polynomial q = p;
    std::vector<int> irr;
    for (int i = 0; i < mv; i++) {
        if (prefix[i].is_rational())
            q = q.subst(i, prefix[i].rational_value());
        else
            irr.push_back(i);
    }
    std::vector<AlgebraicNumber> full = padded(prefix, total);
    // effective degree at the sample
    int deg = q.degree(mv);
    int eff = -1;
    for (int k = deg; k >= 0; k--) {
        Polynomial c = q.coeff(mv, (unsigned)k);
        if (c.is_zero()) continue;
        if (sign_at(c, full) != 0) { eff = k; break; }
    }
    if (eff < 0) return std::nullopt;  // identically zero over this cell
    if (eff == 0) return std::vector<AlgebraicNumber>{};
    Polynomial pe(q.nvars());
    for (int k = 0; k <= eff; k++)
        pe = pe + q.coeff(mv, (unsigned)k) * Polynomial::mono(q.nvars(), mv, (unsigned)k, 1);

    if (irr.empty()) {
        std::vector<int> idx(total, 0);
        idx[mv] = 0;
        Polynomial uni = pe.remap(1, idx);
        return isolate_real_roots(uni);
    }

    // eliminate irrational prefix coordinates by iterated resultants; strip
    // common factors with the defining polynomials first so nothing collapses
    Polynomial h = pe;
    for (int c : irr) {
        std::vector<int> didx{c};
        Polynomial d = prefix[c].defining().remap(total, didx);
        while (true) {
            Polynomial G = gcd(h, d);
            if (G.degree(c) < 1) break;
            if (sign_at(G, full) != 0)
                d = exact_divide(d, G).normalized();
            else
                h = exact_divide(h, G).normalized();
            if (h.degree(mv) < 1) break;
        }
        if (h.degree(mv) < 1) break;
        if (d.degree(c) < 1) continue;  // defining fully stripped: h free of c
        if (h.degree(c) < 1) continue;
        h = resultant(h, d, c);
        if (h.is_zero())
            throw std::logic_error("degenerate lifting resultant");
        h = squarefree_part(h);
    }
    if (h.degree(mv) < 1) return std::vector<AlgebraicNumber>{};
    std::vector<int> idx(total, 0);
    idx[mv] = 0;
    Polynomial R = h.remap(1, idx);
    std::vector<AlgebraicNumber> candidates = isolate_real_roots(R);
    std::vector<AlgebraicNumber> out;
    for (auto& cand : candidates) {
        std::vector<AlgebraicNumber> pt = full;
        pt[mv] = cand;
        if (sign_at(pe, pt) == 0) out.push_back(cand);
    }
    return out;
}

// Children of the stack over a cell: coordinates in ascending order,
// alternating sector, section, sector, ..., sector.
struct StackChild {
    AlgebraicNumber coord;
    bool section;
};

std::vector<StackChild> build_stack(const std::vector<Polynomial>& level_polys,
                                    int mv, int total,
                                    const std::vector<AlgebraicNumber>& prefix,
                                    Budget& budget) {
    std::vector<AlgebraicNumber> roots;
    for (const auto& p : level_polys) {
        auto r = roots_over(p, mv, total, prefix, budget);
        if (!r) continue;  // vanishes identically: no sections contributed
        for (auto& a : *r) roots.push_back(a);
    }
    std::sort(roots.begin(), roots.end(),
              [](const AlgebraicNumber& a, const AlgebraicNumber& b) { return compare(a, b) < 0; });
    std::vector<AlgebraicNumber> uniq;
    for (auto& r : roots)
        if (uniq.empty() || compare(uniq.back(), r) != 0) uniq.push_back(r);

    std::vector<StackChild> out;
    if (uniq.empty()) {
        out.push_back({AlgebraicNumber::from_rational(0), false});
        return out;
    }
    // separate isolating intervals so sector samples are easy to read off
    for (std::size_t i = 0; i + 1 < uniq.size(); i++) {
        while (!(uniq[i].interval().hi < uniq[i + 1].interval().lo)) {
            uniq[i].refine();
            uniq[i + 1].refine();
        }
    }
    out.push_back({AlgebraicNumber::from_rational(uniq.front().interval().lo - 1), false});
    for (std::size_t i = 0; i < uniq.size(); i++) {
        out.push_back({uniq[i], true});
        if (i + 1 < uniq.size()) {
            Rational mid = (uniq[i].interval().hi + uniq[i + 1].interval().lo) / 2;
            out.push_back({AlgebraicNumber::from_rational(mid), false});
        }
    }
    out.push_back({AlgebraicNumber::from_rational(uniq.back().interval().hi + 1), false});
    return out;
}

// ------------------------------------------------------- matrix evaluation

struct AtomTable {
    std::vector<Polynomial> polys;       // CAD space
    std::vector<RelOp> ops;
    std::vector<int> max_level;          // highest CAD var + 1 (0 for constants)
    std::map<const Node*, int> by_node;  // formula atom -> index
};

// Remaps formula-space polynomials into CAD space given order (CAD var i
// carries formula variable order[i]).
AtomTable collect_atoms(const NodePtr& matrix, int formula_nvars,
                        const std::vector<int>& order) {
    AtomTable t;
    std::vector<int> to_cad(formula_nvars, -1);
    for (std::size_t i = 0; i < order.size(); i++) to_cad[order[i]] = (int)i;
    std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
        if (n->kind == NodeKind::Atom) {
            if (t.by_node.count(n.get())) return;
            for (int v : n->poly.used_vars())
                if (to_cad[v] < 0)
                    throw std::logic_error("matrix uses a variable outside the CAD order");
            Polynomial p = n->poly.remap((int)order.size(), [&] {
                std::vector<int> idx(formula_nvars, 0);
                for (int i = 0; i < formula_nvars; i++) idx[i] = std::max(to_cad[i], 0);
                return idx;
            }());
            int lvl = 0;
            for (int v : p.used_vars()) lvl = std::max(lvl, v + 1);
            t.by_node[n.get()] = (int)t.polys.size();
            t.polys.push_back(std::move(p));
            t.ops.push_back(n->op);
            t.max_level.push_back(lvl);
            return;
        }
        if (n->kind == NodeKind::RelAtom)
            throw std::invalid_argument("uninstantiated relation");
        for (auto& k : n->kids) walk(k);
    };
    walk(matrix);
    return t;
}

// Three-valued (Kleene) evaluation: +1 true, -1 false, 0 undetermined.
// Atoms whose sign is not yet known (marked 9) evaluate to 0, so the result
// is +-1 only when the matrix truth no longer depends on deeper variables.
int eval_matrix3(const NodePtr& n, const AtomTable& atoms, const std::vector<int>& signs) {
    switch (n->kind) {
        case NodeKind::True: return 1;
        case NodeKind::False: return -1;
        case NodeKind::Atom: {
            int s = signs[atoms.by_node.at(n.get())];
            if (s == 9) return 0;
            return eval_op(s, n->op) ? 1 : -1;
        }
        case NodeKind::Not: return -eval_matrix3(n->kids[0], atoms, signs);
        case NodeKind::And: {
            int r = 1;
            for (auto& k : n->kids) {
                int t = eval_matrix3(k, atoms, signs);
                if (t < 0) return -1;
                r = std::min(r, t);
            }
            return r;
        }
        case NodeKind::Or: {
            int r = -1;
            for (auto& k : n->kids) {
                int t = eval_matrix3(k, atoms, signs);
                if (t > 0) return 1;
                r = std::max(r, t);
            }
            return r;
        }
        case NodeKind::Implies: {
            int a = eval_matrix3(n->kids[0], atoms, signs);
            if (a < 0) return 1;
            int b = eval_matrix3(n->kids[1], atoms, signs);
            if (b > 0) return 1;
            if (a > 0 && b < 0) return -1;
            return 0;
        }
        default:
            throw std::logic_error("quantifier in matrix");
    }
}

// ----------------------------------------------------------- the block run

struct BaseCell {
    std::vector<int> index;
    std::vector<AlgebraicNumber> sample;
    int dimension = 0;
    bool truth = false;
    std::vector<int> signature;  // signs of base-level projection polys
};

struct BlockRun {
    std::vector<std::vector<Polynomial>> levels;  // CAD space projection sets
    std::vector<BaseCell> base;                   // cells of the first k levels
};

class BlockSolver {
public:
    BlockSolver(const NodePtr& matrix, int formula_nvars, std::vector<int> order,
                int k, std::vector<bool> block_forall, const QeOptions& opts,
                Budget& budget, const std::vector<Polynomial>& extra_formula_polys,
                std::size_t max_projection = SIZE_MAX)
        : matrix_(matrix), order_(std::move(order)), k_(k),
          block_forall_(std::move(block_forall)), opts_(opts), budget_(budget) {
        total_ = (int)order_.size();
        atoms_ = collect_atoms(matrix, formula_nvars, order_);
        std::vector<Polynomial> input = atoms_.polys;
        std::vector<int> to_cad(formula_nvars, -1);
        for (std::size_t i = 0; i < order_.size(); i++) to_cad[order_[i]] = (int)i;
        for (const auto& p : extra_formula_polys) {
            std::vector<int> idx(formula_nvars, 0);
            for (int i = 0; i < formula_nvars; i++) idx[i] = std::max(to_cad[i], 0);
            input.push_back(p.remap(total_, idx));
        }
        levels_ = project_all(input, total_, budget_, max_projection);
        if (std::getenv("QE_TRACE")) {
            std::fprintf(stderr, "  [solver] levels:");
            for (auto& L : levels_) std::fprintf(stderr, " %zu", L.size());
            std::fprintf(stderr, "\n");
        }
    }

    BlockRun run() {
        std::vector<BaseCell> base;
        std::vector<AlgebraicNumber> prefix;
        std::vector<int> index;
        std::vector<int> signs(atoms_.polys.size(), 9);
        enumerate_base(0, prefix, index, 0, base);
        if (std::getenv("QE_TRACE"))
            std::fprintf(stderr, "  [solver] base cells: %zu\n", base.size());
        // decide truth of each base cell (independent; data-parallel)
        std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts_.parallel && base.size() > 1)
#endif
        for (long i = 0; i < (long)base.size(); i++) {
            try {
                auto sample = base[i].sample;
                std::vector<int> s(atoms_.polys.size(), 9);
                fill_signs(sample, k_, s);
                int early = eval_matrix3(matrix_, atoms_, s);
                base[i].truth = early != 0 ? early > 0 : eval_block(k_, sample, s);
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        BlockRun out;
        out.levels = levels_;
        out.base = std::move(base);
        return out;
    }

    // truth for a zero-free-variable run (k = 0)
    bool decide_root() {
        std::vector<AlgebraicNumber> prefix;
        std::vector<int> signs(atoms_.polys.size(), 9);
        return eval_block(0, prefix, signs);
    }

    const std::vector<std::vector<Polynomial>>& levels() const { return levels_; }

    // Estimated lifting cost: the log of the worst-case cell count, taking
    // the degree sum at each level as a proxy for the number of stack roots.
    double lift_cost() const {
        double c = 0;
        for (int l = 0; l < total_; l++) {
            long d = 0;
            for (const auto& p : levels_[l]) d += std::max(1, p.degree(l));
            c += std::log(2.0 * (double)d + 3.0);
        }
        return c;
    }

private:
    NodePtr matrix_;
    std::vector<int> order_;
    int k_, total_;
    std::vector<bool> block_forall_;
    QeOptions opts_;
    Budget& budget_;
    AtomTable atoms_;
    std::vector<std::vector<Polynomial>> levels_;

    // compute signs of atoms fully determined at the current level
    void fill_signs(const std::vector<AlgebraicNumber>& prefix, int level,
                    std::vector<int>& signs) {
        auto pt = padded(prefix, total_);
        for (std::size_t a = 0; a < atoms_.polys.size(); a++) {
            if (signs[a] != 9) continue;
            if (atoms_.max_level[a] <= level) signs[a] = sign_at(atoms_.polys[a], pt);
        }
    }

    void enumerate_base(int level, std::vector<AlgebraicNumber>& prefix,
                        std::vector<int>& index, int dim, std::vector<BaseCell>& out) {
        if (level == k_) {
            budget_.charge_cells();
            BaseCell c;
            c.index = index;
            c.sample = prefix;
            c.dimension = dim;
            out.push_back(std::move(c));
            return;
        }
        auto stack = build_stack(levels_[level], level, total_, prefix, budget_);
        for (std::size_t i = 0; i < stack.size(); i++) {
            prefix.push_back(stack[i].coord);
            index.push_back((int)i + 1);
            enumerate_base(level + 1, prefix, index, dim + (stack[i].section ? 0 : 1), out);
            index.pop_back();
            prefix.pop_back();
        }
    }

    // recursive quantifier evaluation over levels k..total
    bool eval_block(int level, std::vector<AlgebraicNumber>& prefix,
                    std::vector<int>& signs) {
        budget_.check_time();
        if (level == total_) return eval_matrix3(matrix_, atoms_, signs) > 0;
        bool forall = block_forall_[level - k_];
        auto stack = build_stack(levels_[level], level, total_, prefix, budget_);
        for (auto& child : stack) {
            budget_.charge_cells();
            prefix.push_back(child.coord);
            std::vector<int> s = signs;
            fill_signs(prefix, level + 1, s);
            // skip deeper stacks when the already-known signs settle the matrix
            int early = eval_matrix3(matrix_, atoms_, s);
            bool t = early != 0 ? early > 0 : eval_block(level + 1, prefix, s);
            prefix.pop_back();
            if (forall && !t) return false;
            if (!forall && t) return true;
        }
        return forall;
    }
};

// --------------------------------------------------- eliminate (bottom-up)

struct Eliminator {
    std::vector<std::string>* vars;  // formula variable table (stable)
    int nvars;
    QeOptions opts;
    std::shared_ptr<Budget> budget;
    std::map<std::string, NodePtr> memo;

    NodePtr elim(const NodePtr& n) {
        if (is_qf(n)) return simplify_node(n, nvars);
        switch (n->kind) {
            case NodeKind::Not: return simplify_node(mk_not(elim(n->kids[0])), nvars);
            case NodeKind::And:
            case NodeKind::Or: {
                std::vector<NodePtr> kids;
                for (auto& k : n->kids) kids.push_back(elim(k));
                NodePtr m = n->kind == NodeKind::And ? mk_and(std::move(kids))
                                                     : mk_or(std::move(kids));
                return simplify_node(m, nvars);
            }
            case NodeKind::Implies:
                return simplify_node(
                    mk_implies(elim(n->kids[0]), elim(n->kids[1])), nvars);
            case NodeKind::Exists:
            case NodeKind::Forall: {
                // Collect the maximal quantifier chain along the spine,
                // alternations included, prenexing guards that sit between
                // quantifiers into the matrix. An alternating chain is solved
                // by one CAD whose quantified levels short-circuit, instead
                // of cascading per-kind blocks whose intermediate solution
                // formulas blow up the projection sets.
                std::vector<int> chain;
                std::vector<bool> kinds;  // true = forall
                NodePtr matrix = spine(n, false, chain, kinds);
                return prefix_block(std::move(chain), std::move(kinds),
                                    std::move(matrix));
            }
            default:
                return n;
        }
    }

    // Walk the unique quantified branch of the formula, collecting the
    // quantifier prefix (with kinds flipped under negative polarity) and
    // returning the prenexed matrix. Quantifier-free siblings move into the
    // matrix unchanged, which is exact because they cannot mention the
    // deeper bound variables. Stops where several children are quantified;
    // those are eliminated recursively.
    NodePtr spine(const NodePtr& cur, bool neg, std::vector<int>& chain,
                  std::vector<bool>& kinds) {
        if (is_qf(cur)) return neg ? mk_not(cur) : cur;
        switch (cur->kind) {
            case NodeKind::Exists:
            case NodeKind::Forall:
                if (std::find(chain.begin(), chain.end(), cur->var) != chain.end())
                    break;  // shadowed variable: do not merge across it
                chain.push_back(cur->var);
                kinds.push_back((cur->kind == NodeKind::Forall) != neg);
                return spine(cur->kids[0], neg, chain, kinds);
            case NodeKind::Not:
                return spine(cur->kids[0], !neg, chain, kinds);
            case NodeKind::Implies:
                return spine(
                    mk_or(std::vector<NodePtr>{mk_not(cur->kids[0]), cur->kids[1]}),
                    neg, chain, kinds);
            case NodeKind::And:
            case NodeKind::Or: {
                int qi = -1, count = 0;
                for (std::size_t i = 0; i < cur->kids.size(); i++)
                    if (!is_qf(cur->kids[i])) {
                        qi = (int)i;
                        count++;
                    }
                if (count != 1) break;
                std::vector<NodePtr> out;
                for (std::size_t i = 0; i < cur->kids.size(); i++) {
                    if ((int)i == qi) continue;
                    out.push_back(neg ? mk_not(cur->kids[i]) : cur->kids[i]);
                }
                out.push_back(spine(cur->kids[qi], neg, chain, kinds));
                bool conj = (cur->kind == NodeKind::And) != neg;
                return conj ? mk_and(std::move(out)) : mk_or(std::move(out));
            }
            default:
                break;
        }
        NodePtr r = elim(cur);
        return neg ? mk_not(r) : r;
    }

    static bool is_qf(const NodePtr& n) {
        if (n->kind == NodeKind::Exists || n->kind == NodeKind::Forall) return false;
        for (auto& k : n->kids)
            if (!is_qf(k)) return false;
        return true;
    }

    static void node_vars(const NodePtr& n, std::set<int>& out) {
        if (n->kind == NodeKind::Atom)
            for (int v : n->poly.used_vars()) out.insert(v);
        for (auto& k : n->kids) node_vars(k, out);
    }

    // Substitution of a block variable pinned by a linear equation with
    // rational coefficient: exists v (a*v + t = 0 and rest) -> rest[v := -t/a].
    bool try_linear_subst(std::vector<int>& block, NodePtr& body) {
        if (body->kind != NodeKind::And) return false;
        for (std::size_t i = 0; i < body->kids.size(); i++) {
            const NodePtr& a = body->kids[i];
            if (a->kind != NodeKind::Atom || a->op != RelOp::Eq) continue;
            for (std::size_t bi = 0; bi < block.size(); bi++) {
                int v = block[bi];
                if (a->poly.degree(v) != 1) continue;
                Polynomial coeff = a->poly.coeff(v, 1);
                if (!coeff.is_constant()) continue;
                Polynomial rest = a->poly - coeff * Polynomial::variable(nvars, v);
                if (rest.degree(v) > 0) continue;
                // v = -rest / coeff
                Polynomial value = rest * (Rational(-1) / coeff.constant_value());
                std::vector<NodePtr> kids;
                for (std::size_t j = 0; j < body->kids.size(); j++) {
                    if (j == i) continue;
                    kids.push_back(subst_var(body->kids[j], v, value));
                }
                body = simplify_node(mk_and(std::move(kids)), nvars);
                block.erase(block.begin() + bi);
                return true;
            }
        }
        return false;
    }

    NodePtr subst_var(const NodePtr& n, int v, const Polynomial& value) {
        if (n->kind == NodeKind::Atom)
            return mk_atom(n->poly.subst(v, value), n->op);
        if (n->kids.empty()) return n;
        auto m = std::make_shared<Node>(*n);
        m->kids.clear();
        for (auto& k : n->kids) m->kids.push_back(subst_var(k, v, value));
        return m;
    }

    // Entry point for a maximal quantifier chain (outermost first). A chain
    // of one kind goes through exists_block (negated twice for forall) to get
    // its simplifications; a genuinely alternating chain is solved whole.
    NodePtr prefix_block(std::vector<int> chain, std::vector<bool> kinds, NodePtr body) {
        body = simplify_node(body, nvars);
        if (body->kind == NodeKind::True || body->kind == NodeKind::False) return body;
        // drop unused chain variables
        std::set<int> used;
        node_vars(body, used);
        for (std::size_t i = chain.size(); i-- > 0;) {
            if (!used.count(chain[i])) {
                chain.erase(chain.begin() + (long)i);
                kinds.erase(kinds.begin() + (long)i);
            }
        }
        if (chain.empty()) return body;
        bool mixed = false;
        for (bool b : kinds)
            if (b != kinds[0]) mixed = true;
        if (!mixed) {
            if (kinds[0])
                return simplify_node(
                    mk_not(exists_block(chain, simplify_node(mk_not(body), nvars))),
                    nvars);
            return exists_block(chain, body);
        }
        return solve_block(chain, kinds, body);
    }

    NodePtr exists_block(std::vector<int> block, NodePtr body) {
        body = simplify_node(body, nvars);
        if (body->kind == NodeKind::True || body->kind == NodeKind::False) return body;
        // drop unused block variables
        std::set<int> used;
        node_vars(body, used);
        block.erase(std::remove_if(block.begin(), block.end(),
                                   [&](int v) { return !used.count(v); }),
                    block.end());
        if (block.empty()) return body;
        while (try_linear_subst(block, body)) {
            if (block.empty() || body->kind == NodeKind::True ||
                body->kind == NodeKind::False)
                return body;
        }
        // distribute over disjunction
        if (body->kind == NodeKind::Or) {
            std::vector<NodePtr> kids;
            for (auto& k : body->kids) kids.push_back(exists_block(block, k));
            return simplify_node(mk_or(std::move(kids)), nvars);
        }
        return solve_block(block, std::vector<bool>(block.size(), false), body);
    }

    NodePtr solve_block(const std::vector<int>& block, const std::vector<bool>& kinds,
                        const NodePtr& body) {
        // Memoize on a canonical form: compress the variables that actually
        // occur (free ones first in index order, block ones after) so that
        // structurally identical sub-problems share one elimination no matter
        // which concrete variable indices they use. Cache hits remap the
        // stored result back onto the caller's free variables.
        std::set<int> occurring;
        node_vars(body, occurring);
        std::vector<int> freevs;
        for (int v : occurring)
            if (std::find(block.begin(), block.end(), v) == block.end())
                freevs.push_back(v);
        int nfree = (int)freevs.size();
        int ncanon = nfree + (int)block.size();
        std::vector<int> fwd(nvars, 0);
        for (int i = 0; i < nfree; i++) fwd[freevs[i]] = i;
        for (std::size_t i = 0; i < block.size(); i++)
            fwd[block[i]] = nfree + (int)i;
        NodePtr canon_body = remap_node(body, ncanon, fwd);
        std::vector<int> canon_block;
        for (std::size_t i = 0; i < block.size(); i++)
            canon_block.push_back(nfree + (int)i);

        std::vector<std::string> canon_names;
        for (int i = 0; i < ncanon; i++) canon_names.push_back("u" + std::to_string(i));
        Formula tmp;
        tmp.vars = canon_names;
        tmp.root = canon_body;
        std::string key = std::to_string(nfree) + "#";
        for (bool b : kinds) key += b ? 'A' : 'E';
        key += "#" + tmp.to_string();

        std::vector<int> back(ncanon, 0);
        for (int i = 0; i < nfree; i++) back[i] = freevs[i];
        auto it = memo.find(key);
        if (it != memo.end()) return remap_node(it->second, nvars, back);

        static const bool trace = std::getenv("QE_TRACE") != nullptr;
        double t0 = 0;
        if (trace) {
            std::set<Polynomial> ps;
            collect_polys_dbg(canon_body, ps);
            fprintf(stderr, "[qe] block=%zu free=%d polys=%zu ...", block.size(),
                    nfree, ps.size());
            if (std::getenv("QE_TRACE2"))
                fprintf(stderr, "\n  %s\n", tmp.to_string().c_str());
            fflush(stderr);
            t0 = (double)clock() / CLOCKS_PER_SEC;
        }
        // solve in the canonical space so the cached value is reusable
        int saved_nvars = nvars;
        std::vector<std::string>* saved_vars = vars;
        nvars = ncanon;
        vars = &canon_names;
        NodePtr canon_result;
        try {
            canon_result = qe_block(canon_block, kinds, canon_body);
        } catch (...) {
            nvars = saved_nvars;
            vars = saved_vars;
            throw;
        }
        nvars = saved_nvars;
        vars = saved_vars;
        if (trace) {
            std::set<Polynomial> ps;
            collect_polys_dbg(canon_result, ps);
            fprintf(stderr, " done %.2fs out_polys=%zu\n",
                    (double)clock() / CLOCKS_PER_SEC - t0, ps.size());
        }
        memo.emplace(std::move(key), canon_result);
        return remap_node(canon_result, nvars, back);
    }

    static void collect_polys_dbg(const NodePtr& n, std::set<Polynomial>& out) {
        if (n->kind == NodeKind::Atom) out.insert(n->poly);
        for (auto& k : n->kids) collect_polys_dbg(k, out);
    }

    static NodePtr remap_node(const NodePtr& n, int new_nvars,
                              const std::vector<int>& idx) {
        if (n->kind == NodeKind::Atom)
            return mk_atom(n->poly.remap(new_nvars, idx), n->op);
        if (n->kids.empty()) return n;
        auto m = std::make_shared<Node>(*n);
        m->kids.clear();
        for (auto& k : n->kids) m->kids.push_back(remap_node(k, new_nvars, idx));
        return m;
    }

    NodePtr qe_block(const std::vector<int>& block, const std::vector<bool>& kinds,
                     const NodePtr& body) {
        std::set<int> used;
        node_vars(body, used);
        std::vector<int> free;
        for (int v : used)
            if (std::find(block.begin(), block.end(), v) == block.end())
                free.push_back(v);
        // CAD cost is extremely sensitive to the order of the free levels.
        // With few free variables, project under every permutation and keep
        // the order with the smallest estimated lifting cost; otherwise fall
        // back to a degree heuristic (cheapest variables eliminated first,
        // i.e. placed last, so their resultants grow the projection least).
        if (free.size() >= 2 && free.size() <= 4) {
            std::vector<int> perm = free, best = free;
            double best_cost = std::numeric_limits<double>::infinity();
            do {
                std::vector<int> ord = perm;
                ord.insert(ord.end(), block.begin(), block.end());
                try {
                    BlockSolver trial(body, nvars, ord, (int)perm.size(), kinds,
                                      opts, *budget, {}, /*max_projection=*/150);
                    double c = trial.lift_cost();
                    if (c < best_cost) {
                        best_cost = c;
                        best = perm;
                    }
                } catch (const ProjectionAbort&) {
                    // order too explosive; skip it
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            free = best;
        } else if (free.size() > 4) {
            std::set<Polynomial> polys;
            collect_polys_dbg(body, polys);
            auto weight = [&](int v) {
                int maxdeg = 0, maxtot = 0, occ = 0;
                for (const auto& p : polys) {
                    int d = p.degree(v);
                    if (d <= 0) continue;
                    occ++;
                    maxdeg = std::max(maxdeg, d);
                    maxtot = std::max(maxtot, p.total_degree());
                }
                return std::make_tuple(maxdeg, maxtot, occ);
            };
            std::stable_sort(free.begin(), free.end(), [&](int a, int b) {
                return weight(a) > weight(b);
            });
        }
        std::vector<int> order = free;
        order.insert(order.end(), block.begin(), block.end());

        std::vector<Polynomial> extra;
        for (int round = 0;; round++) {
            BlockSolver solver(body, nvars, order, (int)free.size(), kinds, opts,
                               *budget, extra);
            if (free.empty()) return solver.decide_root() ? mk_true() : mk_false();
            BlockRun run = solver.run();
            // signature = signs of all base-level projection polys at samples
            std::vector<const Polynomial*> sig_polys;
            for (int l = 0; l < (int)free.size(); l++)
                for (const auto& p : run.levels[l]) sig_polys.push_back(&p);
            for (auto& cell : run.base) {
                auto pt = padded(cell.sample, (int)order.size());
                for (auto* p : sig_polys) cell.signature.push_back(sign_at(*p, pt));
            }
            // separation check
            bool collision = false;
            std::map<std::vector<int>, bool> truth_by_sig;
            for (auto& cell : run.base) {
                auto f = truth_by_sig.find(cell.signature);
                if (f == truth_by_sig.end())
                    truth_by_sig.emplace(cell.signature, cell.truth);
                else if (f->second != cell.truth) { collision = true; break; }
            }
            if (!collision) {
                // Keep only the signature polynomials needed to tell true
                // cells from false ones (greedy cover of the conflicting
                // pairs); dropping the rest keeps downstream eliminations
                // from drowning in redundant sign conditions.
                std::vector<std::size_t> tc, fc;
                for (std::size_t i = 0; i < run.base.size(); i++)
                    (run.base[i].truth ? tc : fc).push_back(i);
                std::vector<std::pair<std::size_t, std::size_t>> pairs;
                for (auto i : tc)
                    for (auto j : fc) pairs.emplace_back(i, j);
                std::vector<std::size_t> chosen;
                std::vector<bool> taken(sig_polys.size(), false);
                while (!pairs.empty()) {
                    std::size_t best = sig_polys.size();
                    std::size_t best_count = 0;
                    for (std::size_t s = 0; s < sig_polys.size(); s++) {
                        if (taken[s]) continue;
                        std::size_t cnt = 0;
                        for (auto& [i, j] : pairs)
                            if (run.base[i].signature[s] != run.base[j].signature[s])
                                cnt++;
                        if (cnt > best_count) { best_count = cnt; best = s; }
                    }
                    if (best == sig_polys.size())
                        throw std::logic_error("cell separation lost during minimization");
                    taken[best] = true;
                    chosen.push_back(best);
                    pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                                    [&](const std::pair<std::size_t, std::size_t>& pr) {
                                        return run.base[pr.first].signature[best] !=
                                               run.base[pr.second].signature[best];
                                    }),
                                pairs.end());
                }
                std::vector<NodePtr> disjuncts;
                std::set<std::vector<int>> done;
                for (auto& cell : run.base) {
                    if (!cell.truth) continue;
                    std::vector<int> restricted;
                    for (auto s : chosen) restricted.push_back(cell.signature[s]);
                    if (!done.insert(restricted).second) continue;
                    std::vector<NodePtr> conj;
                    for (auto si : chosen) {
                        std::vector<int> back(order.size());
                        for (std::size_t i = 0; i < order.size(); i++) back[i] = order[i];
                        Polynomial p = sig_polys[si]->remap(nvars, back);
                        RelOp op = cell.signature[si] < 0   ? RelOp::Lt
                                   : cell.signature[si] > 0 ? RelOp::Gt
                                                            : RelOp::Eq;
                        conj.push_back(mk_atom(std::move(p), op));
                    }
                    disjuncts.push_back(mk_and(std::move(conj)));
                }
                return simplify_node(mk_or(std::move(disjuncts)), nvars);
            }
            if (round >= 2)
                throw BudgetError(BudgetError::Kind::Cells,
                                  "solution formula construction failed to separate cells");
            // augment with derivatives to refine the base decomposition
            std::set<Polynomial> aug;
            std::vector<int> back(order.size());
            for (std::size_t i = 0; i < order.size(); i++) back[i] = order[i];
            for (int l = 0; l < (int)free.size(); l++) {
                for (const auto& p : run.levels[l]) {
                    Polynomial d = p.derivative(l);
                    if (!d.is_zero() && !d.is_constant())
                        aug.insert(d.remap(nvars, back));
                }
            }
            for (auto& p : aug) extra.push_back(p);
        }
    }
};


} // namespace

// ------------------------------------------------------------- public API

Cad cad_build(const std::vector<Polynomial>& polys, int nvars, const QeOptions& opts) {
    auto budget = opts.make_budget();
    std::vector<int> order = opts.var_order;
    if (order.empty()) {
        order.resize(nvars);
        for (int i = 0; i < nvars; i++) order[i] = i;
    }
    if ((int)order.size() != nvars)
        throw std::invalid_argument("variable order must cover all variables");
    std::vector<Polynomial> input;
    for (const auto& p : polys) {
        std::vector<int> idx(nvars, 0);
        for (int i = 0; i < nvars; i++) idx[order[i]] = i;
        input.push_back(p.remap(nvars, idx));
    }
    Cad cad;
    cad.nvars = nvars;
    cad.order = order;
    cad.levels = project_all(input, nvars, *budget);

    // enumerate all leaf cells
    struct Walker {
        Cad& cad;
        Budget& budget;
        void rec(int level, std::vector<AlgebraicNumber>& prefix, std::vector<int>& index,
                 int dim) {
            if (level == cad.nvars) {
                budget.charge_cells();
                CadCell c;
                c.index = index;
                c.sample = prefix;
                c.dimension = dim;
                cad.cells.push_back(std::move(c));
                return;
            }
            auto stack = build_stack(cad.levels[level], level, cad.nvars, prefix, budget);
            for (std::size_t i = 0; i < stack.size(); i++) {
                prefix.push_back(stack[i].coord);
                index.push_back((int)i + 1);
                rec(level + 1, prefix, index, dim + (stack[i].section ? 0 : 1));
                index.pop_back();
                prefix.pop_back();
            }
        }
    } w{cad, *budget};
    std::vector<AlgebraicNumber> prefix;
    std::vector<int> index;
    w.rec(0, prefix, index, 0);
    return cad;
}

Formula eliminate(const Formula& phi, const QeOptions& opts) {
    if (!phi.relation_names().empty())
        throw std::invalid_argument("uninstantiated relation");
    Formula f = simplify(normalize_bound(phi));
    Eliminator e;
    e.vars = &f.vars;
    e.nvars = f.nvars();
    e.opts = opts;
    e.budget = opts.make_budget();
    Formula out;
    out.vars = f.vars;
    out.root = e.elim(f.root);
    return simplify(out);
}

bool decide(const Formula& sentence, const QeOptions& opts) {
    if (!sentence.free_vars().empty())
        throw std::invalid_argument("sentence has free variables");
    Formula qf = eliminate(sentence, opts);
    NodePtr r = simplify_node(qf.root, qf.nvars());
    if (r->kind == NodeKind::True) return true;
    if (r->kind == NodeKind::False) return false;
    throw std::logic_error("decide: residual non-ground formula");
}

std::optional<std::vector<AlgebraicNumber>> sample_point(const Formula& phi,
                                                         const QeOptions& opts) {
    Formula qf = eliminate(phi, opts);
    auto free = qf.free_vars();
    if (free.empty()) {
        if (decide(qf, opts)) return std::vector<AlgebraicNumber>{};
        return std::nullopt;
    }
    std::vector<int> order(free.begin(), free.end());
    auto budget = opts.make_budget();
    BlockSolver solver(qf.root, qf.nvars(), order, (int)order.size(), {}, opts,
                       *budget, {});
    BlockRun run = solver.run();
    for (auto& cell : run.base) {
        if (!cell.truth) continue;
        // order maps CAD slot -> formula variable; produce values per free var
        int maxv = order.empty() ? 0 : *std::max_element(order.begin(), order.end());
        std::vector<AlgebraicNumber> pt(maxv + 1, AlgebraicNumber::from_rational(0));
        for (std::size_t i = 0; i < order.size(); i++) pt[order[i]] = cell.sample[i];
        return pt;
    }
    return std::nullopt;
}

std::vector<AlgebraicNumber> roots_at(const Polynomial& p, int var,
                                      const std::vector<AlgebraicNumber>& point,
                                      const QeOptions& opts) {
    if ((int)point.size() < var)
        throw std::invalid_argument("roots_at: point does not cover the lower variables");
    for (int v : p.used_vars())
        if (v > var)
            throw std::invalid_argument("roots_at: variable above the root variable");
    auto budget = opts.make_budget();
    int total = std::max(var + 1, p.nvars());
    std::vector<AlgebraicNumber> prefix(point.begin(), point.begin() + var);
    auto r = roots_over(p.extended(total), var, total, prefix, *budget);
    if (!r)
        throw std::domain_error("roots_at: polynomial vanishes identically at the point");
    return *r;
}

bool evaluate_at(const Formula& phi, const std::vector<AlgebraicNumber>& point) {
    if (!phi.quantifier_free())
        throw std::invalid_argument("evaluate_at requires a quantifier-free formula");
    std::function<bool(const NodePtr&)> rec = [&](const NodePtr& n) -> bool {
        switch (n->kind) {
            case NodeKind::True: return true;
            case NodeKind::False: return false;
            case NodeKind::Atom: {
                std::vector<AlgebraicNumber> pt = point;
                pt.resize(n->poly.nvars(), AlgebraicNumber::from_rational(0));
                for (int v : n->poly.used_vars())
                    if (v >= (int)point.size())
                        throw std::invalid_argument("point does not cover free variables");
                return eval_op(sign_at(n->poly, pt), n->op);
            }
            case NodeKind::RelAtom:
                throw std::invalid_argument("uninstantiated relation");
            case NodeKind::Not: return !rec(n->kids[0]);
            case NodeKind::And:
                for (auto& k : n->kids)
                    if (!rec(k)) return false;
                return true;
            case NodeKind::Or:
                for (auto& k : n->kids)
                    if (rec(k)) return true;
                return false;
            case NodeKind::Implies: return !rec(n->kids[0]) || rec(n->kids[1]);
            default: return false;
        }
    };
    return rec(phi.root);
}

bool evaluate_at(const Formula& phi, const std::vector<Rational>& point) {
    std::vector<AlgebraicNumber> pt;
    pt.reserve(point.size());
    for (auto& q : point) pt.push_back(AlgebraicNumber::from_rational(q));
    return evaluate_at(phi, pt);
}

std::vector<AlgebraicNumber> finite_solution_set(const Formula& phi, int free_var,
                                                 const QeOptions& opts) {
    Formula qf = eliminate(phi, opts);
    auto free = qf.free_vars();
    for (int v : free)
        if (v != free_var)
            throw std::invalid_argument("formula has extra free variables");
    if (free.empty()) {
        if (decide(qf, opts))
            throw std::domain_error("solution set is all of R");
        return {};
    }
    auto budget = opts.make_budget();
    std::vector<int> order{free_var};
    BlockSolver solver(qf.root, qf.nvars(), order, 1, {}, opts, *budget, {});
    BlockRun run = solver.run();
    std::vector<AlgebraicNumber> out;
    for (auto& cell : run.base) {
        if (!cell.truth) continue;
        if (cell.dimension != 0)
            throw std::domain_error("solution set is not finite");
        out.push_back(cell.sample[0]);
    }
    return out;
}

} // namespace cono
