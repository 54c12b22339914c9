#include "conoscope/strata.hpp"

#include "json.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cono {

namespace {

std::vector<std::string> ambient_names(int n) {
    std::vector<std::string> v;
    for (int i = 0; i < n; i++) v.push_back("x" + std::to_string(i + 1));
    return v;
}

Formula over_ambient(NodePtr root, int n) {
    Formula f;
    f.vars = ambient_names(n);
    f.root = std::move(root);
    return f;
}

// Quantifier-free formula over exactly the n ambient variables.
Formula qf_over(const Formula& f, int n, const QeOptions& opts) {
    Formula g = f;
    if (!g.quantifier_free()) g = eliminate(g, opts);
    std::vector<int> idx(g.vars.size(), -1);
    for (int v = 0; v < (int)g.vars.size() && v < n; v++) idx[v] = v;
    return over_ambient(remap_vars(g.root, n, idx), n);
}

bool closed_node(const NodePtr& n) {
    switch (n->kind) {
    case NodeKind::True:
    case NodeKind::False:
        return true;
    case NodeKind::Atom:
        return n->op == RelOp::Eq || n->op == RelOp::Le || n->op == RelOp::Ge;
    case NodeKind::And:
    case NodeKind::Or:
        for (auto& k : n->kids)
            if (!closed_node(k)) return false;
        return true;
    default:
        return false;
    }
}

// Negation normal form for quantifier-free nodes: negations are pushed onto
// the atoms so that only and/or remain as connectives.
NodePtr nnf_node(const NodePtr& n, bool neg, int nvars) {
    switch (n->kind) {
    case NodeKind::True:
        return neg ? mk_false() : mk_true();
    case NodeKind::False:
        return neg ? mk_true() : mk_false();
    case NodeKind::Atom:
        return neg ? simplify_node(mk_not(mk_atom(n->poly, n->op)), nvars)
                   : mk_atom(n->poly, n->op);
    case NodeKind::Not:
        return nnf_node(n->kids[0], !neg, nvars);
    case NodeKind::And:
    case NodeKind::Or: {
        std::vector<NodePtr> kids;
        for (auto& k : n->kids) kids.push_back(nnf_node(k, neg, nvars));
        bool as_and = (n->kind == NodeKind::And) != neg;
        return as_and ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    case NodeKind::Implies: {
        NodePtr a = nnf_node(n->kids[0], !neg, nvars);
        NodePtr b = nnf_node(n->kids[1], neg, nvars);
        return neg ? mk_and({a, b}) : mk_or({a, b});
    }
    default:
        throw std::logic_error("nnf_node: quantifier in a quantifier-free formula");
    }
}

// Weakens every atom to its closed counterpart; sound over and/or only.
NodePtr relax_node(const NodePtr& n) {
    switch (n->kind) {
    case NodeKind::True:
        return mk_true();
    case NodeKind::False:
        return mk_false();
    case NodeKind::Atom:
        if (n->op == RelOp::Lt) return mk_atom(n->poly, RelOp::Le);
        if (n->op == RelOp::Gt) return mk_atom(n->poly, RelOp::Ge);
        if (n->op == RelOp::Ne) return mk_true();
        return mk_atom(n->poly, n->op);
    case NodeKind::And:
    case NodeKind::Or: {
        std::vector<NodePtr> kids;
        for (auto& k : n->kids) kids.push_back(relax_node(k));
        return n->kind == NodeKind::And ? mk_and(std::move(kids))
                                        : mk_or(std::move(kids));
    }
    default:
        throw std::logic_error("relax_node: formula not in negation normal form");
    }
}

// Squared distance between variable blocks starting at a0 and b0.
Polynomial sq_dist(int nvars, int a0, int b0, int n) {
    Polynomial d(nvars);
    for (int i = 0; i < n; i++) {
        Polynomial t = Polynomial::variable(nvars, a0 + i) -
                       Polynomial::variable(nvars, b0 + i);
        d = d + t * t;
    }
    return d;
}

void collect_polys(const NodePtr& n, std::vector<Polynomial>& out) {
    if (n->kind == NodeKind::Atom) {
        Polynomial p = squarefree_part(n->poly).normalized();
        if (p.is_constant()) return;
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        return;
    }
    for (auto& k : n->kids) collect_polys(k, out);
}


// ----------------------------------------------------------------------
// Cell-based verification that a closed candidate set R contains no point
// outside cl(A). R and A share their atom polynomials, so R - A is a union
// of cells of a CAD adapted to those polynomials, and each such cell can be
// checked against cl(A) exactly:
//   * a full-dimensional cell is open and disjoint from A, hence never in
//     cl(A);
//   * a section over an open base interval touches cl(A) iff one of the two
//     neighbouring sectors of its own stack lies in A (sections over the
//     same interval are disjoint graphs, and nearby points keep their base
//     coordinate inside the open interval);
//   * a cell on the line x = a (over a point of the base) lies in cl(A) iff
//     it is covered by the closures of the A-cells of the same fiber and of
//     the two adjacent interval stacks; those closures meet the fiber in
//     closed intervals whose endpoints are one-sided limits of the stack
//     sections as x -> a.
// The limits are classified exactly: all finite limits are stack roots over
// a, rational separators between those roots carve the line into windows,
// and a branch's window at a sample abscissa x_m equals its limit class once
// x_m is past every crossing of a separator line (the crossings are the real
// roots of p(x, w), so "past every crossing" is a certified choice).

// Raised when a limit classification cannot be certified; the caller falls
// back to epsilon-delta quantifier elimination.
struct VerifyBail {};

// A rational strictly between lo and hi (requires lo < hi).
Rational rational_between(AlgebraicNumber lo, AlgebraicNumber hi) {
    while (!(lo.interval().hi < hi.interval().lo)) {
        lo.refine();
        hi.refine();
    }
    return (lo.interval().hi + hi.interval().lo) / 2;
}

// Rationals w_0 < z_0 < w_1 < ... < z_{t-1} < w_t separating the fiber roots
// (a single separator when there are no roots).
std::vector<Rational> fiber_separators(const std::vector<AlgebraicNumber>& z) {
    std::vector<Rational> ws;
    if (z.empty()) {
        ws.push_back(Rational(0));
        return ws;
    }
    ws.push_back(z.front().interval().lo - 1);
    for (std::size_t i = 0; i + 1 < z.size(); i++)
        ws.push_back(rational_between(z[i], z[i + 1]));
    ws.push_back(z.back().interval().hi + 1);
    return ws;
}

// One-sided limits, as x -> a from the side the stack lies on, of the
// sections of the interval stack `ist` (global cell ids into cad.cells).
// Returned per stack position; sections get a code: fiber root index in
// [0, t), -1 for -infinity, t for +infinity. `far_end` is the other endpoint
// of the base interval, if finite.
std::vector<int> branch_limits(const Cad& cad, const std::vector<int>& ist,
                               bool from_left, const AlgebraicNumber& a,
                               const std::optional<AlgebraicNumber>& far_end,
                               const std::vector<Rational>& ws, int t) {
    const int kUnset = -2;
    std::vector<int> lim(ist.size(), kUnset);
    for (const Polynomial& p0 : cad.levels[1]) {
        std::vector<int> secs;  // stack positions of the branches of p0
        bool needed = false;
        for (std::size_t q = 1; q < ist.size(); q += 2) {
            if (sign_at(p0, cad.cells[ist[q]].sample) == 0) {
                secs.push_back((int)q);
                if (lim[q] == kUnset) needed = true;
            }
        }
        if (secs.empty() || !needed) continue;
        Polynomial pp = primitive_part(p0, 1);  // pp(a, .) cannot vanish identically

        // certified abscissa: past the last crossing of a separator line
        std::optional<AlgebraicNumber> bound = far_end;
        for (const Rational& w : ws) {
            Polynomial q1 = pp.subst(1, w);
            if (q1.is_zero()) throw VerifyBail{};
            Polynomial uni = q1.remap(1, std::vector<int>{0, 0});
            if (uni.is_constant()) continue;
            for (auto& r : isolate_real_roots(uni)) {
                int c = compare(r, a);
                if (from_left ? c < 0 : c > 0) {
                    if (!bound || (from_left ? compare(*bound, r) < 0
                                             : compare(*bound, r) > 0))
                        bound = r;
                }
            }
        }
        Rational xm;
        if (bound)
            xm = from_left ? rational_between(*bound, a)
                           : rational_between(a, *bound);
        else
            xm = from_left ? Rational(a.interval().lo - 1)
                           : Rational(a.interval().hi + 1);

        // window membership at xm = limit class (no separator crossings left)
        Polynomial ux = pp.subst(0, xm).remap(1, std::vector<int>{0, 0});
        if (ux.is_zero()) throw VerifyBail{};
        std::vector<AlgebraicNumber> roots;
        if (!ux.is_constant()) roots = isolate_real_roots(ux);
        if (roots.size() != secs.size()) throw VerifyBail{};
        for (std::size_t i = 0; i < roots.size(); i++) {
            int code;
            if (compare(roots[i], ws.front()) < 0)
                code = -1;
            else if (compare(roots[i], ws.back()) > 0)
                code = t;
            else {
                code = kUnset;
                for (int j = 0; j + 1 < (int)ws.size(); j++) {
                    if (compare(roots[i], ws[j]) > 0 &&
                        compare(roots[i], ws[j + 1]) < 0) {
                        code = j;
                        break;
                    }
                }
                if (code == kUnset) throw VerifyBail{};  // on a separator line
            }
            if (lim[secs[i]] == kUnset) lim[secs[i]] = code;
        }
    }
    for (std::size_t q = 1; q < ist.size(); q += 2)
        if (lim[q] == kUnset) throw VerifyBail{};
    return lim;
}

// Verifies that the closed candidate `cand` is contained in cl(A), where A
// is described by the quantifier-free formula F over n <= 2 variables and
// cand weakens the atoms of F. Returns false when some candidate cell
// provably escapes the closure; throws VerifyBail when a limit
// classification cannot be certified.
bool closure_subset_check(const Formula& F, const Formula& cand, int n,
                          const QeOptions& opts) {
    std::vector<Polynomial> P;
    collect_polys(F.root, P);
    if (P.empty()) return false;  // degenerate; let the caller fall back

    Cad cad = cad_build(P, n, opts);
    int N = (int)cad.cells.size();
    std::vector<bool> a_in(N), r_in(N);
    for (int i = 0; i < N; i++) {
        a_in[i] = evaluate_at(F, cad.cells[i].sample);
        r_in[i] = evaluate_at(cand, cad.cells[i].sample);
    }

    if (n == 1) {
        for (int i = 0; i < N; i++) {
            if (!r_in[i] || a_in[i]) continue;
            if (cad.cells[i].dimension == 1) return false;
            if (!((i > 0 && a_in[i - 1]) || (i + 1 < N && a_in[i + 1])))
                return false;
        }
        return true;
    }

    // n == 2: cells grouped into stacks by base position (cells come ordered
    // lexicographically by index, so each stack is ordered bottom-up)
    std::vector<std::vector<int>> stacks;
    for (int i = 0; i < N; i++) {
        int b = cad.cells[i].index[0];
        if ((int)stacks.size() < b) stacks.resize(b);
        stacks[b - 1].push_back(i);
    }
    int B = (int)stacks.size();

    for (int bs = 0; bs < B; bs++) {
        const std::vector<int>& st = stacks[bs];
        if (bs % 2 == 0) {
            // stack over an open base interval
            for (std::size_t j = 0; j < st.size(); j++) {
                int ci = st[j];
                if (!r_in[ci] || a_in[ci]) continue;
                if (cad.cells[ci].dimension == 2) return false;
                bool ok = (j > 0 && a_in[st[j - 1]]) ||
                          (j + 1 < st.size() && a_in[st[j + 1]]);
                if (!ok) return false;
            }
            continue;
        }

        // stack over a base point a
        bool need = false;
        for (int ci : st)
            if (r_in[ci] && !a_in[ci]) need = true;
        if (!need) continue;

        AlgebraicNumber a = cad.cells[st[0]].sample[0];
        std::vector<AlgebraicNumber> zs;  // stack roots over a, ascending
        for (std::size_t q = 1; q < st.size(); q += 2)
            zs.push_back(cad.cells[st[q]].sample[1]);

        // master list of possible finite branch limits: the stack roots plus
        // the fiber roots of the primitive part of every input polynomial
        // that vanishes identically on the fiber (such a polynomial adds no
        // stack sections, but its branches still have finite limits)
        std::vector<AlgebraicNumber> master = zs;
        std::vector<AlgebraicNumber> apt{a, AlgebraicNumber::from_rational(0)};
        for (const Polynomial& p0 : cad.levels[1]) {
            if (sign_at(content(p0, 1), apt) != 0) continue;
            for (auto& r : roots_at(primitive_part(p0, 1), 1, apt, opts))
                master.push_back(r);
        }
        auto lt = [](const AlgebraicNumber& u, const AlgebraicNumber& v) {
            return compare(u, v) < 0;
        };
        std::sort(master.begin(), master.end(), lt);
        master.erase(std::unique(master.begin(), master.end(),
                                 [](const AlgebraicNumber& u, const AlgebraicNumber& v) {
                                     return compare(u, v) == 0;
                                 }),
                     master.end());
        int T = (int)master.size();
        std::vector<Rational> ws = fiber_separators(master);
        // position of each stack root inside the master list
        std::vector<int> at(zs.size());
        for (std::size_t k = 0, m = 0; k < zs.size(); k++) {
            while (compare(master[m], zs[k]) != 0) m++;
            at[k] = (int)m;
        }
        int ts = (int)zs.size();
        auto lo_code = [&](int s) { return s < 0 ? -1 : at[s]; };
        auto hi_code = [&](int s) { return s >= ts ? T : at[s]; };

        // closed vertical intervals known to lie in cl(A), endpoint-coded
        // into the master list: -1 = -infinity, T = +infinity
        std::vector<std::pair<int, int>> cover;
        for (std::size_t q = 0; q < st.size(); q++) {
            if (!a_in[st[q]]) continue;
            if (q % 2 == 1)
                cover.push_back({at[(q - 1) / 2], at[(q - 1) / 2]});
            else
                cover.push_back({lo_code((int)q / 2 - 1), hi_code((int)q / 2)});
        }
        for (int side : {-1, +1}) {
            const std::vector<int>& ist = stacks[bs + side];
            bool any_a = false;
            for (int ci : ist)
                if (a_in[ci]) any_a = true;
            if (!any_a) continue;
            std::optional<AlgebraicNumber> far_end;
            int far = bs + 2 * side;
            if (far >= 0 && far < B)
                far_end = cad.cells[stacks[far][0]].sample[0];
            std::vector<int> lim =
                branch_limits(cad, ist, side < 0, a, far_end, ws, T);
            std::size_t last = ist.size() - 1;
            for (std::size_t q = 0; q < ist.size(); q++) {
                if (!a_in[ist[q]]) continue;
                if (q % 2 == 1) {
                    int c = lim[q];
                    if (c >= 0 && c < T) cover.push_back({c, c});
                } else {
                    int lo = q == 0 ? -1 : lim[q - 1];
                    int hi = q == last ? T : lim[q + 1];
                    if (lo > hi) continue;
                    if (lo == hi && (lo == -1 || lo == T)) continue;
                    cover.push_back({lo, hi});
                }
            }
        }

        // merge: closed coded intervals touching at a point already form a
        // connected union, so maximal merged intervals are exact
        std::sort(cover.begin(), cover.end());
        std::vector<std::pair<int, int>> merged;
        for (auto& iv : cover) {
            if (!merged.empty() && iv.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }

        // every candidate cell of the fiber must be covered; a merged
        // interval covers a coded gap only by spanning it
        for (std::size_t q = 0; q < st.size(); q++) {
            int ci = st[q];
            if (!r_in[ci] || a_in[ci]) continue;
            bool ok = false;
            if (q % 2 == 1) {
                int r = at[(q - 1) / 2];
                for (auto& [lo, hi] : merged)
                    if (lo <= r && r <= hi) { ok = true; break; }
            } else {
                int L = lo_code((int)q / 2 - 1);
                int R = hi_code((int)q / 2);
                for (auto& [lo, hi] : merged)
                    if (lo <= L && hi >= R) { ok = true; break; }
            }
            if (!ok) return false;
        }
    }
    return true;
}

// Determinant by cofactor expansion (matrices here stay tiny: k <= n <= 3).
Polynomial small_det(const std::vector<std::vector<Polynomial>>& M, int nvars) {
    int k = (int)M.size();
    if (k == 0) return Polynomial::constant(nvars, 1);
    if (k == 1) return M[0][0];
    Polynomial det(nvars);
    for (int j = 0; j < k; j++) {
        if (M[0][j].is_zero()) continue;
        std::vector<std::vector<Polynomial>> sub;
        for (int i = 1; i < k; i++) {
            std::vector<Polynomial> row;
            for (int c = 0; c < k; c++)
                if (c != j) row.push_back(M[i][c]);
            sub.push_back(std::move(row));
        }
        Polynomial cof = M[0][j] * small_det(sub, nvars);
        det = (j % 2 == 0) ? det + cof : det - cof;
    }
    return det;
}

void combos(int total, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out,
            int start) {
    if ((int)cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i <= total - (k - (int)cur.size()); i++) {
        cur.push_back(i);
        combos(total, k, cur, out, i + 1);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> choose(int total, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    if (k <= total && k >= 0) combos(total, k, cur, out, 0);
    return out;
}

std::optional<std::vector<AlgebraicNumber>> find_sample(const Formula& memb, int n,
                                                        const QeOptions& opts) {
    auto pt = sample_point(memb, opts);
    if (!pt) return std::nullopt;
    while ((int)pt->size() < n) pt->push_back(AlgebraicNumber::from_rational(0));
    pt->resize(n, AlgebraicNumber::from_rational(0));
    return pt;
}

struct Builder {
    int n;
    QeOptions opts;
    std::vector<Stratum> out;

    void emit(std::vector<Polynomial> E, int rank, NodePtr side, StratumFlag flag,
              std::vector<std::vector<AlgebraicNumber>> samples) {
        Stratum s;
        s.n = n;
        s.equations = std::move(E);
        s.rank = rank;
        s.side = over_ambient(simplify_node(std::move(side), n), n);
        s.flag = flag;
        s.samples = std::move(samples);
        if (s.samples.size() > 6) s.samples.resize(6);
        out.push_back(std::move(s));
    }

    void split(std::vector<Polynomial> E, const NodePtr& cond, StratumFlag flag,
               std::vector<std::vector<AlgebraicNumber>> samples, int depth) {
        if (depth > n + 5)
            throw std::logic_error("stratification: singular-locus recursion did not terminate");
        // canonicalize the equation set
        std::vector<Polynomial> eqs;
        for (auto& p : E) {
            Polynomial q = squarefree_part(p).normalized();
            if (q.is_zero()) continue;
            if (q.is_constant()) return;  // inconsistent system: empty set
            if (std::find(eqs.begin(), eqs.end(), q) == eqs.end())
                eqs.push_back(std::move(q));
        }
        std::sort(eqs.begin(), eqs.end());
        if (eqs.empty()) {
            if (samples.empty()) {
                auto pt = find_sample(over_ambient(cond, n), n, opts);
                if (!pt) return;
                samples.push_back(*pt);
            }
            emit({}, 0, cond, flag, std::move(samples));
            return;
        }

        auto J = jacobian(eqs, n);
        int m = std::min((int)eqs.size(), n);
        // largest r with a not-identically-zero r-minor
        std::vector<Polynomial> mr;
        int r = m;
        for (; r >= 1; r--) {
            mr.clear();
            for (auto& p : matrix_minors(J, r))
                if (!p.is_zero()) mr.push_back(squarefree_part(p).normalized());
            if (!mr.empty()) break;
        }
        if (r == 0)
            throw std::logic_error("stratification: zero Jacobian for a nonconstant system");
        std::sort(mr.begin(), mr.end());
        mr.erase(std::unique(mr.begin(), mr.end()), mr.end());

        // split the carried samples by Jacobian rank
        std::vector<std::vector<AlgebraicNumber>> regular, deficient;
        for (auto& s : samples) {
            bool full = false;
            for (auto& p : mr)
                if (sign_at(p, s) != 0) {
                    full = true;
                    break;
                }
            (full ? regular : deficient).push_back(s);
        }

        std::vector<NodePtr> nz;
        for (auto& p : mr) nz.push_back(mk_atom(p, RelOp::Ne));
        NodePtr side_reg = mk_and({cond, mk_or(std::move(nz))});
        std::vector<NodePtr> memb_kids{side_reg};
        for (auto& p : eqs) memb_kids.push_back(mk_atom(p, RelOp::Eq));
        Formula memb_reg = over_ambient(simplify_node(mk_and(memb_kids), n), n);
        if (regular.empty()) {
            if (auto pt = find_sample(memb_reg, n, opts)) regular.push_back(*pt);
        }
        if (!regular.empty()) emit(eqs, r, side_reg, flag, std::move(regular));

        // rank-deficient locus: all r-minors vanish; recurse with them as equations
        bool impossible = false;
        std::vector<Polynomial> E2 = eqs;
        for (auto& p : mr) {
            if (p.is_constant()) {
                impossible = true;
                break;
            }
            E2.push_back(p);
        }
        if (impossible) return;
        if (deficient.empty()) {
            std::vector<NodePtr> kids{cond};
            for (auto& p : E2) kids.push_back(mk_atom(p, RelOp::Eq));
            Formula memb_def = over_ambient(simplify_node(mk_and(kids), n), n);
            auto pt = find_sample(memb_def, n, opts);
            if (!pt) return;
            deficient.push_back(*pt);
        }
        split(std::move(E2), cond, flag, std::move(deficient), depth + 1);
    }

    void build_for(const Formula& F0, StratumFlag flag) {
        Formula F = simplify(F0);
        if (F.root->kind == NodeKind::False) return;
        std::vector<Polynomial> P;
        collect_polys(F.root, P);
        if (P.empty()) {
            // atom-free truth: the whole space
            emit({}, 0, mk_true(), flag,
                 {std::vector<AlgebraicNumber>(n, AlgebraicNumber::from_rational(0))});
            return;
        }
        Cad cad = cad_build(P, n, opts);
        std::map<std::vector<int>, std::vector<std::vector<AlgebraicNumber>>> groups;
        for (auto& cell : cad.cells) {
            if (!evaluate_at(F, cell.sample)) continue;
            std::vector<int> sig;
            for (auto& p : P) sig.push_back(sign_at(p, cell.sample));
            auto& g = groups[sig];
            if (g.size() < 6) g.push_back(cell.sample);
        }
        for (auto& [sig, samples] : groups) {
            std::vector<Polynomial> E;
            std::vector<NodePtr> side;
            for (std::size_t i = 0; i < P.size(); i++) {
                if (sig[i] == 0)
                    E.push_back(P[i]);
                else
                    side.push_back(mk_atom(P[i], sig[i] > 0 ? RelOp::Gt : RelOp::Lt));
            }
            split(std::move(E), mk_and(std::move(side)), flag, samples, 0);
        }
    }
};

std::string eq_key(const Stratum& s) {
    std::string k = (s.flag == StratumFlag::InSet ? "A|" : "F|");
    k += std::to_string(s.rank);
    auto names = ambient_names(s.n);
    for (auto& e : s.equations) k += "|" + e.to_string(names);
    return k;
}

}  // namespace

Formula Stratum::membership() const {
    std::vector<NodePtr> kids;
    for (auto& e : equations) kids.push_back(mk_atom(e, RelOp::Eq));
    kids.push_back(side.root);
    Formula f;
    f.vars = ambient_names(n);
    f.root = simplify_node(mk_and(std::move(kids)), n);
    return f;
}

std::vector<const Stratum*> Stratification::of_dimension(int k) const {
    std::vector<const Stratum*> v;
    for (auto& s : strata)
        if (s.dimension() == k) v.push_back(&s);
    return v;
}

std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& E, int n) {
    std::vector<std::vector<Polynomial>> J;
    for (auto& e : E) {
        std::vector<Polynomial> row;
        for (int j = 0; j < n; j++) row.push_back(e.extended(n).derivative(j));
        J.push_back(std::move(row));
    }
    return J;
}

std::vector<Polynomial> matrix_minors(const std::vector<std::vector<Polynomial>>& M,
                                      int k) {
    std::vector<Polynomial> out;
    if (M.empty() || k <= 0) return out;
    int rows = (int)M.size(), cols = (int)M[0].size();
    if (k > rows || k > cols) return out;
    int nvars = 0;
    for (auto& row : M)
        for (auto& p : row) nvars = std::max(nvars, p.nvars());
    for (auto& ri : choose(rows, k)) {
        for (auto& cj : choose(cols, k)) {
            std::vector<std::vector<Polynomial>> sub;
            for (int i : ri) {
                std::vector<Polynomial> row;
                for (int j : cj) row.push_back(M[i][j].extended(nvars));
                sub.push_back(std::move(row));
            }
            out.push_back(small_det(sub, nvars));
        }
    }
    return out;
}

SetDescription closure(const SetDescription& A, const QeOptions& opts) {
    int n = A.n;
    Formula F = simplify(qf_over(A.formula, n, opts));
    F = over_ambient(nnf_node(F.root, false, n), n);
    if (closed_node(F.root)) return SetDescription::make(n, F);

    Formula cand = simplify(over_ambient(relax_node(F.root), n));

    // check cand ⊆ cl(A); the reverse holds by construction (relaxation only
    // weakens atoms and yields a closed set). In the plane and on the line
    // the check runs cell by cell on a CAD shared by A and the candidate;
    // beyond that it is a decision problem.
    if (n <= 2) {
        bool verified = false;
        try {
            verified = closure_subset_check(F, cand, n, opts);
        } catch (const VerifyBail&) {
            verified = false;
        }
        if (verified) return SetDescription::make(n, cand);
    }

    int tot = 2 * n + 1;  // x1..xn, eps, y1..yn
    std::vector<std::string> vars = ambient_names(n);
    vars.push_back("eps");
    for (int i = 0; i < n; i++) vars.push_back("y" + std::to_string(i + 1));
    std::vector<int> to_y(n);
    for (int i = 0; i < n; i++) to_y[i] = n + 1 + i;
    NodePtr F_y = remap_vars(F.root, tot, to_y);
    std::vector<int> ext(n);
    for (int i = 0; i < n; i++) ext[i] = i;
    Polynomial eps = Polynomial::variable(tot, n);
    Polynomial d2 = sq_dist(tot, 0, n + 1, n);
    NodePtr near_pt = mk_and({F_y, mk_atom(d2 - eps, RelOp::Lt)});
    for (int i = n - 1; i >= 0; i--) near_pt = mk_quant(false, n + 1 + i, near_pt);
    NodePtr limit = mk_quant(true, n, mk_implies(mk_atom(eps, RelOp::Gt), near_pt));

    if (n > 2) {
        NodePtr cand_ext = remap_vars(cand.root, tot, ext);
        NodePtr check = mk_implies(cand_ext, limit);
        for (int i = n - 1; i >= 0; i--) check = mk_quant(true, i, check);
        Formula sentence;
        sentence.vars = vars;
        sentence.root = check;
        if (decide(sentence, opts)) return SetDescription::make(n, cand);
    }

    // fall back to quantifier elimination of the epsilon-delta closure formula
    Formula clf;
    clf.vars = vars;
    clf.root = limit;
    return SetDescription::make(n, qf_over(eliminate(clf, opts), n, opts));
}

SetDescription frontier(const SetDescription& A, const QeOptions& opts) {
    int n = A.n;
    SetDescription cl = closure(A, opts);
    Formula F = qf_over(A.formula, n, opts);
    Formula fr = simplify(over_ambient(mk_and({cl.formula.root, mk_not(F.root)}), n));
    return SetDescription::make(n, fr);
}

int dimension(const SetDescription& A, const QeOptions& opts) {
    int n = A.n;
    Formula F = simplify(qf_over(A.formula, n, opts));
    if (F.root->kind == NodeKind::False) return -1;
    std::vector<Polynomial> P;
    collect_polys(F.root, P);
    if (P.empty()) return F.root->kind == NodeKind::True ? n : -1;
    Cad cad = cad_build(P, n, opts);
    int best = -1;
    for (auto& cell : cad.cells)
        if (evaluate_at(F, cell.sample)) best = std::max(best, cell.dimension);
    return best;
}

Stratification stratify(const SetDescription& A, const QeOptions& opts) {
    int n = A.n;
    Stratification st;
    st.n = n;
    st.set = SetDescription::make(n, qf_over(A.formula, n, opts));
    st.closure = closure(st.set, opts);
    SetDescription fr = frontier(st.set, opts);

    Builder b{n, opts, {}};
    b.build_for(st.set.formula, StratumFlag::InSet);
    b.build_for(fr.formula, StratumFlag::InFrontier);

    // merge strata that share flag, equations and rank (sign-assignment pieces
    // of the same smooth locus)
    std::map<std::string, Stratum> merged;
    std::vector<std::string> keys;
    for (auto& s : b.out) {
        std::string k = eq_key(s);
        auto it = merged.find(k);
        if (it == merged.end()) {
            merged.emplace(k, std::move(s));
            keys.push_back(k);
        } else {
            Stratum& t = it->second;
            t.side = over_ambient(
                simplify_node(mk_or({t.side.root, s.side.root}), n), n);
            for (auto& smp : s.samples)
                if (t.samples.size() < 6) t.samples.push_back(smp);
        }
    }
    for (auto& k : keys) st.strata.push_back(std::move(merged.at(k)));
    std::stable_sort(st.strata.begin(), st.strata.end(),
                     [](const Stratum& a, const Stratum& b2) {
                         if (a.dimension() != b2.dimension())
                             return a.dimension() > b2.dimension();
                         return a.flag == StratumFlag::InSet && b2.flag != StratumFlag::InSet;
                     });
    return st;
}

std::string stratification_report(const Stratification& s, int precision) {
    nlohmann::json j;
    j["ambient_dimension"] = s.n;
    j["set"] = s.set.formula.to_string();
    j["closure"] = s.closure.formula.to_string();
    j["note"] =
        "strata come from iterated singular loci and may refine the coarsest "
        "smooth decomposition; reported radii remain valid (conservative)";
    auto names = ambient_names(s.n);
    nlohmann::json arr = nlohmann::json::array();
    for (auto& z : s.strata) {
        nlohmann::json e;
        e["dimension"] = z.dimension();
        e["rank"] = z.rank;
        e["flag"] = z.flag == StratumFlag::InSet ? "in_set" : "in_frontier";
        nlohmann::json eqs = nlohmann::json::array();
        for (auto& p : z.equations) eqs.push_back(p.to_string(names) + " = 0");
        e["equations"] = eqs;
        e["side_conditions"] = z.side.to_string();
        nlohmann::json pts = nlohmann::json::array();
        for (auto& smp : z.samples) {
            nlohmann::json pt = nlohmann::json::array();
            for (auto& c : smp) pt.push_back(c.decimal(precision));
            pts.push_back(pt);
        }
        e["samples"] = pts;
        arr.push_back(e);
    }
    j["strata"] = arr;
    return j.dump(2);
}

}  // namespace cono
