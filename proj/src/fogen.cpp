#include "conoscope/fogen.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cono {

namespace {

// Growing variable table for one generation pass. Atom polynomials are built
// in whatever table size is current when they are created and widened to the
// final size in a single pass at the end, so builders may keep allocating
// fresh bound variables as they descend.
struct Gen {
    std::vector<std::string> vars;
    int counter = 0;

    explicit Gen(std::vector<std::string> frees = {}) : vars(std::move(frees)) {}

    int fresh(const char* base) {
        vars.push_back(std::string(base) + std::to_string(++counter));
        return (int)vars.size() - 1;
    }
    std::vector<int> fresh_vec(const char* base, int count) {
        std::vector<int> out;
        for (int i = 0; i < count; i++) out.push_back(fresh(base));
        return out;
    }

    int nv() const { return (int)vars.size(); }
    Polynomial var(int i) const { return Polynomial::variable(nv(), i); }

    // sum_i (a_i - b_i)^2
    Polynomial dist_sq(const std::vector<int>& a, const std::vector<int>& b) const {
        Polynomial s(nv());
        for (std::size_t i = 0; i < a.size(); i++) {
            Polynomial d = var(a[i]) - var(b[i]);
            s = s + d * d;
        }
        return s;
    }
    Polynomial norm_sq(const std::vector<int>& a) const {
        Polynomial s(nv());
        for (int i : a) s = s + var(i) * var(i);
        return s;
    }
    Polynomial dot(const std::vector<int>& a, const std::vector<int>& b) const {
        Polynomial s(nv());
        for (std::size_t i = 0; i < a.size(); i++) s = s + var(a[i]) * var(b[i]);
        return s;
    }

    NodePtr pos(int v) const { return mk_atom(var(v), RelOp::Gt); }
    // forall v (v > 0 -> body)
    NodePtr forall_pos(int v, NodePtr body) const {
        return mk_quant(true, v, mk_implies(pos(v), std::move(body)));
    }
    // exists v (v > 0 and body)
    NodePtr exists_pos(int v, NodePtr body) const {
        return mk_quant(false, v, mk_and({pos(v), std::move(body)}));
    }

    static NodePtr quant_vec(bool forall, const std::vector<int>& vs, NodePtr body) {
        for (auto it = vs.rbegin(); it != vs.rend(); ++it)
            body = mk_quant(forall, *it, std::move(body));
        return body;
    }
    NodePtr zero_vec(const std::vector<int>& vs) const {
        std::vector<NodePtr> kids;
        for (int v : vs) kids.push_back(mk_atom(var(v), RelOp::Eq));
        return mk_and(std::move(kids));
    }
};

std::vector<std::string> named(const char* base, int n, int from = 1) {
    std::vector<std::string> out;
    for (int i = 0; i < n; i++) out.push_back(std::string(base) + std::to_string(from + i));
    return out;
}

std::vector<int> iota_vec(int from, int count) {
    std::vector<int> out;
    for (int i = 0; i < count; i++) out.push_back(from + i);
    return out;
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::string> concat_names(std::vector<std::string> a,
                                      const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

NodePtr widen_atoms(const NodePtr& n, int nv) {
    if (n->kind == NodeKind::Atom) return mk_atom(n->poly.extended(nv), n->op);
    if (n->kids.empty()) return n;
    auto m = std::make_shared<Node>(*n);
    m->kids.clear();
    for (auto& k : n->kids) m->kids.push_back(widen_atoms(k, nv));
    return m;
}

Formula close_gen(const Gen& g, NodePtr root) {
    Formula f;
    f.vars = g.vars;
    f.root = widen_atoms(root, g.nv());
    return normalize_bound(f);
}

NodePtr rename_rel(const NodePtr& n, const std::string& from, const std::string& to) {
    if (n->kind == NodeKind::RelAtom && n->rel == from) {
        auto m = std::make_shared<Node>(*n);
        m->rel = to;
        return m;
    }
    if (n->kids.empty()) return n;
    auto m = std::make_shared<Node>(*n);
    m->kids.clear();
    for (auto& k : n->kids) m->kids.push_back(rename_rel(k, from, to));
    return m;
}

Formula rename_rel(Formula f, const std::string& from, const std::string& to) {
    f.root = rename_rel(f.root, from, to);
    return f;
}

// Contingent-cone membership of v in the tangent set of `rel` at x:
// forall eps>0 forall del>0 exists y (rel(y) and 0<|y-x|^2<del and
// exists lam>0 |lam(y-x)-v|^2 < eps), or v = 0.
NodePtr tangent_node(Gen& g, const std::vector<int>& x, const std::vector<int>& v,
                     const std::string& rel) {
    int n = (int)x.size();
    int eps = g.fresh("e");
    int del = g.fresh("d");
    std::vector<int> y = g.fresh_vec("y", n);
    int lam = g.fresh("l");

    Polynomial approach(g.nv());
    for (int i = 0; i < n; i++) {
        Polynomial d = g.var(lam) * (g.var(y[i]) - g.var(x[i])) - g.var(v[i]);
        approach = approach + d * d;
    }
    NodePtr lam_block =
        g.exists_pos(lam, mk_atom(approach - g.var(eps), RelOp::Lt));

    Polynomial yx = g.dist_sq(y, x);
    NodePtr core = Gen::quant_vec(false, y,
        mk_and({mk_rel(rel, y),
                mk_atom(yx, RelOp::Gt),
                mk_atom(yx - g.var(del), RelOp::Lt),
                lam_block}));

    NodePtr limit = g.forall_pos(eps, g.forall_pos(del, core));
    return mk_or({limit, g.zero_vec(v)});
}

Formula tangent_formula(int n) {
    Gen g(concat_names(named("x", n), named("v", n)));
    return close_gen(g, tangent_node(g, iota_vec(0, n), iota_vec(n, n), "S"));
}

// Local graph bound at y: every z in S near y deviates from the tangent set
// at y by at most eps |z-y|^2, for every eps.
NodePtr graph_bound_node(Gen& g, const std::vector<int>& y) {
    int n = (int)y.size();
    int eps = g.fresh("e");
    int dp = g.fresh("d");
    std::vector<int> z = g.fresh_vec("z", n);
    std::vector<int> w = g.fresh_vec("w", n);

    Polynomial zy = g.dist_sq(z, y);
    Polynomial dev(g.nv());
    for (int i = 0; i < n; i++) {
        Polynomial d = g.var(z[i]) - g.var(y[i]) - g.var(w[i]);
        dev = dev + d * d;
    }
    NodePtr close_tangent = Gen::quant_vec(false, w,
        mk_and({mk_rel("T", concat(y, w)),
                mk_atom(dev - g.var(eps) * zy, RelOp::Le)}));
    NodePtr all_z = Gen::quant_vec(true, z,
        mk_implies(mk_and({mk_rel("S", z), mk_atom(zy - g.var(dp), RelOp::Lt)}),
                   close_tangent));
    return g.forall_pos(eps, g.exists_pos(dp, all_z));
}

// Local fullness at y: every short tangent vector w at y is eps-shadowed by
// an actual point z of S, for every eps.
NodePtr fullness_node(Gen& g, const std::vector<int>& y) {
    int n = (int)y.size();
    int eps = g.fresh("e");
    int dp = g.fresh("d");
    std::vector<int> w = g.fresh_vec("w", n);
    std::vector<int> z = g.fresh_vec("z", n);

    Polynomial wn = g.norm_sq(w);
    Polynomial dev(g.nv());
    for (int i = 0; i < n; i++) {
        Polynomial d = g.var(z[i]) - g.var(y[i]) - g.var(w[i]);
        dev = dev + d * d;
    }
    NodePtr reach = Gen::quant_vec(false, z,
        mk_and({mk_rel("S", z), mk_atom(dev - g.var(eps) * wn, RelOp::Le)}));
    NodePtr all_w = Gen::quant_vec(true, w,
        mk_implies(mk_and({mk_rel("T", concat(y, w)),
                           mk_atom(wn - g.var(dp), RelOp::Lt)}),
                   reach));
    return g.forall_pos(eps, g.exists_pos(dp, all_w));
}

// The tangent set at y is a k-dimensional linear subspace: k orthonormal
// tangent vectors exist, every tangent vector is a combination of them, and
// every combination of them is tangent. k = 0 degenerates to "only the zero
// vector is tangent".
NodePtr linear_kdim_node(Gen& g, const std::vector<int>& y, int k) {
    int n = (int)y.size();
    if (k == 0) {
        std::vector<int> v = g.fresh_vec("v", n);
        return Gen::quant_vec(true, v,
            mk_implies(mk_rel("T", concat(y, v)), g.zero_vec(v)));
    }
    std::vector<std::vector<int>> t;
    std::vector<int> all_t;
    for (int a = 0; a < k; a++) {
        t.push_back(g.fresh_vec("t", n));
        all_t = concat(all_t, t.back());
    }
    std::vector<int> v = g.fresh_vec("v", n);
    std::vector<int> c = g.fresh_vec("c", k);
    std::vector<int> c2 = g.fresh_vec("c", k);
    std::vector<int> w = g.fresh_vec("w", n);

    std::vector<NodePtr> kids;
    for (int a = 0; a < k; a++) kids.push_back(mk_rel("T", concat(y, t[a])));
    for (int a = 0; a < k; a++)
        kids.push_back(mk_atom(g.norm_sq(t[a]) - Polynomial::constant(g.nv(), 1),
                               RelOp::Eq));
    for (int a = 0; a < k; a++)
        for (int b = a + 1; b < k; b++)
            kids.push_back(mk_atom(g.dot(t[a], t[b]), RelOp::Eq));

    auto combination = [&](const std::vector<int>& target,
                           const std::vector<int>& coef) {
        std::vector<NodePtr> eqs;
        for (int i = 0; i < n; i++) {
            Polynomial s = g.var(target[i]);
            for (int a = 0; a < k; a++) s = s - g.var(coef[a]) * g.var(t[a][i]);
            eqs.push_back(mk_atom(s, RelOp::Eq));
        }
        return mk_and(std::move(eqs));
    };

    kids.push_back(Gen::quant_vec(true, v,
        mk_implies(mk_rel("T", concat(y, v)),
                   Gen::quant_vec(false, c, combination(v, c)))));
    kids.push_back(Gen::quant_vec(true, c2,
        Gen::quant_vec(false, w,
            mk_and({combination(w, c2), mk_rel("T", concat(y, w))}))));

    return Gen::quant_vec(false, all_t, mk_and(std::move(kids)));
}

// k-regularity skeleton over relations S (the set) and T (its tangent pairs):
// x in S, and every y in S near x has a k-dimensional linear tangent space,
// the local graph bound, and local fullness.
Formula kreg_skeleton(int n, int k) {
    Gen g(named("x", n));
    std::vector<int> x = iota_vec(0, n);
    int del = g.fresh("d");
    std::vector<int> y = g.fresh_vec("y", n);

    NodePtr psi = mk_and({linear_kdim_node(g, y, k),
                          graph_bound_node(g, y),
                          fullness_node(g, y)});
    Polynomial yx = g.dist_sq(y, x);
    NodePtr nearby = Gen::quant_vec(true, y,
        mk_implies(mk_and({mk_rel("S", y), mk_atom(yx - g.var(del), RelOp::Lt)}),
                   psi));
    NodePtr root = mk_and({mk_rel("S", x), g.exists_pos(del, nearby)});
    return close_gen(g, root);
}

Formula kreg_formula(int n, int k) {
    return substitute_relation(kreg_skeleton(n, k), "T", tangent_formula(n));
}

// Whitney condition (b) skeleton over S1, S2 and T2 (tangent pairs of S2).
Formula whitney_skeleton(int n) {
    Gen g(named("x", n));
    std::vector<int> x = iota_vec(0, n);
    int eps = g.fresh("e");
    int del = g.fresh("d");
    std::vector<int> xp = g.fresh_vec("u", n);
    std::vector<int> y = g.fresh_vec("y", n);
    std::vector<int> w = g.fresh_vec("w", n);
    int s = g.fresh("s");

    Polynomial sec = g.dist_sq(y, xp);
    Polynomial dev(g.nv());
    for (int i = 0; i < n; i++) {
        Polynomial d = g.var(y[i]) - g.var(xp[i]) - g.var(s) * g.var(w[i]);
        dev = dev + d * d;
    }
    NodePtr witness = Gen::quant_vec(false, w, mk_quant(false, s,
        mk_and({mk_rel("T2", concat(y, w)),
                mk_atom(g.var(s), RelOp::Gt),
                mk_atom(g.var(s) * g.var(s) - sec, RelOp::Eq),
                mk_atom(dev - g.var(eps) * sec, RelOp::Lt)})));
    NodePtr hyp = mk_and({mk_rel("S1", xp),
                          mk_atom(g.dist_sq(xp, x) - g.var(del), RelOp::Lt),
                          mk_rel("S2", y),
                          mk_atom(g.dist_sq(y, x) - g.var(del), RelOp::Lt),
                          mk_atom(sec, RelOp::Gt)});
    NodePtr body = Gen::quant_vec(true, xp,
                   Gen::quant_vec(true, y, mk_implies(hyp, witness)));
    NodePtr root = g.forall_pos(eps, g.exists_pos(del, body));
    return close_gen(g, root);
}

Formula whitney_formula(int n) {
    return substitute_relation(whitney_skeleton(n), "T2",
                               rename_rel(tangent_formula(n), "S", "S2"));
}

// x in the closure of `rel`: every ball around x meets it.
Formula closure_skeleton(int n, const std::string& rel) {
    Gen g(named("x", n));
    std::vector<int> x = iota_vec(0, n);
    int eps = g.fresh("e");
    std::vector<int> y = g.fresh_vec("y", n);
    NodePtr touch = Gen::quant_vec(false, y,
        mk_and({mk_rel(rel, y),
                mk_atom(g.dist_sq(y, x) - g.var(eps), RelOp::Lt)}));
    return close_gen(g, g.forall_pos(eps, touch));
}

// The frontier cl(S) - S.
Formula frontier_formula(int n) {
    Gen g(named("x", n));
    std::vector<int> x = iota_vec(0, n);
    int eps = g.fresh("e");
    std::vector<int> y = g.fresh_vec("y", n);
    NodePtr touch = Gen::quant_vec(false, y,
        mk_and({mk_rel("S", y),
                mk_atom(g.dist_sq(y, x) - g.var(eps), RelOp::Lt)}));
    NodePtr root = mk_and({g.forall_pos(eps, touch), mk_not(mk_rel("S", x))});
    return close_gen(g, root);
}

Formula interior_formula(int n) {
    Gen g(named("x", n));
    std::vector<int> x = iota_vec(0, n);
    int del = g.fresh("d");
    std::vector<int> y = g.fresh_vec("y", n);
    NodePtr inside = Gen::quant_vec(true, y,
        mk_implies(mk_atom(g.dist_sq(y, x) - g.var(del), RelOp::Lt),
                   mk_rel("S", y)));
    return close_gen(g, g.exists_pos(del, inside));
}

// cl(R) for a formula R with free variables x1..xn.
Formula closure_of(const Formula& r, int n) {
    return substitute_relation(closure_skeleton(n, "#X"), "#X", r);
}

// All strata Z_n .. Z_0 of the canonical Whitney stratification of cl(S)
// compatible with S, built top-down: Z_n is the n-regular locus of S; for
// m < n the level-m stratum combines, for each of A_0 = S and A_1 = cl(S)-S,
// the m-regular locus R minus the higher strata, the interior (relative to R)
// of the locus where (R, p, Z_j) has the Whitney property for every j > m,
// minus the closure of the other side's R.
std::vector<Formula> strata_formulas(int n) {
    Formula frontier = frontier_formula(n);
    Formula whitney = whitney_formula(n);
    std::vector<int> x = iota_vec(0, n);

    std::vector<Formula> z(n + 1);
    z[n] = kreg_formula(n, n);

    for (int m = n - 1; m >= 0; m--) {
        Formula kreg = kreg_formula(n, m);
        Formula side[2] = {kreg, substitute_relation(kreg, "S", frontier)};

        Formula r[2];
        for (int i = 0; i < 2; i++) {
            Gen g(named("x", n));
            std::vector<NodePtr> kids{mk_rel("#K", x)};
            for (int j = m + 1; j <= n; j++)
                kids.push_back(mk_not(mk_rel("#Z" + std::to_string(j), x)));
            Formula f = substitute_relation(close_gen(g, mk_and(std::move(kids))),
                                            "#K", side[i]);
            for (int j = m + 1; j <= n; j++)
                f = substitute_relation(f, "#Z" + std::to_string(j), z[j]);
            r[i] = f;
        }

        Formula w[2];
        for (int i = 0; i < 2; i++) {
            Gen g(named("x", n));
            std::vector<NodePtr> kids{mk_rel("#R", x)};
            for (int j = m + 1; j <= n; j++) {
                int del = g.fresh("d");
                std::vector<int> y = g.fresh_vec("y", n);
                NodePtr good = Gen::quant_vec(true, y,
                    mk_implies(mk_and({mk_rel("#R", y),
                                       mk_atom(g.dist_sq(y, x) - g.var(del),
                                               RelOp::Lt)}),
                               mk_rel("#W" + std::to_string(j), y)));
                kids.push_back(g.exists_pos(del, good));
            }
            Formula f = substitute_relation(close_gen(g, mk_and(std::move(kids))),
                                            "#R", r[i]);
            for (int j = m + 1; j <= n; j++) {
                Formula wh = substitute_relation(
                    substitute_relation(whitney, "S1", r[i]), "S2", z[j]);
                f = substitute_relation(f, "#W" + std::to_string(j), wh);
            }
            w[i] = f;
        }

        Formula part[2];
        for (int i = 0; i < 2; i++) {
            Gen g(named("x", n));
            NodePtr root = mk_and({mk_rel("#W", x), mk_not(mk_rel("#C", x))});
            Formula f = substitute_relation(close_gen(g, root), "#W", w[i]);
            part[i] = substitute_relation(f, "#C", closure_of(r[1 - i], n));
        }

        {
            Gen g(named("x", n));
            NodePtr root = mk_or({mk_rel("#A", x), mk_rel("#B", x)});
            Formula f = substitute_relation(close_gen(g, root), "#A", part[0]);
            z[m] = substitute_relation(f, "#B", part[1]);
        }
    }
    return z;
}

// Guarantee that every one of the first n variables occurs free, so that
// positional relation substitution sees the declared arity. A vacuous
// sum-of-squares >= 0 conjunct touches the missing ones.
Formula touch_all(const SetDescription& a) {
    if ((int)a.formula.free_vars().size() == a.n) return a.formula;
    Formula f = a.formula;
    Polynomial s(f.nvars());
    for (int i = 0; i < a.n; i++) {
        Polynomial v = Polynomial::variable(f.nvars(), i);
        s = s + v * v;
    }
    f.root = mk_and({f.root, mk_atom(s, RelOp::Ge)});
    return f;
}

} // namespace

GeneratedQuery gen_tangent(int n) {
    if (n < 1) throw std::invalid_argument("gen_tangent: n >= 1 required");
    return {QueryName::Tangent, n, -1, tangent_formula(n)};
}

GeneratedQuery gen_kreg(int n, int k) {
    if (n < 1 || k < 0 || k > n)
        throw std::invalid_argument("gen_kreg: 0 <= k <= n required");
    return {QueryName::Kreg, n, k, kreg_formula(n, k)};
}

GeneratedQuery gen_whitney(int n) {
    if (n < 1) throw std::invalid_argument("gen_whitney: n >= 1 required");
    return {QueryName::Whitney, n, -1, whitney_formula(n)};
}

GeneratedQuery gen_stratum(int n, int k) {
    if (n < 1 || k < 0 || k > n)
        throw std::invalid_argument("gen_stratum: 0 <= k <= n required");
    return {QueryName::Stratum, n, k, strata_formulas(n)[k]};
}

GeneratedQuery gen_interior(int n) {
    if (n < 1) throw std::invalid_argument("gen_interior: n >= 1 required");
    return {QueryName::Interior, n, -1, interior_formula(n)};
}

GeneratedQuery gen_crit(int n, RadiusMode mode) {
    if (n < 1) throw std::invalid_argument("gen_crit: n >= 1 required");
    std::vector<Formula> z = strata_formulas(n);
    Formula tangent = tangent_formula(n);

    Gen g(concat_names(named("p", n), named("x", n)));
    std::vector<int> p = iota_vec(0, n);
    std::vector<int> x = iota_vec(n, n);
    std::vector<int> v = g.fresh_vec("v", n);

    Polynomial orth(g.nv());
    for (int i = 0; i < n; i++)
        orth = orth + (g.var(x[i]) - g.var(p[i])) * g.var(v[i]);

    std::vector<NodePtr> branches;
    for (int j = 0; j <= n; j++) {
        NodePtr lagrange = Gen::quant_vec(true, v,
            mk_implies(mk_rel("#T" + std::to_string(j), concat(x, v)),
                       mk_atom(orth, RelOp::Eq)));
        branches.push_back(mk_and({mk_rel("#Z" + std::to_string(j), x), lagrange}));
    }

    std::vector<NodePtr> kids{mk_rel("S", p)};
    if (mode == RadiusMode::Corrected) {
        std::vector<NodePtr> diff;
        for (int i = 0; i < n; i++)
            diff.push_back(mk_atom(g.var(x[i]) - g.var(p[i]), RelOp::Ne));
        kids.push_back(mk_or(std::move(diff)));
    }
    kids.push_back(mk_or(std::move(branches)));

    Formula f = close_gen(g, mk_and(std::move(kids)));
    for (int j = 0; j <= n; j++) {
        f = substitute_relation(f, "#Z" + std::to_string(j), z[j]);
        f = substitute_relation(f, "#T" + std::to_string(j),
                                substitute_relation(tangent, "S", z[j]));
    }
    return {QueryName::Crit, n, -1, f};
}

GeneratedQuery gen_val(int n, RadiusMode mode) {
    if (n < 1) throw std::invalid_argument("gen_val: n >= 1 required");
    Gen g(concat_names(named("p", n), {"r"}));
    std::vector<int> p = iota_vec(0, n);
    int r = n;
    std::vector<int> x = g.fresh_vec("q", n);

    Polynomial dist = g.var(r);
    for (int i = 0; i < n; i++) {
        Polynomial d = g.var(x[i]) - g.var(p[i]);
        dist = dist - d * d;
    }
    NodePtr root = Gen::quant_vec(false, x,
        mk_and({mk_rel("#C", concat(p, x)), mk_atom(dist, RelOp::Eq)}));
    Formula f = substitute_relation(close_gen(g, root), "#C",
                                    gen_crit(n, mode).formula);
    return {QueryName::Val, n, -1, f};
}

GeneratedQuery gen_radius(int n, RadiusMode mode) {
    if (n < 1) throw std::invalid_argument("gen_radius: n >= 1 required");
    Gen g(concat_names(named("p", n), {"r"}));
    std::vector<int> p = iota_vec(0, n);
    int r = n;
    int rp = g.fresh("r");

    Polynomial gap = mode == RadiusMode::Corrected
                         ? g.var(r) * g.var(r) - g.var(rp)
                         : g.var(r) - g.var(rp);
    NodePtr below = mk_quant(true, rp,
        mk_implies(mk_rel("#V", concat(p, {rp})), mk_atom(gap, RelOp::Lt)));

    std::vector<NodePtr> kids{mk_rel("S", p)};
    if (mode == RadiusMode::Corrected) kids.push_back(g.pos(r));
    kids.push_back(below);

    Formula f = substitute_relation(close_gen(g, mk_and(std::move(kids))), "#V",
                                    gen_val(n, mode).formula);
    return {QueryName::Radius, n, -1, f};
}

Formula instantiate(const GeneratedQuery& q, const SetDescription& a) {
    if (q.name == QueryName::Whitney)
        throw std::invalid_argument("instantiate: Whitney query needs two sets");
    if (a.n != q.n)
        throw std::invalid_argument("instantiate: ambient dimension mismatch");
    return substitute_relation(q.formula, "S", touch_all(a));
}

Formula instantiate(const GeneratedQuery& q, const SetDescription& a1,
                    const SetDescription& a2) {
    if (q.name != QueryName::Whitney)
        throw std::invalid_argument("instantiate: two sets only fit the Whitney query");
    if (a1.n != q.n || a2.n != q.n)
        throw std::invalid_argument("instantiate: ambient dimension mismatch");
    Formula f = substitute_relation(q.formula, "S1", touch_all(a1));
    return substitute_relation(f, "S2", touch_all(a2));
}

} // namespace cono
