#include "conoscope/algebraic.hpp"

#include <algorithm>
#include <stdexcept>

namespace cono {

namespace {

Rational eval1(const Polynomial& f, const Rational& x) {
    return f.eval({x});
}

// Univariate polynomial remainder over Q.
Polynomial poly_rem(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    int db = b.degree(0);
    Rational lb = b.coeff(0, (unsigned)db).constant_value();
    while (!r.is_zero() && r.degree(0) >= db) {
        int dr = r.degree(0);
        Rational lr = r.coeff(0, (unsigned)dr).constant_value();
        r = r - b * Polynomial::mono(1, 0, (unsigned)(dr - db), lr / lb);
    }
    return r;
}

std::vector<Polynomial> sturm_chain(const Polynomial& f) {
    std::vector<Polynomial> chain{f, f.derivative(0)};
    while (!chain.back().is_zero() && chain.back().degree(0) >= 1) {
        Polynomial r = -poly_rem(chain[chain.size() - 2], chain.back());
        if (r.is_zero()) break;
        chain.push_back(r.normalized() * Rational(sign(r.terms().rbegin()->second)));
    }
    return chain;
}

int sign_variations(const std::vector<Polynomial>& chain, const Rational& x) {
    int vars = 0, prev = 0;
    for (const auto& p : chain) {
        int s = cono::sign(eval1(p, x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) vars++;
        prev = s;
    }
    return vars;
}

// Strict bound on root magnitudes (Cauchy).
Rational root_bound(const Polynomial& f) {
    int d = f.degree(0);
    Rational lead = abs(f.coeff(0, (unsigned)d).constant_value());
    Rational m(0);
    for (int k = 0; k < d; k++) {
        Rational a = abs(f.coeff(0, (unsigned)k).constant_value()) / lead;
        if (a > m) m = a;
    }
    return m + 1;
}

void isolate_rec(const Polynomial& f, const std::vector<Polynomial>& chain,
                 const Rational& a, const Rational& b, int count,
                 std::vector<AlgebraicNumber>& out) {
    if (count == 0) return;
    if (count == 1 && cono::sign(eval1(f, a)) * cono::sign(eval1(f, b)) < 0) {
        out.emplace_back(f, Interval(a, b));
        return;
    }
    Rational mid = (a + b) / 2;
    if (cono::sign(eval1(f, mid)) == 0) {
        out.push_back(AlgebraicNumber::from_rational(mid));
        // carve out a root-free neighborhood of mid before recursing
        Rational w = (b - a) / 4;
        while (true) {
            int inside = sign_variations(chain, mid - w) - sign_variations(chain, mid + w);
            if (inside == 1 && cono::sign(eval1(f, mid - w)) != 0 && cono::sign(eval1(f, mid + w)) != 0) break;
            w /= 2;
        }
        int left = sign_variations(chain, a) - sign_variations(chain, mid - w);
        int right = sign_variations(chain, mid + w) - sign_variations(chain, b);
        isolate_rec(f, chain, a, mid - w, left, out);
        isolate_rec(f, chain, mid + w, b, right, out);
        return;
    }
    int left = sign_variations(chain, a) - sign_variations(chain, mid);
    int right = sign_variations(chain, mid) - sign_variations(chain, b);
    isolate_rec(f, chain, a, mid, left, out);
    isolate_rec(f, chain, mid, b, right, out);
}

} // namespace

AlgebraicNumber::AlgebraicNumber()
    : defining_(Polynomial::variable(1, 0)), iv_(Interval::point(0)) {}

AlgebraicNumber::AlgebraicNumber(Polynomial defining, Interval iv)
    : defining_(std::move(defining)), iv_(std::move(iv)) {
    normalize();
}

AlgebraicNumber AlgebraicNumber::from_rational(const Rational& q) {
    Polynomial p = Polynomial::variable(1, 0) - Polynomial::constant(1, q);
    return AlgebraicNumber(p.normalized(), Interval::point(q));
}

void AlgebraicNumber::normalize() {
    if (iv_.is_point()) {
        Rational q = iv_.lo;
        defining_ = (Polynomial::variable(1, 0) - Polynomial::constant(1, q)).normalized();
        return;
    }
    // linear defining polynomial: solve exactly
    if (defining_.degree(0) == 1) {
        Rational a = defining_.coeff(0, 1).constant_value();
        Rational b = defining_.coeff(0, 0).constant_value();
        iv_ = Interval::point(-b / a);
        normalize();
        return;
    }
    // endpoint happens to be the root
    if (cono::sign(eval1(defining_, iv_.lo)) == 0) { iv_ = Interval::point(iv_.lo); normalize(); return; }
    if (cono::sign(eval1(defining_, iv_.hi)) == 0) { iv_ = Interval::point(iv_.hi); normalize(); return; }
}

Rational AlgebraicNumber::rational_value() const {
    if (!is_rational()) throw std::logic_error("not a rational value");
    return iv_.lo;
}

void AlgebraicNumber::refine() {
    if (is_rational()) return;
    Rational mid = iv_.mid();
    int sm = cono::sign(eval1(defining_, mid));
    if (sm == 0) { iv_ = Interval::point(mid); normalize(); return; }
    int sl = cono::sign(eval1(defining_, iv_.lo));
    if (sl * sm < 0) iv_.hi = mid; else iv_.lo = mid;
}

void AlgebraicNumber::refine_below(const Rational& width) {
    while (!is_rational() && iv_.width() >= width) refine();
}

int AlgebraicNumber::sign() const {
    if (is_rational()) return cono::sign(iv_.lo);
    AlgebraicNumber copy = *this;
    if (cono::sign(eval1(defining_, Rational(0))) == 0 && iv_.contains(Rational(0)))
        return 0;
    while (copy.iv_.contains_zero() && !copy.is_rational()) copy.refine();
    return copy.is_rational() ? cono::sign(copy.iv_.lo)
                              : (cono::sign(copy.iv_.lo) > 0 ? 1 : -1);
}

double AlgebraicNumber::approx() const {
    AlgebraicNumber copy = *this;
    copy.refine_below(Rational(1, 1000000000));
    return copy.iv_.mid().get_d();
}

std::string AlgebraicNumber::decimal(int digits) const {
    AlgebraicNumber copy = *this;
    Rational w(1);
    for (int i = 0; i < digits + 2; i++) w /= 10;
    copy.refine_below(w);
    return to_decimal(copy.iv_.mid(), digits);
}

int compare(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.is_rational() && b.is_rational()) return cmp(a.iv_.lo, b.iv_.lo);
    AlgebraicNumber x = a, y = b;
    // equality test: a common root of both defining polynomials inside the
    // interval overlap must be both numbers at once
    Polynomial g = gcd(x.defining_, y.defining_);
    while (true) {
        if (x.iv_.hi < y.iv_.lo) return -1;
        if (y.iv_.hi < x.iv_.lo) return 1;
        Rational lo = std::max(x.iv_.lo, y.iv_.lo);
        Rational hi = std::min(x.iv_.hi, y.iv_.hi);
        if (g.degree(0) >= 1) {
            // a common root inside the overlap is the unique root of both
            // defining polynomials there, hence a == b
            int roots = (cono::sign(eval1(g, lo)) == 0 ? 1 : 0);
            if (lo < hi) roots += count_real_roots(g, lo, hi);
            if (roots > 0) return 0;
        }
        if (x.is_rational() && y.is_rational()) return cmp(x.iv_.lo, y.iv_.lo);
        x.refine();
        y.refine();
    }
}

int compare(const AlgebraicNumber& a, const Rational& q) {
    return compare(a, AlgebraicNumber::from_rational(q));
}

std::vector<AlgebraicNumber> isolate_real_roots(const Polynomial& f) {
    if (f.is_zero()) throw std::invalid_argument("zero polynomial");
    if (f.nvars() != 1) {
        auto used = f.used_vars();
        if (used.size() > 1) throw std::invalid_argument("polynomial is not univariate");
        std::vector<int> idx(f.nvars(), -1);
        if (!used.empty()) idx[used[0]] = 0;
        for (int i = 0; i < f.nvars(); i++)
            if (idx[i] < 0) idx[i] = 0;  // unused slots collapse harmlessly
        return isolate_real_roots(f.remap(1, idx));
    }
    Polynomial sf = squarefree_part(f);
    if (sf.degree(0) < 1) return {};
    auto chain = sturm_chain(sf);
    Rational bound = root_bound(sf);
    int total = sign_variations(chain, -bound) - sign_variations(chain, bound);
    std::vector<AlgebraicNumber> out;
    isolate_rec(sf, chain, -bound, bound, total, out);
    std::sort(out.begin(), out.end(),
              [](const AlgebraicNumber& a, const AlgebraicNumber& b) { return compare(a, b) < 0; });
    return out;
}

int count_real_roots(const Polynomial& f, const Rational& a, const Rational& b) {
    Polynomial sf = squarefree_part(f);
    if (sf.degree(0) < 1) return 0;
    auto chain = sturm_chain(sf);
    return sign_variations(chain, a) - sign_variations(chain, b);
}

int sign_at(const Polynomial& f, const AlgebraicNumber& a) {
    return sign_at(f, std::vector<AlgebraicNumber>{a});
}

namespace {

// Smallest-magnitude guard: a positive rational g such that q (with q(0) != 0)
// has no root in [-g, g].
Rational zero_gap(const Polynomial& q) {
    Rational g(1);
    while (count_real_roots(q, -g, g) > 0 || sign(q.eval({-g})) == 0) g /= 2;
    return g;
}

} // namespace

int sign_at(const Polynomial& f, const std::vector<AlgebraicNumber>& point) {
    if ((int)point.size() != f.nvars())
        throw std::invalid_argument("point dimension mismatch");
    // substitute rational coordinates
    Polynomial g = f;
    std::vector<int> irr;  // irrational coordinate indices
    for (int i = 0; i < f.nvars(); i++) {
        if (point[i].is_rational())
            g = g.subst(i, point[i].rational_value());
        else
            irr.push_back(i);
    }
    if (irr.empty()) return sign(g.constant_value());
    if (irr.size() == 1 && g.used_vars().size() <= 1) {
        // univariate case: exact zero test via gcd with the defining polynomial
        int v = irr[0];
        const AlgebraicNumber& a = point[v];
        std::vector<int> idx(f.nvars(), 0);
        idx[v] = 0;
        Polynomial gu = g.remap(1, idx);
        if (gu.is_constant()) return sign(gu.constant_value());
        Polynomial common = gcd(gu, a.defining());
        if (common.degree(0) >= 1) {
            const Interval& iv = a.interval();
            int at_lo = sign(common.eval({iv.lo})) == 0 && iv.contains(iv.lo) ? 1 : 0;
            int at_hi = sign(common.eval({iv.hi})) == 0 ? 1 : 0;
            if (at_lo || at_hi || count_real_roots(common, iv.lo, iv.hi) > 0) return 0;
        }
        AlgebraicNumber copy = a;
        while (true) {
            Interval val = gu.eval_interval({copy.interval()});
            int s = val.definite_sign();
            if (s != 2) return s;
            copy.refine();
        }
    }

    // fast path: most queried values are nonzero, so a few rounds of interval
    // refinement usually decide the sign without any resultant work
    {
        std::vector<AlgebraicNumber> copies(point.begin(), point.end());
        for (int round = 0; round < 24; round++) {
            std::vector<Interval> box;
            box.reserve(point.size());
            for (auto& c : copies) box.push_back(c.interval());
            Interval val = f.eval_interval(box);
            int s = val.definite_sign();
            if (s != 2) return s;
            for (int v : irr) copies[v].refine();
        }
    }

    // general case: iterated resultant gives a nonzero univariate polynomial
    // R(z) vanishing at v = g(point); then refine until decided
    int m = (int)irr.size();
    int nvz = m + 1;  // variables: z, t1..tm
    std::vector<int> idx(f.nvars(), -1);
    for (int j = 0; j < m; j++) idx[irr[j]] = 1 + j;
    for (int i = 0; i < f.nvars(); i++)
        if (idx[i] < 0) idx[i] = 0;  // substituted-away slots are unused
    Polynomial gz = g.remap(nvz, idx);
    Polynomial h = Polynomial::variable(nvz, 0) - gz;
    for (int j = 0; j < m; j++) {
        std::vector<int> didx{1 + j};
        Polynomial d = point[irr[j]].defining().remap(nvz, didx);
        h = resultant(h, d, 1 + j);
        if (h.is_zero())
            throw std::logic_error("degenerate iterated resultant in sign_at");
        h = squarefree_part(h);
    }
    std::vector<int> zidx(nvz, 0);
    Polynomial R = h.remap(1, zidx);
    R = squarefree_part(R);
    // strip the root at zero, if any
    Polynomial Q = R;
    while (!Q.is_zero() && sign(Q.coeff(0, 0).constant_value()) == 0)
        Q = exact_divide(Q, Polynomial::variable(1, 0));
    Rational gap = Q.degree(0) >= 1 ? zero_gap(Q) : Rational(1);

    std::vector<AlgebraicNumber> copies(point.begin(), point.end());
    while (true) {
        std::vector<Interval> box;
        box.reserve(point.size());
        for (auto& c : copies) box.push_back(c.interval());
        Interval val = f.eval_interval(box);
        int s = val.definite_sign();
        if (s != 2) return s;
        if (-gap < val.lo && val.hi < gap) return 0;
        for (auto& c : copies) c.refine();
    }
}

} // namespace cono
