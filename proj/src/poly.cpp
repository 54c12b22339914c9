#include "conoscope/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cono {

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = std::accumulate(a.begin(), a.end(), 0u);
    unsigned db = std::accumulate(b.begin(), b.end(), 0u);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
    Polynomial p(nvars);
    if (sign(c) != 0) p.terms_.emplace(Monomial(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int var) {
    return mono(nvars, var, 1);
}

Polynomial Polynomial::mono(int nvars, int var, unsigned e, const Rational& c) {
    Polynomial p(nvars);
    if (sign(c) == 0) return p;
    Monomial m(nvars, 0);
    m[var] = e;
    p.terms_.emplace(std::move(m), c);
    return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (sign(c) != 0) terms_.emplace(m, c);
    } else {
        it->second += c;
        if (sign(it->second) == 0) terms_.erase(it);
    }
}

bool Polynomial::is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == Monomial(nv_, 0);
}

Rational Polynomial::constant_value() const {
    if (terms_.empty()) return Rational(0);
    return terms_.begin()->second;
}

int Polynomial::degree(int var) const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, (int)m[var]);
    return d;
}

int Polynomial::total_degree() const {
    int d = -1;
    for (auto& [m, c] : terms_)
        d = std::max(d, (int)std::accumulate(m.begin(), m.end(), 0u));
    return d;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nv_);
    for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r(nv_);
    for (auto& [ma, ca] : terms_) {
        for (auto& [mb, cb] : o.terms_) {
            Monomial m(nv_);
            for (int i = 0; i < nv_; i++) m[i] = ma[i] + mb[i];
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
    Polynomial r(nv_);
    if (sign(c) == 0) return r;
    for (auto& [m, cc] : terms_) r.terms_.emplace(m, cc * c);
    return r;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial r = constant(nv_, 1);
    Polynomial base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
    return nv_ == o.nv_ && terms_ == o.terms_;
}

bool Polynomial::operator<(const Polynomial& o) const {
    if (nv_ != o.nv_) return nv_ < o.nv_;
    auto ita = terms_.begin(), itb = o.terms_.begin();
    GrlexLess less;
    for (; ita != terms_.end() && itb != o.terms_.end(); ++ita, ++itb) {
        if (less(ita->first, itb->first)) return true;
        if (less(itb->first, ita->first)) return false;
        int c = cmp(ita->second, itb->second);
        if (c != 0) return c < 0;
    }
    return ita == terms_.end() && itb != o.terms_.end();
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial r(nv_);
    for (auto& [m, c] : terms_) {
        if (m[var] == 0) continue;
        Monomial d = m;
        d[var] -= 1;
        r.add_term(d, c * (long)m[var]);
    }
    return r;
}

Polynomial Polynomial::coeff(int var, unsigned k) const {
    Polynomial r(nv_);
    for (auto& [m, c] : terms_) {
        if (m[var] != k) continue;
        Monomial d = m;
        d[var] = 0;
        r.add_term(d, c);
    }
    return r;
}

Polynomial Polynomial::leading_coeff(int var) const {
    int d = degree(var);
    if (d < 0) return Polynomial(nv_);
    return coeff(var, (unsigned)d);
}

Polynomial Polynomial::reductum(int var) const {
    int d = degree(var);
    Polynomial r(nv_);
    if (d < 0) return r;
    for (auto& [m, c] : terms_)
        if ((int)m[var] != d) r.add_term(m, c);
    return r;
}

Rational Polynomial::eval(const std::vector<Rational>& point) const {
    Rational total(0);
    for (auto& [m, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < nv_; i++) {
            for (unsigned e = 0; e < m[i]; e++) t *= point[i];
        }
        total += t;
    }
    return total;
}

Polynomial Polynomial::subst(int var, const Rational& value) const {
    Polynomial r(nv_);
    for (auto& [m, c] : terms_) {
        Rational t = c;
        for (unsigned e = 0; e < m[var]; e++) t *= value;
        Monomial d = m;
        d[var] = 0;
        r.add_term(d, t);
    }
    return r;
}

Polynomial Polynomial::subst(int var, const Polynomial& value) const {
    // Horner in var
    int d = degree(var);
    if (d < 0) return *this;
    Polynomial r = coeff(var, (unsigned)d);
    for (int k = d - 1; k >= 0; k--) r = r * value + coeff(var, (unsigned)k);
    return r;
}

Interval Polynomial::eval_interval(const std::vector<Interval>& box) const {
    Interval total = Interval::point(0);
    for (auto& [m, c] : terms_) {
        Interval t = Interval::point(1);
        for (int i = 0; i < nv_; i++)
            if (m[i] > 0) t = t * cono::pow(box[i], (unsigned)m[i]);
        total = total + scale(t, c);
    }
    return total;
}

Polynomial Polynomial::remap(int new_nvars, const std::vector<int>& new_index) const {
    Polynomial r(new_nvars);
    for (auto& [m, c] : terms_) {
        Monomial d(new_nvars, 0);
        for (int i = 0; i < nv_; i++) {
            if (m[i] == 0) continue;
            if (new_index[i] < 0 || new_index[i] >= new_nvars)
                throw std::invalid_argument("remap drops a used variable");
            d[new_index[i]] += m[i];
        }
        r.add_term(d, c);
    }
    return r;
}

Polynomial Polynomial::extended(int new_nvars) const {
    std::vector<int> idx(nv_);
    for (int i = 0; i < nv_; i++) idx[i] = i;
    return remap(new_nvars, idx);
}

Polynomial Polynomial::normalized() const {
    if (terms_.empty()) return *this;
    // gcd of numerators over lcm of denominators, sign from leading term
    Integer num_gcd(0), den_lcm(1);
    for (auto& [m, c] : terms_) {
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
    }
    Rational scale(den_lcm, num_gcd);
    scale.canonicalize();
    if (sign(terms_.rbegin()->second) < 0) scale = -scale;
    return *this * scale;
}

std::vector<int> Polynomial::used_vars() const {
    std::vector<int> out;
    for (int i = 0; i < nv_; i++) {
        for (auto& [m, c] : terms_)
            if (m[i] > 0) { out.push_back(i); break; }
    }
    return out;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // highest term first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational a = c;
        if (first) {
            if (sign(a) < 0) { os << "-"; a = -a; }
        } else {
            os << (sign(a) < 0 ? " - " : " + ");
            if (sign(a) < 0) a = -a;
        }
        first = false;
        bool any_var = false;
        for (unsigned e : m) any_var = any_var || e > 0;
        if (!any_var || a != 1) os << a;
        bool need_star = !any_var || a != 1;
        for (int i = 0; i < nv_; i++) {
            if (m[i] == 0) continue;
            if (need_star) os << "*";
            os << names[i];
            if (m[i] > 1) os << "^" << m[i];
            need_star = true;
        }
    }
    return os.str();
}

std::string Polynomial::to_string() const {
    std::vector<std::string> names;
    for (int i = 0; i < nv_; i++) names.push_back("x" + std::to_string(i + 1));
    return to_string(names);
}

std::optional<Polynomial> try_exact_divide(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) return std::nullopt;
    if (a.nvars() != b.nvars()) return std::nullopt;
    int nv = a.nvars();
    Polynomial rem = a, quot(nv);
    const auto& bl = *b.terms().rbegin();  // leading term of b (grlex)
    while (!rem.is_zero()) {
        const auto& rl = *rem.terms().rbegin();
        Monomial q(nv);
        for (int i = 0; i < nv; i++) {
            if (rl.first[i] < bl.first[i]) return std::nullopt;
            q[i] = rl.first[i] - bl.first[i];
        }
        Rational qc = rl.second / bl.second;
        Polynomial term(nv);
        term.add_term(q, qc);
        quot = quot + term;
        rem = rem - term * b;
    }
    return quot;
}

Polynomial exact_divide(const Polynomial& a, const Polynomial& b) {
    auto q = try_exact_divide(a, b);
    if (!q) throw std::domain_error("inexact polynomial division");
    return *q;
}

namespace {

// Pseudo-remainder of a by b in var (b nonzero in var).
Polynomial pseudo_rem(const Polynomial& a, const Polynomial& b, int var) {
    int db = b.degree(var);
    Polynomial lb = b.leading_coeff(var);
    Polynomial r = a;
    while (!r.is_zero() && r.degree(var) >= db) {
        int dr = r.degree(var);
        Polynomial lr = r.leading_coeff(var);
        // r := lb*r - lr*x^(dr-db)*b
        Polynomial shift = Polynomial::mono(a.nvars(), var, (unsigned)(dr - db), 1);
        r = r * lb - b * shift * lr;
        if (!r.is_zero() && r.degree(var) == dr)
            throw std::logic_error("pseudo_rem failed to reduce degree");
    }
    return r;
}

// Remainder of univariate a by b over Q (monic reduction, no content games).
Polynomial uni_rem(Polynomial a, const Polynomial& b) {
    int db = b.degree(0);
    Rational lb = b.leading_coeff(0).constant_value();
    while (!a.is_zero() && a.degree(0) >= db) {
        int da = a.degree(0);
        Rational q = a.leading_coeff(0).constant_value() / lb;
        a = a - b * Polynomial::mono(1, 0, (unsigned)(da - db), q);
    }
    return a;
}

int uni_gcd_degree(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        Polynomial r = uni_rem(a, b);
        a = b;
        b = std::move(r);
    }
    return a.degree(0);
}

// ---- modular coprimality certificate ----------------------------------
// Euclid over GF(p) is a sound upper bound on the rational gcd degree:
// deg(gcd mod p) >= deg(gcd over Q) whenever p divides no denominator and
// no leading coefficient. Degree 0 mod p therefore certifies coprimality
// without any big-number arithmetic.

unsigned long modpow(unsigned long b, unsigned long e, unsigned long p) {
    unsigned long r = 1;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// coefficient vector of a univariate polynomial reduced mod p; false when p
// divides a denominator or the leading coefficient
bool coeffs_modp(const Polynomial& f, unsigned long p,
                 std::vector<unsigned long>& out) {
    int d = f.degree(0);
    out.assign((std::size_t)d + 1, 0);
    for (int k = 0; k <= d; k++) {
        Rational c = f.coeff(0, (unsigned)k).constant_value();
        unsigned long den = mpz_fdiv_ui(c.get_den().get_mpz_t(), p);
        if (den == 0) return false;
        unsigned long num = mpz_fdiv_ui(c.get_num().get_mpz_t(), p);
        out[(std::size_t)k] = num * modpow(den, p - 2, p) % p;
    }
    return out.back() != 0;
}

// degree of gcd(a, b) in GF(p)[x]; -1 when p is unusable
int uni_gcd_degree_modp(const Polynomial& a, const Polynomial& b,
                        unsigned long p) {
    std::vector<unsigned long> u, v;
    if (!coeffs_modp(a, p, u) || !coeffs_modp(b, p, v)) return -1;
    if (u.size() < v.size()) u.swap(v);
    while (!v.empty()) {
        // u := u mod v
        unsigned long inv = modpow(v.back(), p - 2, p);
        while (u.size() >= v.size()) {
            unsigned long q = u.back() * inv % p;
            std::size_t off = u.size() - v.size();
            for (std::size_t i = 0; i < v.size(); i++)
                u[off + i] = (u[off + i] + p - q * v[i] % p) % p;
            while (!u.empty() && u.back() == 0) u.pop_back();
            if (u.empty()) break;
        }
        u.swap(v);
    }
    return (int)u.size() - 1;
}

// Degree of gcd(a|point, b|point) in var after substituting a deterministic
// rational point for every other variable; -1 when the point degrades the
// leading coefficients (try another salt).
int specialized_gcd_degree(const Polynomial& a, const Polynomial& b, int var,
                           int salt) {
    Polynomial fa = a, fb = b;
    std::vector<int> all = fa.used_vars();
    for (int v : fb.used_vars())
        if (std::find(all.begin(), all.end(), v) == all.end()) all.push_back(v);
    for (int v : all) {
        if (v == var) continue;
        Rational val(2 * salt + 7 * v + 3, 2 + salt);
        val.canonicalize();
        fa = fa.subst(v, val);
        fb = fb.subst(v, val);
    }
    if (fa.degree(var) != a.degree(var) || fb.degree(var) != b.degree(var)) return -1;
    std::vector<int> idx(a.nvars(), 0);
    idx[var] = 0;
    Polynomial ua = fa.remap(1, idx), ub = fb.remap(1, idx);
    // Try the cheap modular certificate first; a positive modular degree is
    // still a safe answer (an over-estimate only makes the caller take the
    // exact PRS path).
    for (unsigned long p : {2147483629UL, 2147483587UL, 2147483563UL}) {
        int d = uni_gcd_degree_modp(ua, ub, p);
        if (d >= 0) return d;
    }
    return uni_gcd_degree(ua, ub);
}

// Univariate-content-free gcd driver: gcd in Q[vars], recursive on the set of
// used variables (primitive PRS on the highest used variable).
Polynomial gcd_impl(Polynomial a, Polynomial b) {
    if (a.is_zero()) return b.normalized();
    if (b.is_zero()) return a.normalized();
    if (a.is_constant() || b.is_constant())
        return Polynomial::constant(a.nvars(), 1);
    auto ua = a.used_vars(), ub = b.used_vars();
    int var = std::max(ua.back(), ub.back());
    if (a.degree(var) == 0 || b.degree(var) == 0) {
        // var appears in only one of them: gcd divides that one's content
        Polynomial ca = content(a, var), cb = content(b, var);
        return gcd_impl(ca, cb);
    }
    Polynomial ca = content(a, var), cb = content(b, var);
    Polynomial cont = gcd_impl(ca, cb);
    a = exact_divide(a, ca);
    b = exact_divide(b, cb);
    // If the images at a degree-preserving specialization are coprime in var,
    // the primitive parts are coprime (a degree-0-in-var common factor would
    // divide the content, which is 1), so only the content gcd remains.
    for (int salt = 0; salt < 3; salt++) {
        int d = specialized_gcd_degree(a, b, var, salt);
        if (d < 0) continue;
        if (d == 0) return cont.normalized();
        break;
    }
    if (a.degree(var) < b.degree(var)) std::swap(a, b);
    // primitive PRS
    while (true) {
        Polynomial r = pseudo_rem(a, b, var);
        if (r.is_zero()) break;
        r = primitive_part(r, var);
        a = b;
        b = r;
        if (b.degree(var) == 0) {
            b = Polynomial::constant(a.nvars(), 1);
            break;
        }
    }
    return (cont * primitive_part(b, var)).normalized();
}

} // namespace

Polynomial content(const Polynomial& f, int var) {
    if (f.is_zero()) return f;
    int d = f.degree(var);
    Polynomial g(f.nvars());
    for (int k = 0; k <= d; k++) {
        Polynomial c = f.coeff(var, (unsigned)k);
        if (c.is_zero()) continue;
        g = gcd_impl(g, c);
        if (g.is_constant()) break;
    }
    if (g.is_zero()) g = Polynomial::constant(f.nvars(), 1);
    return g;
}

Polynomial primitive_part(const Polynomial& f, int var) {
    if (f.is_zero()) return f;
    return exact_divide(f, content(f, var)).normalized();
}

Polynomial gcd(const Polynomial& a, const Polynomial& b) { return gcd_impl(a, b); }

Polynomial squarefree_part(const Polynomial& f) {
    if (f.is_zero() || f.is_constant()) return f.normalized();
    // gcd(f, all partial derivatives) collects every repeated factor exactly
    // once less than its multiplicity (char 0), so f / gcd is square-free.
    Polynomial g = f.normalized();
    Polynomial c = g;
    for (int v : f.used_vars()) {
        if (c.is_constant()) break;
        Polynomial d = g.derivative(v);
        if (d.is_zero()) continue;
        c = gcd(c, d);
    }
    if (c.is_constant()) return g;
    return exact_divide(g, c).normalized();
}

namespace {

// Fraction-free (Bareiss) determinant of a square polynomial matrix.
Polynomial poly_determinant(std::vector<std::vector<Polynomial>> M, int nv) {
    int n = (int)M.size();
    if (n == 0) return Polynomial::constant(nv, 1);
    Polynomial prev = Polynomial::constant(nv, 1);
    int swaps = 0;
    for (int k = 0; k < n - 1; k++) {
        if (M[k][k].is_zero()) {
            int piv = -1;
            for (int i = k + 1; i < n; i++)
                if (!M[i][k].is_zero()) { piv = i; break; }
            if (piv < 0) return Polynomial(nv);  // singular
            std::swap(M[k], M[piv]);
            swaps++;
        }
        for (int i = k + 1; i < n; i++) {
            for (int j = k + 1; j < n; j++) {
                Polynomial num = M[i][j] * M[k][k] - M[i][k] * M[k][j];
                M[i][j] = exact_divide(num, prev);
            }
            M[i][k] = Polynomial(nv);
        }
        prev = M[k][k];
    }
    Polynomial det = M[n - 1][n - 1];
    if (swaps % 2) det = -det;
    return det;
}

} // namespace

std::vector<Polynomial> psc_determinant(const Polynomial& f,
                                        const Polynomial& g,
                                        int var) {
    // psc_j as the determinant of the order-(df+dg-2j) submatrix of the
    // Sylvester-style matrix: rows x^(dg-j-1)f..f, x^(df-j-1)g..g; columns are
    // the coefficients of x^(df+dg-j-1)..x^(j+1) and x^j.
    int df = f.degree(var), dg = g.degree(var);
    if (df < 1 || dg < 1)
        throw std::invalid_argument("psc requires positive degrees");
    int nv = f.nvars();
    int nout = std::min(df, dg);
    std::vector<Polynomial> psc;
    psc.reserve(nout);
    for (int j = 0; j < nout; j++) {
        int rows = df + dg - 2 * j;
        // column degrees: df+dg-j-1 down to j+1, then j
        std::vector<int> coldeg;
        for (int d = df + dg - j - 1; d >= j + 1; d--) coldeg.push_back(d);
        coldeg.push_back(j);
        coldeg.resize(rows);  // rows-1 leading columns + the x^j column
        std::vector<std::vector<Polynomial>> M(rows, std::vector<Polynomial>(rows, Polynomial(nv)));
        auto fill_row = [&](int row, const Polynomial& p, int shift) {
            // row holds coefficients of x^shift * p
            for (int c = 0; c < rows; c++) {
                int want = coldeg[c] - shift;
                if (want >= 0) M[row][c] = p.coeff(var, (unsigned)want);
            }
        };
        int row = 0;
        for (int s = dg - j - 1; s >= 0; s--) fill_row(row++, f, s);
        for (int s = df - j - 1; s >= 0; s--) fill_row(row++, g, s);
        psc.push_back(poly_determinant(std::move(M), nv));
    }
    return psc;
}

namespace {

// Canonical pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b in var.
// The fixed power of lc(b) (rather than one factor per reduction step) is what
// the subresultant recurrences below assume.
Polynomial canonical_prem(const Polynomial& a, const Polynomial& b, int var) {
    int da = a.degree(var), db = b.degree(var);
    Polynomial lb = b.leading_coeff(var);
    Polynomial r = a;
    int mult = 0;
    while (!r.is_zero() && r.degree(var) >= db) {
        int dr = r.degree(var);
        Polynomial lr = r.leading_coeff(var);
        Polynomial shift = Polynomial::mono(a.nvars(), var, (unsigned)(dr - db), 1);
        r = r * lb - b * shift * lr;
        mult++;
        if (!r.is_zero() && r.degree(var) == dr)
            throw std::logic_error("canonical_prem failed to reduce degree");
    }
    for (int need = da - db + 1; mult < need; mult++) r = r * lb;
    return r;
}

} // namespace

std::vector<Polynomial> principal_subresultant_coeffs(const Polynomial& f,
                                                      const Polynomial& g,
                                                      int var) {
    // Subresultant pseudo-remainder sequence (Brown-Traub). One pseudo-division
    // per degree block yields the whole chain, unlike the determinant form
    // (psc_determinant, kept as the reference for tests) which pays a Bareiss
    // elimination per index. Entries agree with the determinants up to sign,
    // which is all sign-invariance arguments consume.
    //
    // Facts used, for the sequence R_1 = f, R_2 = g, R_{i+1} =
    // prem(R_{i-1}, R_i) / (g_i * h_i^d): R_{i+1} = +-S_{deg(R_i) - 1}, the
    // intermediate psc vanish inside a defective block, and the running h
    // value after each step equals +-psc_{deg R_i}.
    int df = f.degree(var), dg = g.degree(var);
    if (df < 1 || dg < 1)
        throw std::invalid_argument("psc requires positive degrees");
    int nv = f.nvars();
    int nout = std::min(df, dg);
    std::vector<Polynomial> psc(nout, Polynomial(nv));
    Polynomial a = f, b = g;
    if (df < dg) std::swap(a, b);
    Polynomial one = Polynomial::constant(nv, 1);
    Polynomial gg = one, h = one;
    while (true) {
        int da = a.degree(var), db = b.degree(var);
        int d = da - db;
        Polynomial r = db == 0 ? Polynomial(nv) : canonical_prem(a, b, var);
        if (r.is_zero()) {
            // gcd has degree db; psc_db is the last nonzero coefficient
            if (db < nout) {
                Polynomial hn = b.leading_coeff(var).pow((unsigned)d);
                for (int k = 0; k < d - 1; k++) hn = exact_divide(hn, h);
                psc[db] = hn;
            }
            break;
        }
        Polynomial divisor = gg * h.pow((unsigned)d);
        a = b;
        b = exact_divide(r, divisor);
        // S_{deg(old b) - 1} = +-b; inside a defective block the psc are zero,
        // which the coefficient extraction reports automatically
        da = a.degree(var);
        if (da - 1 < nout) psc[da - 1] = b.coeff(var, (unsigned)(da - 1));
        gg = a.leading_coeff(var);
        Polynomial hn = gg.pow((unsigned)d);
        for (int k = 0; k < d - 1; k++) hn = exact_divide(hn, h);
        h = hn;
        if (da < nout) psc[da] = h;
    }
    return psc;
}

Polynomial sylvester_determinant(const Polynomial& f, const Polynomial& g, int var) {
    int df = f.degree(var), dg = g.degree(var);
    int nv = f.nvars();
    if (df <= 0 && dg <= 0)
        throw std::domain_error("undefined resultant: both arguments constant in variable");
    if (df <= 0) return f.pow((unsigned)dg);
    if (dg <= 0) return g.pow((unsigned)df);
    int n = df + dg;
    // rows: dg shifts of f, then df shifts of g
    std::vector<std::vector<Polynomial>> M(n, std::vector<Polynomial>(n, Polynomial(nv)));
    for (int i = 0; i < dg; i++)
        for (int k = 0; k <= df; k++) M[i][i + (df - k)] = f.coeff(var, (unsigned)k);
    for (int i = 0; i < df; i++)
        for (int k = 0; k <= dg; k++) M[dg + i][i + (dg - k)] = g.coeff(var, (unsigned)k);
    return poly_determinant(std::move(M), nv);
}

Polynomial resultant(const Polynomial& f, const Polynomial& g, int var) {
    return sylvester_determinant(f, g, var);
}

Polynomial discriminant(const Polynomial& f, int var) {
    Polynomial d = f.derivative(var);
    if (d.is_zero() || f.degree(var) < 1) return Polynomial(f.nvars());
    return resultant(f, d, var);
}

} // namespace cono
