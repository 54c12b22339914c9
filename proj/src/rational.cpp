#include "conoscope/rational.hpp"

#include <sstream>

namespace cono {

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rational q(text);
        q.canonicalize();
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
        return q;
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac = text.size() - dot - 1;
        Integer num(digits);
        Integer den(1);
        for (std::size_t i = 0; i < frac; i++) den *= 10;
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    Rational q(text);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

std::string to_decimal(const Rational& q, int digits) {
    if (digits < 1) digits = 1;
    Integer scale(1);
    for (int i = 0; i < digits; i++) scale *= 10;
    Rational scaled = q * scale;
    Integer rounded;
    // round half away from zero
    Integer num = scaled.get_num(), den = scaled.get_den();
    Integer twice = 2 * num;
    Integer qpart, rpart;
    mpz_fdiv_qr(qpart.get_mpz_t(), rpart.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    rounded = (2 * rpart >= den) ? qpart + 1 : qpart;
    bool neg = rounded < 0;
    Integer mag = abs(rounded);
    std::string s = mag.get_str();
    if ((int)s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
    if (neg) s.insert(0, "-");
    return s;
}

} // namespace cono
