#include "tst/rational.hpp"

#include <cctype>

namespace tst {

namespace {

// Strict shape check: [+-]? digits ( '/' digits )?
bool valid_rational_literal(const std::string& s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) { ++i; ++digits; }
    if (digits == 0) return false;
    if (i == s.size()) return true;
    if (s[i] != '/') return false;
    ++i;
    digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) { ++i; ++digits; }
    return digits > 0 && i == s.size();
}

}  // namespace

Rat::Rat(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rat::Rat(const std::string& s) {
    if (!valid_rational_literal(s))
        throw std::invalid_argument("Rat: cannot parse '" + s + "' (expected n or n/d)");
    v_ = mpq_class(s[0] == '+' ? s.substr(1) : s);  // mpq_set_str rejects a leading '+'
    if (v_.get_den() == 0) throw std::invalid_argument("Rat: zero denominator in '" + s + "'");
    v_.canonicalize();
}

Rat Rat::from_double(double d) {
    Rat r;
    r.v_ = mpq_class(d);
    r.v_.canonicalize();
    return r;
}

std::string Rat::str() const { return v_.get_str(); }

}  // namespace tst
