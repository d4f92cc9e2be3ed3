#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tst/rational.hpp"

namespace tst {

// The solver is generic over the scalar type N: exact rationals (Rat, the
// default) or double with one global relative comparison tolerance.
template <class N>
struct numeric_traits;

template <>
struct numeric_traits<Rat> {
    static constexpr bool exact = true;
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static Rat from_ratio(long n, long d) { return Rat(n, d); }
    static bool eq(const Rat& a, const Rat& b) { return a == b; }
    static bool lt(const Rat& a, const Rat& b) { return a < b; }
    static bool is_zero(const Rat& a) { return a.sgn() == 0; }
    static double to_double(const Rat& a) { return a.to_double(); }
    static std::string str(const Rat& a) { return a.str(); }
    static Rat parse(const std::string& s) { return Rat(s); }
};

template <>
struct numeric_traits<double> {
    static constexpr bool exact = false;
    static constexpr double tol = 1e-12;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_ratio(long n, long d) { return static_cast<double>(n) / static_cast<double>(d); }
    static bool eq(double a, double b) {
        return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
    }
    static bool lt(double a, double b) { return a < b && !eq(a, b); }
    static bool is_zero(double a) { return eq(a, 0.0); }
    static double to_double(double a) { return a; }
    static std::string str(double a) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", a);
        return buf;
    }
    static double parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("cannot parse empty number");
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size())
            throw std::invalid_argument("cannot parse '" + s + "' as a number");
        return v;
    }
};

// Extended nonnegative value in [0, +inf]; the home of g-indices and lambda.
template <class N>
struct Ext {
    bool inf_ = false;
    N val{};

    Ext() : val(numeric_traits<N>::zero()) {}
    Ext(N v) : val(std::move(v)) {}  // NOLINT: implicit finite lift is intended
    static Ext infinity() {
        Ext e;
        e.inf_ = true;
        return e;
    }

    bool is_inf() const { return inf_; }
    const N& finite() const {
        if (inf_) throw std::logic_error("Ext: finite() on +inf");
        return val;
    }

    friend bool operator==(const Ext& a, const Ext& b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
        return numeric_traits<N>::eq(a.val, b.val);
    }
    friend bool operator!=(const Ext& a, const Ext& b) { return !(a == b); }
    // Total order with +inf as the top element; finite comparison respects the
    // numeric mode's tolerance.
    friend bool operator<(const Ext& a, const Ext& b) {
        if (b.inf_) return !a.inf_;
        if (a.inf_) return false;
        return numeric_traits<N>::lt(a.val, b.val);
    }
    friend bool operator>(const Ext& a, const Ext& b) { return b < a; }
    friend bool operator<=(const Ext& a, const Ext& b) { return !(b < a); }
    friend bool operator>=(const Ext& a, const Ext& b) { return !(a < b); }

    std::string str() const { return inf_ ? "inf" : numeric_traits<N>::str(val); }

    friend std::ostream& operator<<(std::ostream& os, const Ext& e) { return os << e.str(); }
};

using GValue = Ext<Rat>;

}  // namespace tst
