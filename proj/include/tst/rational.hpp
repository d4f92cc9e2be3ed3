#pragma once

#include <gmpxx.h>

#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace tst {

// Thrown when an input is structurally valid but outside a configured
// feasibility budget (tree-count caps, enumeration budgets). Maps to CLI
// exit code 2, as opposed to std::invalid_argument (exit code 1).
class RefusalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact rational number. Thin value wrapper over GMP's mpq_class that keeps
// values canonical and never leaks gmpxx expression templates.
class Rat {
public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}  // NOLINT: implicit integer promotion is intended
    Rat(long num, long den);
    // Parses "n", "-n", or "n/d" (d > 0 after canonicalization). Throws
    // std::invalid_argument on any other shape.
    explicit Rat(const std::string& s);

    // Exact binary-float conversion (every double is a dyadic rational).
    static Rat from_double(double d);

    std::string str() const;
    double to_double() const { return v_.get_d(); }
    int sgn() const { return mpq_sgn(v_.get_mpq_t()); }

    friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ + b.v_)); }
    friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ - b.v_)); }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ * b.v_)); }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.sgn() == 0) throw std::invalid_argument("Rat: division by zero");
        return Rat(mpq_class(a.v_ / b.v_));
    }
    Rat operator-() const { return Rat(mpq_class(-v_)); }

    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) >= 0; }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    explicit Rat(mpq_class v) : v_(std::move(v)) {}
    mpq_class v_;
};

}  // namespace tst
