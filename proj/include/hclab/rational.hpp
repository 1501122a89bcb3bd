#ifndef HCLAB_RATIONAL_HPP
#define HCLAB_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hclab {

// Exact rational with 64-bit numerator/denominator. Intermediates go through
// __int128; any result that does not reduce back into int64 throws.
// Denominator is kept positive and gcd-reduced, so equality is bitwise.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational: zero denominator");
        __int128 nn = n, dd = d;
        if (dd < 0) { nn = -nn; dd = -dd; }
        reduce_assign(nn, dd);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                       i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                       i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational: divide by zero");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

    Rational& operator+=(const Rational& b) { *this = *this + b; return *this; }
    Rational& operator-=(const Rational& b) { *this = *this - b; return *this; }
    Rational& operator*=(const Rational& b) { *this = *this * b; return *this; }
    Rational& operator/=(const Rational& b) { *this = *this / b; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    using i128 = __int128;

    static Rational from128(i128 n, i128 d) {
        Rational r;
        if (d < 0) { n = -n; d = -d; }
        r.reduce_assign(n, d);
        return r;
    }

    void reduce_assign(i128 n, i128 d) {
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("rational: 64-bit overflow");
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d);
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace hclab

#endif
