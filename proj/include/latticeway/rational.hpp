#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace latticeway {

using int128 = __int128;

inline int128 abs128(int128 v) { return v < 0 ? -v : v; }

inline int128 gcd128(int128 a, int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// floor(a/b) for b > 0
inline int128 floordiv128(int128 a, int128 b) {
    int128 q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

// ceil(a/b) for b > 0
inline int128 ceildiv128(int128 a, int128 b) { return -floordiv128(-a, b); }

/**
 * Exact rational with 64-bit numerator/denominator, kept in lowest terms
 * with a positive denominator. Intermediates run in 128 bits; a result
 * that cannot be reduced back into 64 bits throws std::overflow_error.
 */
class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(long long n) : num_(n), den_(1) {}
    Rat(long long n, long long d) { *this = make(n, d); }

    static Rat make(int128 n, int128 d) {
        if (d == 0) throw std::invalid_argument("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        int128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr int128 lim = 0x7fffffffffffffffLL;
        if (abs128(n) > lim || d > lim) throw std::overflow_error("rational overflow");
        Rat r;
        r.num_ = static_cast<long long>(n);
        r.den_ = static_cast<long long>(d);
        return r;
    }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_positive() const { return num_ > 0; }
    bool is_integer() const { return den_ == 1; }

    long long as_integer() const {
        if (den_ != 1) throw std::invalid_argument("rational is not an integer");
        return num_;
    }

    Rat operator-() const { return make(-static_cast<int128>(num_), den_); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return make(static_cast<int128>(a.num_) * b.den_ + static_cast<int128>(b.num_) * a.den_,
                    static_cast<int128>(a.den_) * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return make(static_cast<int128>(a.num_) * b.num_, static_cast<int128>(a.den_) * b.den_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::invalid_argument("rational division by zero");
        return make(static_cast<int128>(a.num_) * b.den_, static_cast<int128>(a.den_) * b.num_);
    }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return static_cast<int128>(a.num_) * b.den_ < static_cast<int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    Rat abs() const { return num_ < 0 ? -*this : *this; }

    long long floor() const { return static_cast<long long>(floordiv128(num_, den_)); }

    /**
     * Round to the nearest integer; quotients exactly halfway between two
     * integers round toward -inf, so the residue x - round(x) lies in
     * (-1/2, 1/2] of the step. This is the quantizer tie rule used
     * throughout the lattice operations.
     */
    long long round_half_down() const {
        // ceil((2n - d) / (2d))
        int128 q = ceildiv128(2 * static_cast<int128>(num_) - den_, 2 * static_cast<int128>(den_));
        return static_cast<long long>(q);
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // "3", "-7/2"
    static Rat parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rat(std::stoll(s));
            return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw std::invalid_argument("malformed rational: " + s);
        }
    }

private:
    long long num_;
    long long den_;
};

// gcd of two positive rationals: gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)
inline Rat rat_gcd(const Rat& a, const Rat& b) {
    if (!a.is_positive() || !b.is_positive()) throw std::invalid_argument("rat_gcd needs positive inputs");
    int128 n = gcd128(static_cast<int128>(a.num()) * b.den(), static_cast<int128>(b.num()) * a.den());
    return Rat::make(n, static_cast<int128>(a.den()) * b.den());
}

// true iff b/a is an integer
inline bool rat_divides(const Rat& a, const Rat& b) { return (b / a).is_integer(); }

/**
 * Largest rational with denominator 2^precision_bits whose square does not
 * exceed x. Used to turn power budgets into exact codeword scales without
 * ever exceeding the budget.
 */
inline Rat rational_sqrt_floor(double x, int precision_bits = 20) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("rational_sqrt_floor needs finite x >= 0");
    if (x == 0) return Rat(0);
    const long long den = 1LL << precision_bits;
    long long num = static_cast<long long>(std::floor(std::sqrt(x) * static_cast<double>(den)));
    auto sq_leq = [&](long long n) {
        long double lhs = static_cast<long double>(n) * static_cast<long double>(n);
        long double rhs = static_cast<long double>(x) * static_cast<long double>(den) * static_cast<long double>(den);
        return lhs <= rhs;
    };
    while (num > 0 && !sq_leq(num)) --num;
    while (sq_leq(num + 1)) ++num;
    return Rat(num, den);
}

}  // namespace latticeway
