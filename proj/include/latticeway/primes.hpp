#pragma once

#include <cmath>
#include <stdexcept>

namespace latticeway {

inline bool is_prime(long long n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (long long d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/**
 * Nearest prime to a positive real target; ties between an upper and a
 * lower prime at equal distance resolve upward.
 */
inline long long nearest_prime(double target) {
    if (!(target > 0) || !std::isfinite(target)) throw std::invalid_argument("nearest_prime needs finite target > 0");
    if (target <= 2.0) return 2;
    long long lo = static_cast<long long>(std::floor(target));
    while (lo >= 2 && !is_prime(lo)) --lo;
    long long hi = static_cast<long long>(std::ceil(target));
    while (!is_prime(hi)) ++hi;
    if (lo < 2) return hi;
    double dlo = target - static_cast<double>(lo);
    double dhi = static_cast<double>(hi) - target;
    return dhi <= dlo ? hi : lo;
}

// canonical representative of v modulo p in [0, p)
inline long long mod_reduce(long long v, long long p) {
    long long r = v % p;
    return r < 0 ? r + p : r;
}

// centered representative of v modulo p, in (-p/2, p/2]
inline long long mod_centered(long long v, long long p) {
    long long r = mod_reduce(v, p);
    return 2 * r > p ? r - p : r;
}

// modular inverse via extended gcd; requires gcd(a, p) = 1
inline long long mod_inverse(long long a, long long p) {
    long long r0 = mod_reduce(a, p), r1 = p;
    long long s0 = 1, s1 = 0;
    while (r1 != 0) {
        long long q = r0 / r1;
        long long rt = r0 - q * r1;
        r0 = r1;
        r1 = rt;
        long long st = s0 - q * s1;
        s0 = s1;
        s1 = st;
    }
    if (r0 != 1) throw std::invalid_argument("non-invertible coefficient");
    return mod_reduce(s0, p);
}

}  // namespace latticeway
