#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "latticeway/primes.hpp"
#include "latticeway/rational.hpp"

namespace latticeway {

/// Real-valued n-vector; only channel noise introduces these.
using RealVector = std::vector<double>;

inline void check_finite(const RealVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("invalid vector");
}

/**
 * A nested lattice pair over the cubic coarse lattice a*Z^n.
 *
 * The fine lattice comes from Construction A: scale the one-generator
 * linear code {G*w : w in F_P} into the cell by 1/P and tile by a*Z^n,
 * so the codebook {fine ∩ V(coarse)} has exactly P points.
 */
struct LatticeSpec {
    int dimension;                       // n
    long long prime_order;               // P, prime >= 2
    Rat coarse_scale;                    // a > 0; coarse lattice is a*Z^n
    std::vector<long long> generator;    // G, entries in [0, P), not all zero

    LatticeSpec(int n, long long p, Rat a, std::vector<long long> g)
        : dimension(n), prime_order(p), coarse_scale(a), generator(std::move(g)) {
        if (n < 1) throw std::invalid_argument("dimension must be positive");
        if (!is_prime(p)) throw std::invalid_argument("prime_order must be prime");
        if (!a.is_positive()) throw std::invalid_argument("coarse_scale must be positive");
        if (static_cast<int>(generator.size()) != n) throw std::invalid_argument("generator length != dimension");
        bool nonzero = false;
        for (long long gi : generator) {
            if (gi < 0 || gi >= p) throw std::invalid_argument("generator entry out of field range");
            nonzero |= (gi != 0);
        }
        if (!nonzero) throw std::invalid_argument("generator must be nonzero");
    }

    /// all-ones generator, the default used by the protocol planner
    static LatticeSpec cubic(int n, long long p, Rat a) {
        return LatticeSpec(n, p, a, std::vector<long long>(static_cast<std::size_t>(n), 1));
    }

    Rat fine_step() const { return coarse_scale / Rat(prime_order); }  // a/P
};

/**
 * Exact lattice point: integer coordinates at a positive rational scale,
 * real point x = scale * coords. All protocol-path arithmetic stays here;
 * doubles appear only after channel noise.
 */
struct CodePoint {
    std::vector<long long> coords;
    Rat scale;

    CodePoint() : scale(1) {}
    CodePoint(std::vector<long long> k, Rat s) : coords(std::move(k)), scale(s) {
        if (!s.is_positive()) throw std::invalid_argument("scale must be positive");
    }

    static CodePoint zero(int n, Rat s = Rat(1)) {
        return CodePoint(std::vector<long long>(static_cast<std::size_t>(n), 0), s);
    }

    std::size_t size() const { return coords.size(); }

    RealVector to_reals() const {
        RealVector out(coords.size());
        double s = scale.to_double();
        for (std::size_t j = 0; j < coords.size(); ++j) out[j] = s * static_cast<double>(coords[j]);
        return out;
    }

    /// coordinates re-expressed at a finer scale t (t must divide scale)
    CodePoint rescaled_to(const Rat& t) const {
        Rat ratio = scale / t;
        if (!ratio.is_integer()) throw std::invalid_argument("incompatible scales");
        long long m = ratio.as_integer();
        CodePoint out(coords, t);
        for (auto& k : out.coords) k *= m;
        return out;
    }

    friend CodePoint operator+(const CodePoint& a, const CodePoint& b) {
        if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
        if (rat_divides(b.scale, a.scale)) {
            CodePoint bb = b.rescaled_to(b.scale);  // copy
            CodePoint aa = a.rescaled_to(b.scale);
            for (std::size_t j = 0; j < aa.size(); ++j) aa.coords[j] += bb.coords[j];
            return aa;
        }
        if (rat_divides(a.scale, b.scale)) {
            CodePoint bb = b.rescaled_to(a.scale);
            for (std::size_t j = 0; j < bb.size(); ++j) bb.coords[j] += a.coords[j];
            return bb;
        }
        throw std::invalid_argument("incompatible scales");
    }

    friend CodePoint operator*(long long m, const CodePoint& p) {
        CodePoint out = p;
        for (auto& k : out.coords) k *= m;
        return out;
    }

    friend CodePoint operator*(const Rat& r, const CodePoint& p) {
        if (!r.is_positive()) throw std::invalid_argument("scale must stay positive");
        return CodePoint(p.coords, p.scale * r);
    }
};

/// exact equality as real points (representations may differ in scale)
inline bool same_point(const CodePoint& a, const CodePoint& b) {
    if (a.size() != b.size()) return false;
    Rat g = rat_gcd(a.scale, b.scale);
    long long ma = (a.scale / g).as_integer();
    long long mb = (b.scale / g).as_integer();
    for (std::size_t j = 0; j < a.size(); ++j)
        if (static_cast<int128>(a.coords[j]) * ma != static_cast<int128>(b.coords[j]) * mb) return false;
    return true;
}

/**
 * Nearest-neighbor quantizer onto theta*a*Z^n. For the cubic coarse
 * lattice this is coordinate-wise rounding of x/(theta*a); quotient ties
 * round toward -inf, so residues land in (-theta*a/2, theta*a/2].
 */
inline CodePoint quantize(const RealVector& x, const Rat& theta, const LatticeSpec& spec) {
    check_finite(x);
    if (!theta.is_positive()) throw std::invalid_argument("theta must be positive");
    if (static_cast<int>(x.size()) != spec.dimension) throw std::invalid_argument("dimension mismatch");
    const double step = (theta * spec.coarse_scale).to_double();
    std::vector<long long> k(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double t = x[j] / step;
        double q = std::floor(t + 0.5);
        if (q - t == 0.5) q -= 1.0;  // half rounds down
        k[j] = static_cast<long long>(q);
    }
    return CodePoint(std::move(k), theta * spec.coarse_scale);
}

/// x mod theta*Lambda = x - Q(x), coordinates in (-theta*a/2, theta*a/2]
inline RealVector mod_lattice(const RealVector& x, const Rat& theta, const LatticeSpec& spec) {
    CodePoint q = quantize(x, theta, spec);
    const double step = (theta * spec.coarse_scale).to_double();
    RealVector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] - step * static_cast<double>(q.coords[j]);
    return out;
}

/// exact mod for lattice points; result shares a common refinement scale
inline CodePoint mod_lattice(const CodePoint& x, const Rat& theta, const LatticeSpec& spec) {
    if (!theta.is_positive()) throw std::invalid_argument("theta must be positive");
    if (static_cast<int>(x.size()) != spec.dimension) throw std::invalid_argument("dimension mismatch");
    const Rat step = theta * spec.coarse_scale;
    const Rat common = rat_gcd(x.scale, step);
    CodePoint out = x.rescaled_to(common);
    const long long stride = (step / common).as_integer();
    for (auto& k : out.coords) {
        long long q = Rat(k, stride).round_half_down();
        k -= q * stride;
    }
    return out;
}

/// second moment per dimension of a uniform distribution over V(theta*Lambda)
inline Rat second_moment(const Rat& theta, const LatticeSpec& spec) {
    if (!theta.is_positive()) throw std::invalid_argument("theta must be positive");
    Rat step = theta * spec.coarse_scale;
    return step * step / Rat(12);
}

/**
 * Test oracle for the two scaling rules:
 *   (alpha (s mod L)) mod L == (alpha s) mod L        alpha integer
 *   beta (s mod L)          == (beta s) mod beta L    beta > 0 rational
 * Both are checked exactly for this s.
 */
inline bool scale_identity_check(const CodePoint& s, long long alpha, const Rat& beta, const LatticeSpec& spec) {
    const Rat one(1);
    CodePoint reduced = mod_lattice(s, one, spec);

    CodePoint lhs1 = mod_lattice(alpha * reduced, one, spec);
    CodePoint rhs1 = mod_lattice(alpha * s, one, spec);
    if (!same_point(lhs1, rhs1)) return false;

    CodePoint lhs2 = beta * reduced;
    CodePoint rhs2 = mod_lattice(beta * s, beta, spec);
    return same_point(lhs2, rhs2);
}

/**
 * Exact enumeration of {theta*fine ∩ V(alpha*theta*coarse)}: alpha^n * P
 * points, integer coordinates at scale theta*a/P. alpha = 1 gives the
 * codebook.
 */
inline std::vector<CodePoint> fine_points_in_cell(const LatticeSpec& spec, const Rat& theta, long long alpha = 1) {
    if (alpha < 1) throw std::invalid_argument("alpha must be a positive integer");
    const long long P = spec.prime_order;
    const int n = spec.dimension;
    const Rat scale = theta * spec.fine_step();

    std::vector<CodePoint> out;
    std::vector<long long> zlo(n), count(n);
    std::vector<long long> z(n);
    for (long long w = 0; w < P; ++w) {
        // coordinate c_j = g_j + P z_j must satisfy c_j in (-alpha*P/2, alpha*P/2]
        for (int j = 0; j < n; ++j) {
            long long g = mod_reduce(spec.generator[static_cast<std::size_t>(j)] * w, P);
            zlo[j] = static_cast<long long>(floordiv128(-alpha * P - 2 * g, 2 * P)) + 1;
            count[j] = alpha;
            z[j] = 0;
        }
        while (true) {
            std::vector<long long> coords(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                long long g = mod_reduce(spec.generator[static_cast<std::size_t>(j)] * w, P);
                coords[static_cast<std::size_t>(j)] = g + P * (zlo[j] + z[j]);
            }
            out.emplace_back(std::move(coords), scale);
            int j = 0;
            while (j < n && ++z[j] == count[j]) z[j++] = 0;
            if (j == n) break;
        }
    }
    return out;
}

}  // namespace latticeway
