#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "latticeway/field.hpp"
#include "latticeway/lattice.hpp"
#include "latticeway/rational.hpp"

namespace latticeway {

/**
 * Message encoder for one node: transmits theta * phi(w), a point of the
 * scaled codebook {theta*fine ∩ V(theta*coarse)}. power_scale is chosen
 * so the codebook second moment stays inside the node's power budget.
 */
struct Encoder {
    LatticeSpec spec;
    Rat power_scale;  // theta

    Encoder(LatticeSpec s, Rat theta) : spec(std::move(s)), power_scale(theta) {
        if (!theta.is_positive()) throw std::invalid_argument("power scale must be positive");
    }

    /// largest binary-rational theta with second_moment(theta) <= budget
    static Rat scale_for_power(double budget, const LatticeSpec& spec) {
        if (!(budget > 0)) throw std::invalid_argument("power budget must be positive");
        // theta^2 a^2 / 12 <= budget
        double a = spec.coarse_scale.to_double();
        return rational_sqrt_floor(12.0 * budget / (a * a));
    }

    CodePoint operator()(const FieldElement& w) const { return phi(w, power_scale, spec); }
};

inline CodePoint encode(const FieldElement& w, const Rat& theta, const LatticeSpec& spec) {
    return phi(w, theta, spec);
}

/**
 * A combination decoded from a superposition, reduced mod theta*Lambda
 * with theta = alpha * (fine codebook scale). The key records which
 * codewords the point stands for; it is simulator bookkeeping only and
 * no decoder ever reads it.
 */
struct DecodedCombination {
    CodePoint point;  // in {(theta/alpha)*fine ∩ V(theta*coarse)}
    Rat theta;        // reduction modulus scale
    long long alpha;  // fine scale is theta/alpha
    std::optional<CombinationKey> key;

    DecodedCombination(CodePoint p, Rat t, long long a)
        : point(std::move(p)), theta(t), alpha(a) {
        if (!t.is_positive() || a < 1) throw std::invalid_argument("bad combination scales");
    }
};

namespace detail {

/// squared distance between y and c, folded per coordinate modulo L
inline double folded_distance_sq(const RealVector& y, const CodePoint& c, double L) {
    double acc = 0;
    double s = c.scale.to_double();
    for (std::size_t j = 0; j < y.size(); ++j) {
        double d = y[j] - s * static_cast<double>(c.coords[j]);
        d -= L * std::floor(d / L + 0.5);  // nearest wrap; cubic cell makes axes independent
        acc += d * d;
    }
    return acc;
}

inline std::size_t nearest_candidate(const RealVector& y, const std::vector<CodePoint>& candidates, double L) {
    std::size_t best = 0;
    double best_d = folded_distance_sq(y, candidates[0], L);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double d = folded_distance_sq(y, candidates[i], L);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

/**
 * Point-to-point lattice decoder: fold y mod theta*Lambda, then search
 * the P-point scaled codebook exhaustively with fold-aware distance.
 * Always returns a codeword; error rates are a measured quantity.
 */
inline CodePoint decode_point_to_point(const RealVector& y, const Rat& theta, const LatticeSpec& spec) {
    check_finite(y);
    if (static_cast<int>(y.size()) != spec.dimension) throw std::invalid_argument("dimension mismatch");
    RealVector folded = mod_lattice(y, theta, spec);
    std::vector<CodePoint> candidates = fine_points_in_cell(spec, theta, 1);
    double L = (theta * spec.coarse_scale).to_double();
    return candidates[detail::nearest_candidate(folded, candidates, L)];
}

/**
 * Decode-the-sum: from y = X_a + X_b + Z with X_a in the alpha*theta
 * codebook and X_b in the theta codebook, recover
 * (alpha theta t_a + theta t_b) mod alpha theta Lambda. The candidate set
 * is exactly {theta*fine ∩ V(alpha theta coarse)}, alpha^n * P points.
 */
inline DecodedCombination decode_sum(const RealVector& y, long long alpha, const Rat& theta,
                                     const LatticeSpec& spec) {
    check_finite(y);
    if (alpha < 1) throw std::invalid_argument("alpha must be a positive integer");
    if (static_cast<int>(y.size()) != spec.dimension) throw std::invalid_argument("dimension mismatch");
    const Rat mod_scale = Rat(alpha) * theta;
    RealVector folded = mod_lattice(y, mod_scale, spec);
    std::vector<CodePoint> candidates = fine_points_in_cell(spec, theta, alpha);
    double L = (mod_scale * spec.coarse_scale).to_double();
    CodePoint best = candidates[detail::nearest_candidate(folded, candidates, L)];
    return DecodedCombination(std::move(best), mod_scale, alpha);
}

/**
 * Re-distribution Transform: (1) multiply the decoded combination by N,
 * (2) reduce mod theta*Lambda, which lands on the theta-scaled codebook,
 * (3) rescale to out_scale so the result fills the out_scale codebook
 * with full output power. Exact integer arithmetic throughout.
 */
inline CodePoint redistribution_transform(const DecodedCombination& c, long long N, const Rat& out_scale,
                                          const LatticeSpec& spec) {
    if (N < 1) throw std::invalid_argument("N must be a positive integer");
    if (!out_scale.is_positive()) throw std::invalid_argument("out_scale must be positive");

    CodePoint stretched = N * c.point;
    CodePoint reduced = mod_lattice(stretched, c.theta, spec);

    // the reduction must land on theta*phi(u); anything else is a scale mismatch
    std::vector<long long> coords;
    if (!detail::canonical_coords(reduced, c.theta, spec, coords))
        throw std::invalid_argument("scale mismatch");
    return CodePoint(std::move(coords), out_scale * spec.fine_step());
}

}  // namespace latticeway
