#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "latticeway/lattice.hpp"
#include "latticeway/primes.hpp"
#include "latticeway/rational.hpp"

namespace latticeway {

/// element of F_P with its order carried along
struct FieldElement {
    long long value;
    long long order;

    FieldElement() : value(0), order(2) {}
    FieldElement(long long v, long long p) : value(mod_reduce(v, p)), order(p) {
        if (p < 2) throw std::invalid_argument("field order must be >= 2");
    }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return FieldElement(a.value + b.value, a.order);
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return FieldElement(a.value - b.value, a.order);
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return FieldElement(mod_reduce(static_cast<long long>(
                                static_cast<int128>(a.value) * b.value % a.order),
                            a.order),
                            a.order);
    }
    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.value == b.value && a.order == b.order;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

    FieldElement inverse() const {
        if (value == 0) throw std::invalid_argument("non-invertible coefficient");
        return FieldElement(mod_inverse(value, order), order);
    }

private:
    void check(const FieldElement& other) const {
        if (order != other.order) throw std::invalid_argument("field order mismatch");
    }
};

/// scale a field element by an arbitrary integer coefficient
inline FieldElement scale_message(long long coefficient, const FieldElement& w) {
    return FieldElement(mod_reduce(coefficient, w.order), w.order) * w;
}

/**
 * Integer-coefficient combination u = sum_i c_i * w_i over F_P. Each slot
 * names one message; coefficients are stored unreduced and folded mod P
 * inside the field ops. Coefficients divisible by P are rejected (they
 * destroy the Lemma-1/2 bijections).
 */
struct CombinationKey {
    std::vector<std::pair<long long, std::string>> terms;  // (coefficient, slot id)
    long long order;

    CombinationKey(std::vector<std::pair<long long, std::string>> t, long long p)
        : terms(std::move(t)), order(p) {
        for (const auto& [c, slot] : terms)
            if (mod_reduce(c, p) == 0)
                throw std::invalid_argument("degenerate coefficient in slot " + slot);
    }

    static CombinationKey of(std::vector<long long> coeffs, long long p) {
        std::vector<std::pair<long long, std::string>> t;
        for (std::size_t i = 0; i < coeffs.size(); ++i) t.emplace_back(coeffs[i], "m" + std::to_string(i));
        return CombinationKey(std::move(t), p);
    }

    std::string str() const {
        std::string s;
        for (const auto& [c, slot] : terms) {
            if (!s.empty()) s += "+";
            s += std::to_string(mod_reduce(c, order)) + "*" + slot;
        }
        return s.empty() ? "0" : s;
    }
};

/// phi: w -> theta * ((a/P) G w mod theta*Lambda), a codebook point
inline CodePoint phi(const FieldElement& w, const Rat& theta, const LatticeSpec& spec) {
    if (w.order != spec.prime_order) throw std::invalid_argument("field order mismatch");
    std::vector<long long> coords(static_cast<std::size_t>(spec.dimension));
    for (int j = 0; j < spec.dimension; ++j) {
        long long g = mod_reduce(spec.generator[static_cast<std::size_t>(j)] * w.value, spec.prime_order);
        coords[static_cast<std::size_t>(j)] = mod_centered(g, spec.prime_order);
    }
    return CodePoint(std::move(coords), theta * spec.fine_step());
}

namespace detail {

/// coordinates of t at scale theta*a/P, or nullopt-equivalent failure
inline bool canonical_coords(const CodePoint& t, const Rat& theta, const LatticeSpec& spec,
                             std::vector<long long>& out) {
    if (static_cast<int>(t.size()) != spec.dimension) return false;
    Rat ratio = t.scale / (theta * spec.fine_step());
    out.resize(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        Rat v = Rat(t.coords[j]) * ratio;
        if (!v.is_integer()) return false;
        out[j] = v.as_integer();
    }
    return true;
}

}  // namespace detail

/**
 * Inverse of phi by exact table lookup over the P-point codebook.
 * Throws "not a codeword" for anything outside {theta*fine ∩ V(theta*coarse)}.
 */
inline FieldElement phi_inverse(const CodePoint& t, const Rat& theta, const LatticeSpec& spec) {
    std::vector<long long> key;
    if (detail::canonical_coords(t, theta, spec, key)) {
        std::map<std::vector<long long>, long long> table;
        for (long long w = 0; w < spec.prime_order; ++w)
            table.emplace(phi(FieldElement(w, spec.prime_order), theta, spec).coords, w);
        auto it = table.find(key);
        if (it != table.end()) return FieldElement(it->second, spec.prime_order);
    }
    throw std::domain_error("not a codeword");
}

/// u = sum_i c_i w_i over F_P
inline FieldElement combine_messages(const CombinationKey& key, const std::vector<FieldElement>& messages) {
    if (key.terms.size() != messages.size()) throw std::invalid_argument("key/message arity mismatch");
    FieldElement acc(0, key.order);
    for (std::size_t i = 0; i < key.terms.size(); ++i) {
        if (messages[i].order != key.order) throw std::invalid_argument("field order mismatch");
        acc = acc + scale_message(key.terms[i].first, messages[i]);
    }
    return acc;
}

/**
 * The Lemma-1 bijection, lattice side to field side: for v in
 * {theta*fine ∩ V(theta*coarse)}, the unique u with phi(u) = v/theta.
 */
inline FieldElement lattice_combination_to_message(const CodePoint& v, const Rat& theta, const LatticeSpec& spec) {
    return phi_inverse(v, theta, spec);
}

/// w = alpha^{-1} u over F_P; errors if alpha is divisible by P
inline FieldElement solve_coefficient(const FieldElement& u, long long alpha) {
    long long a = mod_reduce(alpha, u.order);
    if (a == 0) throw std::invalid_argument("non-invertible coefficient");
    return FieldElement(a, u.order).inverse() * u;
}

/**
 * Exhaustive census for the Lemma-3 uniformity statement: map every
 * message tuple through (sum_i c_i theta t_i) mod theta*Lambda and count
 * hits per codebook element. Exact flatness means every count equals
 * P^(slots-1).
 */
inline std::map<long long, long long> uniformity_census(const CombinationKey& key, const Rat& theta,
                                                        const LatticeSpec& spec,
                                                        long long tuple_bound = 1000000) {
    if (key.order != spec.prime_order) throw std::invalid_argument("field order mismatch");
    const long long P = spec.prime_order;
    const std::size_t slots = key.terms.size();
    double tuples = std::pow(static_cast<double>(P), static_cast<double>(slots));
    if (tuples > static_cast<double>(tuple_bound)) throw std::runtime_error("enumeration bound exceeded");

    std::map<long long, long long> counts;
    for (long long w = 0; w < P; ++w) counts[w] = 0;

    std::vector<long long> tuple(slots, 0);
    while (true) {
        CodePoint acc = CodePoint::zero(spec.dimension, theta * spec.fine_step());
        for (std::size_t i = 0; i < slots; ++i) {
            CodePoint t = phi(FieldElement(tuple[i], P), theta, spec);
            acc = acc + key.terms[i].first * t;
        }
        CodePoint v = mod_lattice(acc, theta, spec);
        counts[phi_inverse(v, theta, spec).value] += 1;

        std::size_t i = 0;
        while (i < slots && ++tuple[i] == P) tuple[i++] = 0;
        if (i == slots) break;
    }
    return counts;
}

}  // namespace latticeway
