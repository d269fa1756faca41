#include "doctest.h"

#include "latticeway/field.hpp"

using namespace latticeway;

namespace {

LatticeSpec spec_1d_a5() { return LatticeSpec(1, 5, Rat(5), {1}); }

}  // namespace

TEST_CASE("field element arithmetic") {
    FieldElement a(3, 5), b(4, 5);
    CHECK((a + b).value == 2);
    CHECK((a - b).value == 4);
    CHECK((a * b).value == 2);
    CHECK(a.inverse().value == 2);  // 3*2 = 6 = 1 mod 5
    CHECK_THROWS_AS(FieldElement(0, 5).inverse(), std::invalid_argument);
    CHECK_THROWS_AS(a + FieldElement(1, 7), std::invalid_argument);
    CHECK(scale_message(-1, a).value == 2);
}

TEST_CASE("phi maps field elements onto the codebook") {
    auto spec = spec_1d_a5();
    CHECK(same_point(phi(FieldElement(0, 5), Rat(1), spec), CodePoint({0}, Rat(1))));
    CHECK(same_point(phi(FieldElement(3, 5), Rat(1), spec), CodePoint({-2}, Rat(1))));
    CHECK(same_point(phi(FieldElement(4, 5), Rat(1), spec), CodePoint({-1}, Rat(1))));
    // scaled codebooks are plain dilations
    CHECK(same_point(phi(FieldElement(3, 5), Rat(2), spec), CodePoint({-4}, Rat(1))));
}

TEST_CASE("phi_inverse inverts phi and rejects off-codebook points") {
    auto spec = spec_1d_a5();
    for (auto theta : {Rat(1), Rat(1, 2), Rat(3)})
        for (long long w = 0; w < 5; ++w)
            CHECK(phi_inverse(phi(FieldElement(w, 5), theta, spec), theta, spec).value == w);

    CHECK(phi_inverse(CodePoint({0}, Rat(1)), Rat(1), spec).value == 0);
    CHECK(phi_inverse(CodePoint({-2}, Rat(1)), Rat(1), spec).value == 3);
    CHECK_THROWS_AS(phi_inverse(CodePoint({23}, Rat(1, 10)), Rat(1), spec), std::domain_error);  // 2.3
    CHECK_THROWS_AS(phi_inverse(CodePoint({4}, Rat(1)), Rat(1), spec), std::domain_error);       // outside cell
}

TEST_CASE("combination keys reject degenerate coefficients") {
    CHECK_THROWS_AS(CombinationKey::of({5}, 5), std::invalid_argument);
    CHECK_THROWS_AS(CombinationKey::of({1, 10}, 5), std::invalid_argument);
    CHECK_NOTHROW(CombinationKey::of({1, -1}, 5));
}

TEST_CASE("combine_messages evaluates integer combinations mod P") {
    auto key = CombinationKey::of({1, 2}, 5);
    CHECK(combine_messages(key, {FieldElement(3, 5), FieldElement(4, 5)}).value == 1);
    auto ident = CombinationKey::of({1}, 5);
    for (long long w = 0; w < 5; ++w) CHECK(combine_messages(ident, {FieldElement(w, 5)}).value == w);
    CHECK_THROWS_AS(combine_messages(key, {FieldElement(1, 5)}), std::invalid_argument);
}

TEST_CASE("solve_coefficient inverts multiplication by alpha") {
    FieldElement u = scale_message(2, FieldElement(4, 5));
    CHECK(u.value == 3);
    CHECK(solve_coefficient(u, 2).value == 4);
    CHECK(solve_coefficient(FieldElement(3, 5), 1).value == 3);
    CHECK_THROWS_AS(solve_coefficient(FieldElement(3, 5), 10), std::invalid_argument);

    for (long long p : {5, 7, 11, 13})
        for (long long alpha = 1; alpha < p; ++alpha)
            for (long long w = 0; w < p; ++w)
                CHECK(solve_coefficient(scale_message(alpha, FieldElement(w, p)), alpha).value == w);
}

TEST_CASE("lattice combination maps to the field combination (1-D example)") {
    auto spec = spec_1d_a5();
    // v = (t_a + 2 t_b) mod 5Z with w_a = 3, w_b = 4
    CodePoint v = mod_lattice(phi(FieldElement(3, 5), Rat(1), spec) + 2 * phi(FieldElement(4, 5), Rat(1), spec),
                              Rat(1), spec);
    CHECK(same_point(v, CodePoint({1}, Rat(1))));
    CHECK(lattice_combination_to_message(v, Rat(1), spec).value == 1);
    CHECK(combine_messages(CombinationKey::of({1, 2}, 5), {FieldElement(3, 5), FieldElement(4, 5)}).value == 1);
}

TEST_CASE("Lemma-1 bijection, exhaustive over small specs") {
    for (long long p : {5, 7}) {
        for (int n : {1, 2, 3}) {
            std::vector<long long> g(static_cast<std::size_t>(n), 1);
            if (n > 1) g[static_cast<std::size_t>(n - 1)] = 2;
            LatticeSpec spec(n, p, Rat(5), g);
            Rat theta(3, 2);
            for (long long ca = 1; ca < p; ++ca)
                for (long long cb = 1; cb < p; ++cb)
                    for (long long wa = 0; wa < p; ++wa)
                        for (long long wb = 0; wb < p; ++wb) {
                            CodePoint sum = ca * phi(FieldElement(wa, p), theta, spec) +
                                            cb * phi(FieldElement(wb, p), theta, spec);
                            CodePoint v = mod_lattice(sum, theta, spec);
                            FieldElement lhs = lattice_combination_to_message(v, theta, spec);
                            FieldElement rhs = combine_messages(CombinationKey::of({ca, cb}, p),
                                                                {FieldElement(wa, p), FieldElement(wb, p)});
                            CHECK(lhs == rhs);
                        }
        }
    }
}

TEST_CASE("uniformity census is exactly flat") {
    auto spec = spec_1d_a5();
    auto counts = uniformity_census(CombinationKey::of({1, 2}, 5), Rat(1), spec);
    for (long long w = 0; w < 5; ++w) CHECK(counts.at(w) == 5);

    auto single = uniformity_census(CombinationKey::of({1}, 5), Rat(1), spec);
    for (long long w = 0; w < 5; ++w) CHECK(single.at(w) == 1);

    LatticeSpec spec7(1, 7, Rat(7), {1});
    auto counts7 = uniformity_census(CombinationKey::of({3, 2, 1}, 7), Rat(1), spec7);
    for (long long w = 0; w < 7; ++w) CHECK(counts7.at(w) == 49);

    CHECK_THROWS_AS(uniformity_census(CombinationKey::of({1, 1, 1}, 5), Rat(1), spec, 100), std::runtime_error);
}
