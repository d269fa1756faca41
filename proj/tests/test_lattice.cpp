#include "doctest.h"

#include <random>
#include <set>

#include "latticeway/lattice.hpp"

using namespace latticeway;

namespace {

LatticeSpec spec_1d_a5() { return LatticeSpec(1, 5, Rat(5), {1}); }

}  // namespace

TEST_CASE("lattice spec validation") {
    CHECK_THROWS_AS(LatticeSpec(1, 4, Rat(5), {1}), std::invalid_argument);   // not prime
    CHECK_THROWS_AS(LatticeSpec(1, 5, Rat(-5), {1}), std::invalid_argument);  // scale sign
    CHECK_THROWS_AS(LatticeSpec(2, 5, Rat(5), {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec(2, 5, Rat(5), {1, 5}), std::invalid_argument);  // out of range
    CHECK_NOTHROW(LatticeSpec(2, 2, Rat(1), {1, 0}));
}

TEST_CASE("quantize rounds coordinate-wise onto theta*a*Z^n") {
    auto spec = spec_1d_a5();
    CHECK(quantize({0.0}, Rat(1), spec).coords[0] == 0);
    CHECK(quantize({3.0}, Rat(1), spec).coords[0] == 1);  // the point 5
    CHECK(quantize({2.4}, Rat(1), spec).coords[0] == 0);
    CHECK(quantize({2.5}, Rat(1), spec).coords[0] == 0);   // boundary rounds down
    CHECK(quantize({-2.5}, Rat(1), spec).coords[0] == -1); // so -2.5 maps up to 2.5
    CHECK_THROWS_AS(quantize({std::nan("")}, Rat(1), spec), std::invalid_argument);
}

TEST_CASE("mod folds into (-theta*a/2, theta*a/2]") {
    auto spec = spec_1d_a5();
    CodePoint m4({-4}, Rat(1));
    CodePoint p3({3}, Rat(1));
    CHECK(same_point(mod_lattice(m4, Rat(1), spec), CodePoint({1}, Rat(1))));
    CHECK(same_point(mod_lattice(p3, Rat(1), spec), CodePoint({-2}, Rat(1))));

    // a point already in the cell is untouched
    CodePoint inside({2}, Rat(1));
    CHECK(same_point(mod_lattice(inside, Rat(1), spec), inside));

    // boundary: +5/2 stays, -5/2 wraps to +5/2
    CodePoint hi({5}, Rat(1, 2));
    CodePoint lo({-5}, Rat(1, 2));
    CHECK(same_point(mod_lattice(hi, Rat(1), spec), hi));
    CHECK(same_point(mod_lattice(lo, Rat(1), spec), hi));
}

TEST_CASE("mod is idempotent and invariant under coarse shifts") {
    auto spec = spec_1d_a5();
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        long long k = static_cast<long long>(rng() % 2001) - 1000;
        CodePoint x({k}, Rat(1, 3));
        CodePoint once = mod_lattice(x, Rat(2), spec);
        CHECK(same_point(once, mod_lattice(once, Rat(2), spec)));

        long long shift = static_cast<long long>(rng() % 21) - 10;
        CodePoint shifted = x + CodePoint({shift * 10}, Rat(1));  // shift * theta*a with theta=2
        CHECK(same_point(once, mod_lattice(shifted, Rat(2), spec)));
    }
}

TEST_CASE("real-vector mod agrees with the exact path") {
    auto spec = spec_1d_a5();
    RealVector folded = mod_lattice(RealVector{7.3}, Rat(1), spec);
    CHECK(folded[0] == doctest::Approx(2.3));
    folded = mod_lattice(RealVector{-7.3}, Rat(1), spec);
    CHECK(folded[0] == doctest::Approx(-2.3));
}

TEST_CASE("scale identities hold exhaustively in 1-D") {
    auto spec = spec_1d_a5();
    for (long long s = -12; s <= 12; ++s)
        for (long long alpha = -4; alpha <= 4; ++alpha)
            for (auto beta : {Rat(1, 2), Rat(2), Rat(3, 4), Rat(1)})
                CHECK(scale_identity_check(CodePoint({s}, Rat(1)), alpha, beta, spec));
}

TEST_CASE("scale identities hold for random points up to n = 8") {
    std::mt19937_64 rng(11);
    for (int n : {2, 4, 8}) {
        LatticeSpec spec(n, 7, Rat(3, 2), std::vector<long long>(static_cast<std::size_t>(n), 1));
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<long long> coords(static_cast<std::size_t>(n));
            for (auto& c : coords) c = static_cast<long long>(rng() % 401) - 200;
            CodePoint s(coords, Rat(1, 4));
            long long alpha = static_cast<long long>(rng() % 9) - 4;
            Rat beta(static_cast<long long>(rng() % 5) + 1, static_cast<long long>(rng() % 5) + 1);
            CHECK(scale_identity_check(s, alpha, beta, spec));
        }
    }
}

TEST_CASE("second moment of the cubic cell") {
    auto spec = spec_1d_a5();
    CHECK(second_moment(Rat(1), spec) == Rat(25, 12));
    CHECK(second_moment(Rat(2), spec) == Rat(100, 12));
    // theta^2 scaling law, exactly
    for (auto theta : {Rat(1, 2), Rat(3), Rat(7, 5)})
        CHECK(second_moment(theta, spec) == theta * theta * second_moment(Rat(1), spec));
}

TEST_CASE("codebook cardinality is exactly P for small specs") {
    for (int n = 1; n <= 4; ++n) {
        for (long long p : {2, 3, 5, 7, 11, 13}) {
            std::vector<long long> g(static_cast<std::size_t>(n), 1);
            if (n > 1) g[1] = p > 2 ? 2 : 1;
            LatticeSpec spec(n, p, Rat(5), g);
            auto points = fine_points_in_cell(spec, Rat(1), 1);
            std::set<std::vector<long long>> distinct;
            for (const auto& pt : points) distinct.insert(pt.coords);
            CHECK(points.size() == static_cast<std::size_t>(p));
            CHECK(distinct.size() == static_cast<std::size_t>(p));
        }
    }
}

TEST_CASE("code point addition demands compatible scales") {
    CodePoint a({1}, Rat(1, 2));
    CodePoint b({3}, Rat(1, 4));
    CHECK(same_point(a + b, CodePoint({5}, Rat(1, 4))));
    CodePoint c({1}, Rat(1, 3));
    CHECK_THROWS_AS(a + c, std::invalid_argument);
}
