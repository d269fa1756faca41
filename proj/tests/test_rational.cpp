#include "doctest.h"

#include "latticeway/primes.hpp"
#include "latticeway/rational.hpp"

using latticeway::Rat;

TEST_CASE("rationals normalize to lowest terms with positive denominator") {
    CHECK(Rat(6, 4) == Rat(3, 2));
    CHECK(Rat(-6, 4) == Rat(-3, 2));
    CHECK(Rat(6, -4) == Rat(-3, 2));
    CHECK(Rat(0, 7) == Rat(0));
    CHECK_THROWS_AS(Rat(1, 0), std::invalid_argument);
}

TEST_CASE("rational arithmetic is exact") {
    CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
    CHECK(Rat(1, 3) - Rat(1, 2) == Rat(-1, 6));
    CHECK(Rat(2, 3) * Rat(9, 4) == Rat(3, 2));
    CHECK(Rat(2, 3) / Rat(4, 3) == Rat(1, 2));
    CHECK_THROWS_AS(Rat(1) / Rat(0), std::invalid_argument);
    CHECK(Rat(1, 2) < Rat(2, 3));
    CHECK(Rat(-5, 2).abs() == Rat(5, 2));
}

TEST_CASE("half quotients round toward -inf") {
    CHECK(Rat(1, 2).round_half_down() == 0);
    CHECK(Rat(-1, 2).round_half_down() == -1);
    CHECK(Rat(5, 2).round_half_down() == 2);
    CHECK(Rat(-5, 2).round_half_down() == -3);
    CHECK(Rat(3, 5).round_half_down() == 1);
    CHECK(Rat(2, 5).round_half_down() == 0);
    CHECK(Rat(7).round_half_down() == 7);
    CHECK(Rat(-7).round_half_down() == -7);
}

TEST_CASE("floor and integer accessors") {
    CHECK(Rat(7, 2).floor() == 3);
    CHECK(Rat(-7, 2).floor() == -4);
    CHECK(Rat(14, 2).is_integer());
    CHECK(Rat(14, 2).as_integer() == 7);
    CHECK_THROWS_AS(Rat(1, 2).as_integer(), std::invalid_argument);
}

TEST_CASE("overflow in unreducible products throws") {
    Rat big((1LL << 62) + 1, 3);
    CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("rat_gcd and divisibility") {
    CHECK(latticeway::rat_gcd(Rat(1, 2), Rat(5, 2)) == Rat(1, 2));
    CHECK(latticeway::rat_gcd(Rat(3, 4), Rat(1, 6)) == Rat(1, 12));
    CHECK(latticeway::rat_divides(Rat(1, 2), Rat(5, 2)));
    CHECK(!latticeway::rat_divides(Rat(2, 3), Rat(1, 2)));
}

TEST_CASE("rational square root floor stays at or below the target") {
    for (double x : {0.9, 1.0, 2.0, 3.6, 12.0, 48.0, 1e-3, 173.25}) {
        Rat r = latticeway::rational_sqrt_floor(x);
        double rd = r.to_double();
        CHECK(rd * rd <= x * (1 + 1e-12));
        CHECK(rd >= std::sqrt(x) * (1 - 1e-5));
    }
    CHECK(latticeway::rational_sqrt_floor(4.0) == Rat(2));
    CHECK(latticeway::rational_sqrt_floor(0.0) == Rat(0));
}

TEST_CASE("rational parsing and printing") {
    CHECK(Rat::parse("3") == Rat(3));
    CHECK(Rat::parse("-7/2") == Rat(-7, 2));
    CHECK(Rat(5, 10).str() == "1/2");
    CHECK(Rat(4, 2).str() == "2");
    CHECK_THROWS_AS(Rat::parse("x"), std::invalid_argument);
}

TEST_CASE("prime utilities") {
    CHECK(latticeway::is_prime(2));
    CHECK(latticeway::is_prime(13));
    CHECK(!latticeway::is_prime(1));
    CHECK(!latticeway::is_prime(15));

    // ties resolve upward
    CHECK(latticeway::nearest_prime(4.0) == 5);
    CHECK(latticeway::nearest_prime(16.0) == 17);
    CHECK(latticeway::nearest_prime(2.0) == 2);
    CHECK(latticeway::nearest_prime(1.2) == 2);
    CHECK(latticeway::nearest_prime(9.0) == 11);  // 7 and 11 tie; up wins
    CHECK(latticeway::nearest_prime(8.9) == 7);

    CHECK(latticeway::mod_centered(3, 5) == -2);
    CHECK(latticeway::mod_centered(2, 5) == 2);
    CHECK(latticeway::mod_centered(1, 2) == 1);
    CHECK(latticeway::mod_centered(-1, 5) == -1);

    CHECK(latticeway::mod_inverse(2, 5) == 3);
    CHECK(latticeway::mod_inverse(3, 7) == 5);
    CHECK_THROWS_AS(latticeway::mod_inverse(0, 5), std::invalid_argument);
}
