#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dunits/binpoly.hpp"

using dunits::ff::BinPoly;

namespace {

// Independent irreducibility oracle: trial division by every polynomial of
// degree 1 .. deg/2.  Only usable at tiny degrees, which is the point.
bool irreducible_by_trial_division(const BinPoly& f) {
    int deg = f.degree();
    if (deg < 1) return false;
    for (std::uint64_t bits = 2; bits < (std::uint64_t{1} << (deg / 2 + 1)); ++bits) {
        BinPoly d = BinPoly::from_bits(bits);
        if (d.degree() < 1 || 2 * d.degree() > deg) continue;
        if (f.mod(d).is_zero()) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("degree and zero sentinel") {
    CHECK(BinPoly::zero().degree() == BinPoly::kZeroDegree);
    CHECK(BinPoly::one().degree() == 0);
    CHECK(BinPoly::x().degree() == 1);
    CHECK(BinPoly::monomial(130).degree() == 130);
    CHECK(BinPoly::from_bits(0b1011).degree() == 3);
}

TEST_CASE("addition is xor, doubling gives zero") {
    BinPoly a = BinPoly::from_bits(0b1101);
    CHECK((a + a).is_zero());
    CHECK((a + BinPoly::zero()) == a);
    CHECK((BinPoly::from_bits(0b101) + BinPoly::from_bits(0b011)) == BinPoly::from_bits(0b110));
}

TEST_CASE("multiplication basics and multi-limb consistency") {
    // (x+1)(x+1) = x^2+1 in characteristic 2
    CHECK(BinPoly::from_bits(0b11) * BinPoly::from_bits(0b11) == BinPoly::from_bits(0b101));
    // (x^2+x+1)(x+1) = x^3+1
    CHECK(BinPoly::from_bits(0b111) * BinPoly::from_bits(0b11) == BinPoly::from_bits(0b1001));
    // cross-limb: x^70 * x^3 = x^73
    CHECK(BinPoly::monomial(70) * BinPoly::monomial(3) == BinPoly::monomial(73));
}

TEST_CASE("divmod reconstruction property") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 300; ++it) {
        BinPoly a = BinPoly::from_bits(rng() >> (rng() % 40));
        BinPoly f = BinPoly::from_bits((rng() >> (rng() % 50)) | 1);
        if (f.is_zero() || f.degree() < 1) continue;
        BinPoly q = a.div(f), r = a.mod(f);
        CHECK(q * f + r == a);
        if (!r.is_zero()) CHECK(r.degree() < f.degree());
    }
}

TEST_CASE("gcd sanity") {
    BinPoly f = BinPoly::from_bits(0b111);   // x^2+x+1
    BinPoly g = BinPoly::from_bits(0b1011);  // x^3+x+1
    CHECK(gcd(f * g, g) == g);
    CHECK(gcd(f, g).degree() == 0);
}

TEST_CASE("is_irreducible agrees with trial division up to degree 10") {
    for (std::uint64_t bits = 2; bits < (1u << 11); ++bits) {
        BinPoly f = BinPoly::from_bits(bits);
        INFO("bits = " << bits);
        CHECK(dunits::ff::is_irreducible(f) == irreducible_by_trial_division(f));
    }
}

TEST_CASE("find_irreducible returns the smallest usable modulus") {
    CHECK(dunits::ff::find_irreducible(1) == BinPoly::from_bits(0b11));    // x+1
    CHECK(dunits::ff::find_irreducible(2) == BinPoly::from_bits(0b111));   // x^2+x+1
    CHECK(dunits::ff::find_irreducible(3) == BinPoly::from_bits(0b1011));  // x^3+x+1

    // oracle: smallest irreducible with nonzero constant term per degree
    for (unsigned d = 1; d <= 10; ++d) {
        BinPoly expected;
        for (std::uint64_t bits = (std::uint64_t{1} << d) | 1;; bits += 2) {
            BinPoly f = BinPoly::from_bits(bits);
            if (irreducible_by_trial_division(f)) {
                expected = f;
                break;
            }
        }
        CHECK(dunits::ff::find_irreducible(d) == expected);
    }
}

TEST_CASE("find_irreducible rejects degree 0") {
    CHECK_THROWS_AS(dunits::ff::find_irreducible(0), std::invalid_argument);
}
