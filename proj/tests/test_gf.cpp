#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "fxl/cipher.hpp"
#include "fxl/gf128.hpp"
#include "fxl/truth_table.hpp"

using namespace fxl;

namespace {

// The published 56-term ANF of the decimated WG transformation, transcribed
// once as a fixture. Variable x_{j+1} is the coefficient of w^j.
const char* kWgtFixture =
    "x2*x3*x4*x5*x6*x7+x1*x2*x3*x4*x6+x1*x2*x3*x5*x6+x1*x2*x4*x5*x6"
    "+x2*x3*x4*x5*x6+x1*x2*x3*x5*x7+x1*x3*x4*x5*x7+x2*x3*x4*x5*x7"
    "+x1*x2*x3*x6*x7+x1*x3*x4*x6*x7+x2*x3*x4*x6*x7+x1*x4*x5*x6*x7"
    "+x2*x4*x5*x6*x7+x1*x2*x3*x5+x1*x2*x3*x6+x2*x3*x4*x6+x1*x2*x5*x6"
    "+x2*x4*x5*x6+x3*x4*x5*x6+x2*x3*x4*x7+x1*x2*x5*x7+x2*x3*x5*x7"
    "+x1*x4*x5*x7+x2*x4*x5*x7+x2*x3*x6*x7+x1*x4*x6*x7+x2*x5*x6*x7"
    "+x3*x5*x6*x7+x4*x5*x6*x7+x1*x2*x3+x1*x2*x5+x1*x3*x5+x2*x3*x5"
    "+x1*x2*x6+x1*x4*x6+x2*x4*x6+x3*x4*x6+x4*x5*x6+x1*x2*x7"
    "+x1*x4*x7+x3*x4*x7+x4*x5*x7+x1*x6*x7+x3*x6*x7+x5*x6*x7+x3*x4"
    "+x4*x5+x1*x6+x4*x6+x2*x7+x4*x7+x5*x7+x1+x4+x6+x7";

} // namespace

TEST_CASE("field arithmetic basics") {
    Gf128 w = Gf128::omega();
    SECTION("multiplicative identity") {
        for (unsigned v = 0; v < 128; ++v)
            REQUIRE(Gf128(static_cast<std::uint8_t>(v)) * Gf128::one() == Gf128(static_cast<std::uint8_t>(v)));
    }
    SECTION("reduction of w^7") {
        REQUIRE(w.pow(7) == Gf128(0x0f)); // w^3 + w^2 + w + 1
    }
    SECTION("omega is primitive: order exactly 127") {
        Gf128 acc = Gf128::one();
        for (int k = 1; k < 127; ++k) {
            acc = acc * w;
            REQUIRE(acc != Gf128::one());
        }
        REQUIRE(acc * w == Gf128::one());
    }
    SECTION("inverses") {
        for (unsigned v = 1; v < 128; ++v) {
            Gf128 x(static_cast<std::uint8_t>(v));
            REQUIRE(x * x.inverse() == Gf128::one());
        }
        REQUIRE_THROWS_AS(Gf128::zero().inverse(), usage_error);
    }
    SECTION("commutativity and associativity, exhaustive on a sample") {
        for (unsigned a = 0; a < 128; a += 3)
            for (unsigned b = 0; b < 128; b += 5) {
                Gf128 x(static_cast<std::uint8_t>(a)), y(static_cast<std::uint8_t>(b));
                REQUIRE(x * y == y * x);
                REQUIRE((x * y) * w == x * (y * w));
                REQUIRE(x * (y + w) == x * y + x * w);
            }
    }
}

TEST_CASE("WG permutation") {
    SECTION("WGP(0) = 0: five terms of one plus one cancel") {
        REQUIRE(wg_permutation(Gf128::zero()) == Gf128::zero());
        REQUIRE(wgp(Gf128::zero(), 13) == Gf128::zero());
        REQUIRE(wgp(Gf128::zero(), 1) == wgp(Gf128::zero(), 13));
    }
    SECTION("decimated map is a bijection") {
        std::set<std::uint8_t> image;
        for (unsigned v = 0; v < 128; ++v) image.insert(wgp(Gf128(static_cast<std::uint8_t>(v)), 13).bits());
        REQUIRE(image.size() == 128);
    }
    SECTION("bad decimation rejected") {
        REQUIRE_THROWS_AS(wgp(Gf128::one(), 127), usage_error);
        REQUIRE_THROWS_AS(wgp(Gf128::one(), 0), usage_error);
    }
}

TEST_CASE("trace form") {
    // Tr(x) = x_0 + x_5 is linear and balanced.
    int ones = 0;
    for (unsigned v = 0; v < 128; ++v) {
        Gf128 x(static_cast<std::uint8_t>(v));
        ones += x.trace_bit();
        for (unsigned u = 0; u < 128; u += 7) {
            Gf128 y(static_cast<std::uint8_t>(u));
            REQUIRE((x + y).trace_bit() == (x.trace_bit() ^ y.trace_bit()));
        }
    }
    REQUIRE(ones == 64);
}

TEST_CASE("WGT equals the published ANF term for term") {
    BoolPoly fixture = BoolPoly::parse(kWgtFixture, 7);
    REQUIRE(fixture.support().size() == 56);

    const BoolPoly& computed = wgt_anf();
    SECTION("bit-exact match under the w^j <-> x_{j+1} mapping") {
        REQUIRE(computed == fixture);
        REQUIRE((computed + fixture).is_zero());
    }
    SECTION("the reversed bit mapping must not match") {
        TruthTable rev(7);
        for (std::uint64_t p = 0; p < 128; ++p) {
            std::uint8_t r = 0;
            for (int j = 0; j < 7; ++j)
                if ((p >> j) & 1) r |= static_cast<std::uint8_t>(1u << (6 - j));
            rev.set(p, wgt(Gf128(r)));
        }
        REQUIRE(from_truth_table(rev) != fixture);
    }
    SECTION("ANF evaluation agrees with the field computation on all 128 points") {
        for (std::uint64_t p = 0; p < 128; ++p)
            REQUIRE(computed.evaluate(p) == wgt(Gf128(static_cast<std::uint8_t>(p))));
    }
    SECTION("WGT is balanced") {
        REQUIRE(to_truth_table(computed).popcount() == 64);
    }
    SECTION("degree and size") {
        REQUIRE(computed.degree() == 6);
        REQUIRE(computed.support().size() == 56);
    }
}
