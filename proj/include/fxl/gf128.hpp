#pragma once

#include <cstdint>
#include <numeric>

#include "fxl/errors.hpp"

namespace fxl {

// An element of GF(2^7) = GF(2)[y] / (y^7 + y^3 + y^2 + y + 1), stored as 7
// coefficient bits in the polynomial basis {1, w, ..., w^6} where w is a
// root of the modulus. Bit i is the coefficient of w^i.
class Gf128 {
public:
    static constexpr std::uint8_t kModulus = 0x8f; // y^7+y^3+y^2+y+1 (y^7 bit dropped below)

    constexpr Gf128() : v_(0) {}
    constexpr explicit Gf128(std::uint8_t bits) : v_(bits & 0x7f) {}

    static constexpr Gf128 zero() { return Gf128(0); }
    static constexpr Gf128 one() { return Gf128(1); }
    static constexpr Gf128 omega() { return Gf128(2); }

    constexpr std::uint8_t bits() const { return v_; }
    constexpr bool bit(int i) const { return (v_ >> i) & 1; }
    constexpr bool is_zero() const { return v_ == 0; }

    friend constexpr Gf128 operator+(Gf128 a, Gf128 b) { return Gf128(static_cast<std::uint8_t>(a.v_ ^ b.v_)); }
    friend constexpr Gf128 operator-(Gf128 a, Gf128 b) { return a + b; }

    friend constexpr Gf128 operator*(Gf128 a, Gf128 b) {
        // Carry-less 7x7 multiply, then reduce degree 12..7 by the modulus.
        std::uint32_t acc = 0;
        std::uint32_t x = a.v_;
        for (int i = 0; i < 7; ++i)
            if ((b.v_ >> i) & 1) acc ^= x << i;
        for (int i = 12; i >= 7; --i)
            if ((acc >> i) & 1) acc ^= static_cast<std::uint32_t>(kModulus) << (i - 7);
        return Gf128(static_cast<std::uint8_t>(acc));
    }

    friend constexpr bool operator==(Gf128 a, Gf128 b) { return a.v_ == b.v_; }
    friend constexpr bool operator!=(Gf128 a, Gf128 b) { return a.v_ != b.v_; }

    constexpr Gf128 pow(std::uint64_t e) const {
        Gf128 base = *this, acc = one();
        while (e) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    constexpr Gf128 inverse() const {
        if (is_zero()) throw usage_error("Gf128: inverse of zero");
        return pow(126); // x^(2^7-2)
    }

    // Trace form used by the WG transformation: coefficient of 1 plus
    // coefficient of w^5.
    constexpr bool trace_bit() const { return ((v_ >> 0) ^ (v_ >> 5)) & 1; }

private:
    std::uint8_t v_;
};

// WG permutation over GF(2^7):
// WGP(x) = (x+1) + (x+1)^33 + (x+1)^39 + (x+1)^41 + (x+1)^104 + 1.
constexpr Gf128 wg_permutation(Gf128 x) {
    Gf128 t = x + Gf128::one();
    return t + t.pow(33) + t.pow(39) + t.pow(41) + t.pow(104) + Gf128::one();
}

// Decimated WG permutation WGP(x^d); d must be invertible mod 127 so the
// decimation is itself a permutation.
inline Gf128 wgp(Gf128 x, unsigned d = 13) {
    if (std::gcd<unsigned, unsigned>(d, 127) != 1)
        throw usage_error("wgp: decimation d must satisfy gcd(d, 127) = 1");
    return wg_permutation(x.pow(d));
}

// Decimated WG transformation WGT(x) = Tr(WGP(x^d)), the filter bit.
inline bool wgt(Gf128 x, unsigned d = 13) { return wgp(x, d).trace_bit(); }

} // namespace fxl
