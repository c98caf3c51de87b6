#pragma once

#include <cstdint>
#include <vector>

#include "fxl/bool_poly.hpp"

namespace fxl {

// Value table of a Boolean function on all 2^m points. Point v maps bit i of
// its index to the value of x_{i+1}.
class TruthTable {
public:
    static constexpr int kMaxVars = 24; // enumeration bound

    explicit TruthTable(int m) : m_(m) {
        if (m < 0 || m > kMaxVars)
            throw resource_error("TruthTable: variable count above the 2^24 enumeration bound");
        bits_.assign(words(), 0);
    }

    int nvars() const { return m_; }
    std::uint64_t size() const { return std::uint64_t{1} << m_; }

    bool get(std::uint64_t point) const {
        return (bits_[point >> 6] >> (point & 63)) & 1;
    }

    void set(std::uint64_t point, bool value) {
        std::uint64_t mask = std::uint64_t{1} << (point & 63);
        if (value)
            bits_[point >> 6] |= mask;
        else
            bits_[point >> 6] &= ~mask;
    }

    std::uint64_t popcount() const {
        std::uint64_t c = 0;
        for (auto w : bits_) c += static_cast<std::uint64_t>(std::popcount(w));
        return c;
    }

    friend bool operator==(const TruthTable& a, const TruthTable& b) {
        return a.m_ == b.m_ && a.bits_ == b.bits_;
    }
    friend bool operator!=(const TruthTable& a, const TruthTable& b) { return !(a == b); }

    // In-place Moebius transform (self-inverse over GF(2)): converts between
    // the value table and the ANF coefficient table.
    void moebius_in_place() {
        std::uint64_t n = size();
        // Sub-word strides via masked shifts.
        static constexpr std::uint64_t masks[6] = {
            0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
            0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL,
        };
        for (int k = 0; k < m_ && k < 6; ++k)
            for (auto& w : bits_) w ^= (w & masks[k]) << (1u << k);
        for (int k = 6; k < m_; ++k) {
            std::uint64_t stride = std::uint64_t{1} << (k - 6);
            for (std::uint64_t block = 0; block < n / 64; block += 2 * stride)
                for (std::uint64_t i = 0; i < stride; ++i)
                    bits_[block + stride + i] ^= bits_[block + i];
        }
    }

private:
    std::size_t words() const { return static_cast<std::size_t>((size() + 63) / 64); }

    int m_;
    std::vector<std::uint64_t> bits_;
};

inline TruthTable to_truth_table(const BoolPoly& p) {
    if (p.nvars() > TruthTable::kMaxVars)
        throw resource_error("to_truth_table: nvars above the enumeration bound");
    TruthTable t(p.nvars());
    for (const auto& m : p.support()) {
        std::uint64_t idx = 0;
        for (int v : m.vars()) idx |= std::uint64_t{1} << (v - 1);
        t.set(idx, !t.get(idx)); // coefficient table
    }
    t.moebius_in_place();
    return t;
}

inline BoolPoly from_truth_table(const TruthTable& t) {
    TruthTable coeffs = t;
    coeffs.moebius_in_place();
    std::vector<Monomial> support;
    for (std::uint64_t idx = 0; idx < coeffs.size(); ++idx) {
        if (!coeffs.get(idx)) continue;
        Monomial m;
        std::uint64_t v = idx;
        while (v) {
            int b = std::countr_zero(v);
            m.set(b + 1);
            v &= v - 1;
        }
        support.push_back(m);
    }
    return BoolPoly(t.nvars(), std::move(support));
}

} // namespace fxl
