#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "fxl/errors.hpp"

namespace fxl {

// Degree of the zero polynomial. Chosen as a sentinel that loses against
// every real degree so max-folds need no special casing.
inline constexpr int kNegInfDegree = std::numeric_limits<int>::min();

// Exact C(n, k) in 64 bits; throws std::overflow_error if it does not fit.
inline std::uint64_t binom_u64(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 acc = 1;
    for (unsigned i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw std::overflow_error("binom_u64: C(n,k) exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

// A square-free monomial: a set of 1-based variable indices stored as a
// fixed-width bitset. The constant monomial 1 is the empty set.
class Monomial {
public:
    static constexpr int kMaxVars = 320;
    static constexpr int kWords = kMaxVars / 64;

    constexpr Monomial() : w_{} {}

    static Monomial one() { return Monomial{}; }

    static Monomial var(int i) {
        Monomial m;
        m.set(i);
        return m;
    }

    template <typename It>
    static Monomial from_vars(It first, It last) {
        Monomial m;
        for (; first != last; ++first) m.set(*first);
        return m;
    }

    static Monomial from_vars(std::initializer_list<int> vars) {
        return from_vars(vars.begin(), vars.end());
    }

    void set(int i) {
        check_index(i);
        w_[static_cast<unsigned>(i - 1) >> 6] |= std::uint64_t{1} << ((i - 1) & 63);
    }

    bool contains(int i) const {
        check_index(i);
        return (w_[static_cast<unsigned>(i - 1) >> 6] >> ((i - 1) & 63)) & 1;
    }

    int degree() const {
        int d = 0;
        for (auto w : w_) d += std::popcount(w);
        return d;
    }

    bool is_one() const {
        for (auto w : w_)
            if (w) return false;
        return true;
    }

    // Square-free product: x_i^2 = x_i makes multiplication a set union.
    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r;
        for (int i = 0; i < kWords; ++i) r.w_[i] = a.w_[i] | b.w_[i];
        return r;
    }

    Monomial without(int i) const {
        check_index(i);
        Monomial m = *this;
        m.w_[static_cast<unsigned>(i - 1) >> 6] &= ~(std::uint64_t{1} << ((i - 1) & 63));
        return m;
    }

    bool divides(const Monomial& other) const {
        for (int i = 0; i < kWords; ++i)
            if (w_[i] & ~other.w_[i]) return false;
        return true;
    }

    bool disjoint(const Monomial& other) const {
        for (int i = 0; i < kWords; ++i)
            if (w_[i] & other.w_[i]) return false;
        return true;
    }

    int max_var() const { // 0 if constant
        for (int i = kWords - 1; i >= 0; --i)
            if (w_[i]) return 64 * i + 64 - std::countl_zero(w_[i]);
        return 0;
    }

    std::vector<int> vars() const { // ascending
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(degree()));
        for (int i = 0; i < kWords; ++i) {
            std::uint64_t w = w_[i];
            while (w) {
                int b = std::countr_zero(w);
                out.push_back(64 * i + b + 1);
                w &= w - 1;
            }
        }
        return out;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.w_ == b.w_; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return a.w_ != b.w_; }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto w : w_) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h);
    }

    const std::array<std::uint64_t, kWords>& words() const { return w_; }

private:
    static void check_index(int i) {
        if (i < 1 || i > kMaxVars)
            throw usage_error("Monomial: variable index out of range [1, 320]");
    }

    std::array<std::uint64_t, kWords> w_;
};

// Degree reverse lexicographic comparison: lower total degree first; on equal
// degree the monomial containing the largest differing variable is smaller
// (the rightmost nonzero component of the exponent difference is positive).
inline int degrevlex_cmp(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db ? -1 : 1;
    for (int i = Monomial::kWords - 1; i >= 0; --i) {
        std::uint64_t diff = a.words()[i] ^ b.words()[i];
        if (diff) {
            int bit = 63 - std::countl_zero(diff);
            return ((a.words()[i] >> bit) & 1) ? -1 : 1;
        }
    }
    return 0;
}

inline bool degrevlex_less(const Monomial& a, const Monomial& b) {
    return degrevlex_cmp(a, b) < 0;
}

inline bool operator<(const Monomial& a, const Monomial& b) { return degrevlex_less(a, b); }

// Rank/unrank of square-free monomials of degree <= D over n variables in
// ascending degrevlex order. Ranks fit 64 bits or construction throws.
class MonomialIndex {
public:
    MonomialIndex(int nvars, int max_degree) : n_(nvars), d_(max_degree) {
        if (nvars < 0 || nvars > Monomial::kMaxVars)
            throw usage_error("MonomialIndex: nvars out of range");
        if (max_degree > nvars) d_ = nvars; // documented clamp
        if (d_ < 0) throw usage_error("MonomialIndex: negative degree bound");
        offsets_.resize(static_cast<std::size_t>(d_) + 2, 0);
        for (int d = 0; d <= d_; ++d)
            offsets_[static_cast<std::size_t>(d) + 1] =
                offsets_[static_cast<std::size_t>(d)] + binom_u64(static_cast<unsigned>(n_), static_cast<unsigned>(d));
    }

    int nvars() const { return n_; }
    int max_degree() const { return d_; }

    std::uint64_t count() const { return offsets_.back(); }

    // Monomials of degree exactly d start at this offset.
    std::uint64_t degree_offset(int d) const { return offsets_[static_cast<std::size_t>(d)]; }

    std::uint64_t rank(const Monomial& m) const {
        int d = m.degree();
        if (d > d_) throw usage_error("MonomialIndex::rank: degree exceeds bound");
        std::uint64_t r = offsets_[static_cast<std::size_t>(d)];
        auto vs = m.vars(); // ascending
        int universe = n_;
        for (int k = 0; k < d; ++k) {
            int a = vs[static_cast<std::size_t>(d - 1 - k)]; // descending
            if (a > n_) throw usage_error("MonomialIndex::rank: variable beyond nvars");
            int dd = d - k;
            r += binom_u64(static_cast<unsigned>(universe), static_cast<unsigned>(dd)) -
                 binom_u64(static_cast<unsigned>(a), static_cast<unsigned>(dd));
            universe = a - 1;
        }
        return r;
    }

    Monomial unrank(std::uint64_t r) const {
        if (r >= count()) throw usage_error("MonomialIndex::unrank: rank out of range");
        int d = d_;
        while (r < offsets_[static_cast<std::size_t>(d)]) --d;
        std::uint64_t rem = r - offsets_[static_cast<std::size_t>(d)];
        Monomial m;
        int universe = n_;
        for (int dd = d; dd >= 1; --dd) {
            for (int a = universe; a >= dd; --a) {
                std::uint64_t block = binom_u64(static_cast<unsigned>(a - 1), static_cast<unsigned>(dd - 1));
                if (rem < block) {
                    m.set(a);
                    universe = a - 1;
                    break;
                }
                rem -= block;
            }
        }
        return m;
    }

private:
    int n_;
    int d_;
    std::vector<std::uint64_t> offsets_;
};

// All square-free monomials over n variables of degree <= D, ascending
// degrevlex. D > n is clamped to n. Intended for small-to-moderate counts;
// the big-n attack paths work with MonomialIndex ranks instead.
inline std::vector<Monomial> monomials_up_to(int nvars, int max_degree) {
    MonomialIndex idx(nvars, max_degree);
    std::uint64_t total = idx.count();
    if (total > (std::uint64_t{1} << 32))
        throw resource_error("monomials_up_to: enumeration too large; use MonomialIndex", total / 8);
    std::vector<Monomial> out;
    out.reserve(static_cast<std::size_t>(total));
    // Generate degree-by-degree in rank order: larger leading variable first.
    std::vector<int> stack;
    auto gen = [&](auto&& self, int universe, int remaining) -> void {
        if (remaining == 0) {
            Monomial m;
            for (int v : stack) m.set(v);
            out.push_back(m);
            return;
        }
        for (int a = universe; a >= remaining; --a) {
            stack.push_back(a);
            self(self, a - 1, remaining - 1);
            stack.pop_back();
        }
    };
    for (int d = 0; d <= idx.max_degree(); ++d) gen(gen, nvars, d);
    return out;
}

} // namespace fxl

template <>
struct std::hash<fxl::Monomial> {
    std::size_t operator()(const fxl::Monomial& m) const noexcept { return m.hash(); }
};
