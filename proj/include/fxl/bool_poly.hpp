#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fxl/monomial.hpp"

namespace fxl {

// A Boolean function in algebraic normal form: a GF(2) sum of square-free
// monomials. Coefficients are present/absent, so the support set *is* the
// polynomial. Immutable value type; all operations return new values.
class BoolPoly {
public:
    BoolPoly() : nvars_(0) {}

    explicit BoolPoly(int nvars) : nvars_(nvars) { check_nvars(nvars); }

    BoolPoly(int nvars, std::vector<Monomial> support) : nvars_(nvars), support_(std::move(support)) {
        check_nvars(nvars);
        normalize();
        for (const auto& m : support_)
            if (m.max_var() > nvars_)
                throw usage_error("BoolPoly: monomial uses a variable beyond nvars");
    }

    static BoolPoly zero(int nvars) { return BoolPoly(nvars); }

    static BoolPoly one(int nvars) { return BoolPoly(nvars, {Monomial::one()}); }

    static BoolPoly var(int nvars, int i) {
        if (i < 1 || i > nvars) throw usage_error("BoolPoly::var: index out of range");
        return BoolPoly(nvars, {Monomial::var(i)});
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return support_.empty(); }

    // Support in ascending degrevlex order.
    const std::vector<Monomial>& support() const { return support_; }

    int degree() const {
        if (support_.empty()) return kNegInfDegree;
        return support_.back().degree(); // degrevlex is degree-compatible
    }

    Monomial leading_monomial() const {
        if (support_.empty()) throw usage_error("leading_monomial of zero polynomial");
        return support_.back();
    }

    bool contains(const Monomial& m) const {
        return std::binary_search(support_.begin(), support_.end(), m, degrevlex_less);
    }

    friend BoolPoly operator+(const BoolPoly& p, const BoolPoly& q) {
        require_same_nvars(p, q);
        // Symmetric difference of the two sorted supports.
        std::vector<Monomial> out;
        out.reserve(p.support_.size() + q.support_.size());
        auto a = p.support_.begin(), ae = p.support_.end();
        auto b = q.support_.begin(), be = q.support_.end();
        while (a != ae && b != be) {
            int c = degrevlex_cmp(*a, *b);
            if (c < 0)
                out.push_back(*a++);
            else if (c > 0)
                out.push_back(*b++);
            else {
                ++a;
                ++b;
            }
        }
        out.insert(out.end(), a, ae);
        out.insert(out.end(), b, be);
        return BoolPoly(p.nvars_, std::move(out), already_sorted_tag{});
    }

    // Product in the square-free quotient: monomials multiply by set union,
    // coefficients cancel over GF(2).
    friend BoolPoly operator*(const BoolPoly& p, const BoolPoly& q) {
        require_same_nvars(p, q);
        std::unordered_set<Monomial> acc;
        acc.reserve(p.support_.size() * 2);
        for (const auto& mp : p.support_)
            for (const auto& mq : q.support_) {
                Monomial m = mp * mq;
                auto it = acc.find(m);
                if (it == acc.end())
                    acc.insert(m);
                else
                    acc.erase(it);
            }
        std::vector<Monomial> out(acc.begin(), acc.end());
        std::sort(out.begin(), out.end(), degrevlex_less);
        return BoolPoly(p.nvars_, std::move(out), already_sorted_tag{});
    }

    BoolPoly operator*(const Monomial& m) const {
        std::unordered_set<Monomial> acc;
        acc.reserve(support_.size() * 2);
        for (const auto& s : support_) {
            Monomial t = s * m;
            auto it = acc.find(t);
            if (it == acc.end())
                acc.insert(t);
            else
                acc.erase(it);
        }
        std::vector<Monomial> out(acc.begin(), acc.end());
        std::sort(out.begin(), out.end(), degrevlex_less);
        return BoolPoly(nvars_, std::move(out), already_sorted_tag{});
    }

    BoolPoly plus_one() const { return *this + BoolPoly::one(nvars_); }

    // Evaluate at a point given as bits, point[i] = value of x_{i+1}.
    bool evaluate(const std::vector<bool>& point) const {
        if (static_cast<int>(point.size()) != nvars_)
            throw usage_error("BoolPoly::evaluate: point length != nvars");
        std::array<std::uint64_t, Monomial::kWords> packed{};
        for (std::size_t i = 0; i < point.size(); ++i)
            if (point[i]) packed[i >> 6] |= std::uint64_t{1} << (i & 63);
        bool acc = false;
        for (const auto& m : support_) {
            const auto& w = m.words();
            bool term = true;
            for (int i = 0; i < Monomial::kWords; ++i)
                if ((packed[static_cast<std::size_t>(i)] & w[static_cast<std::size_t>(i)]) !=
                    w[static_cast<std::size_t>(i)]) {
                    term = false;
                    break;
                }
            acc ^= term;
        }
        return acc;
    }

    // Evaluate with the point packed into a word, bit i = value of x_{i+1}.
    // Only valid for nvars <= 64.
    bool evaluate(std::uint64_t point) const {
        if (nvars_ > 64) throw usage_error("BoolPoly::evaluate(u64): nvars > 64");
        bool acc = false;
        for (const auto& m : support_) {
            std::uint64_t mask = m.words()[0];
            acc ^= (point & mask) == mask;
        }
        return acc;
    }

    friend bool operator==(const BoolPoly& p, const BoolPoly& q) {
        return p.nvars_ == q.nvars_ && p.support_ == q.support_;
    }
    friend bool operator!=(const BoolPoly& p, const BoolPoly& q) { return !(p == q); }

    // Text form: terms in decreasing degrevlex order joined by '+', each term
    // a '*'-joined list of "x<i>", the constant term "1", the zero polynomial
    // "0". Example: "x1*x2+x3+1".
    std::string to_string() const {
        if (support_.empty()) return "0";
        std::string out;
        for (auto it = support_.rbegin(); it != support_.rend(); ++it) {
            if (!out.empty()) out += '+';
            if (it->is_one()) {
                out += '1';
                continue;
            }
            bool first = true;
            for (int v : it->vars()) {
                if (!first) out += '*';
                first = false;
                out += 'x';
                out += std::to_string(v);
            }
        }
        return out;
    }

    // Parse the text form. nvars of the result is max(min_nvars, highest
    // variable index seen).
    static BoolPoly parse(std::string_view text, int min_nvars = 0) {
        std::vector<Monomial> support;
        int max_seen = 0;
        std::size_t pos = 0;
        auto skip_ws = [&] {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        };
        auto fail = [&](const std::string& msg) -> void {
            throw usage_error("polynomial parse error at offset " + std::to_string(pos) + ": " + msg);
        };
        skip_ws();
        if (pos == text.size()) fail("empty input");
        bool saw_zero = false;
        while (true) {
            skip_ws();
            Monomial m;
            bool is_const_one = false, is_const_zero = false;
            while (true) { // one term: factors joined by '*'
                skip_ws();
                if (pos >= text.size()) fail("expected a factor");
                char c = text[pos];
                if (c == '1') {
                    ++pos;
                    is_const_one = true;
                } else if (c == '0') {
                    ++pos;
                    is_const_zero = true;
                } else if (c == 'x' || c == 'X') {
                    ++pos;
                    std::size_t start = pos;
                    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
                    if (pos == start) fail("expected variable index after 'x'");
                    int v = std::stoi(std::string(text.substr(start, pos - start)));
                    if (v < 1 || v > Monomial::kMaxVars) fail("variable index out of range");
                    m.set(v);
                    max_seen = std::max(max_seen, v);
                } else {
                    fail("unexpected character");
                }
                skip_ws();
                if (pos < text.size() && text[pos] == '*') {
                    ++pos;
                    continue;
                }
                break;
            }
            if (is_const_zero) {
                if (!m.is_one() || is_const_one) fail("'0' cannot be part of a product");
                saw_zero = true;
            } else {
                support.push_back(m);
            }
            skip_ws();
            if (pos >= text.size()) break;
            if (text[pos] != '+') fail("expected '+' between terms");
            ++pos;
        }
        if (saw_zero && !support.empty()) fail("'0' mixed with other terms");
        int nv = std::max(min_nvars, max_seen);
        // XOR-duplicate semantics: a term listed twice cancels.
        std::sort(support.begin(), support.end(), degrevlex_less);
        std::vector<Monomial> reduced;
        for (std::size_t i = 0; i < support.size();) {
            std::size_t j = i;
            while (j < support.size() && support[j] == support[i]) ++j;
            if ((j - i) % 2) reduced.push_back(support[i]);
            i = j;
        }
        return BoolPoly(nv, std::move(reduced), already_sorted_tag{});
    }

private:
    struct already_sorted_tag {};

    BoolPoly(int nvars, std::vector<Monomial> support, already_sorted_tag)
        : nvars_(nvars), support_(std::move(support)) {}

    static void check_nvars(int nvars) {
        if (nvars < 0 || nvars > Monomial::kMaxVars)
            throw usage_error("BoolPoly: nvars out of range [0, 320]");
    }

    static void require_same_nvars(const BoolPoly& p, const BoolPoly& q) {
        if (p.nvars_ != q.nvars_)
            throw usage_error("BoolPoly: operands live in different variable counts");
    }

    void normalize() {
        std::sort(support_.begin(), support_.end(), degrevlex_less);
        std::vector<Monomial> reduced;
        reduced.reserve(support_.size());
        for (std::size_t i = 0; i < support_.size();) {
            std::size_t j = i;
            while (j < support_.size() && support_[j] == support_[i]) ++j;
            if ((j - i) % 2) reduced.push_back(support_[i]);
            i = j;
        }
        support_ = std::move(reduced);
    }

    int nvars_;
    std::vector<Monomial> support_; // ascending degrevlex, no duplicates
};

} // namespace fxl
