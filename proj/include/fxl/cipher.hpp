#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fxl/bit_matrix.hpp"
#include "fxl/bool_poly.hpp"
#include "fxl/errors.hpp"
#include "fxl/gf128.hpp"
#include "fxl/truth_table.hpp"

namespace fxl {

namespace detail {

// Deterministic Miller-Rabin for 64-bit inputs.
inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while (!(d & 1)) d >>= 1, ++s;
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::uint64_t pollard_rho(std::uint64_t n) {
    if (!(n & 1)) return 2;
    for (std::uint64_t c = 1;; ++c) {
        auto f = [&](std::uint64_t x) { return (mulmod_u64(x, x, n) + c) % n; };
        std::uint64_t x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            std::uint64_t diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
    }
}

inline void factor_u64(std::uint64_t n, std::vector<std::uint64_t>& primes) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        primes.push_back(n);
        return;
    }
    std::uint64_t d = pollard_rho(n);
    factor_u64(d, primes);
    factor_u64(n / d, primes);
}

// Polynomials over GF(2^7), little-endian coefficients, used only to vet
// feedback polynomials at construction.
using GfPoly = std::vector<Gf128>;

inline GfPoly gfpoly_mulmod(const GfPoly& a, const GfPoly& b, const GfPoly& mod) {
    std::size_t deg_mod = mod.size() - 1;
    GfPoly prod(a.size() + b.size() - 1, Gf128::zero());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = prod[i + j] + a[i] * b[j];
    }
    // mod is monic of degree deg_mod
    for (std::size_t i = prod.size(); i-- > deg_mod;) {
        if (prod[i].is_zero()) continue;
        Gf128 c = prod[i];
        prod[i] = Gf128::zero();
        for (std::size_t j = 0; j < deg_mod; ++j) prod[i - deg_mod + j] = prod[i - deg_mod + j] + c * mod[j];
    }
    prod.resize(deg_mod);
    return prod;
}

inline GfPoly gfpoly_powmod(const GfPoly& base, std::uint64_t e, const GfPoly& mod) {
    GfPoly acc{Gf128::one()};
    acc.resize(mod.size() - 1, Gf128::zero());
    GfPoly b = base;
    while (e) {
        if (e & 1) acc = gfpoly_mulmod(acc, b, mod);
        b = gfpoly_mulmod(b, b, mod);
        e >>= 1;
    }
    return acc;
}

inline bool gfpoly_is_x(const GfPoly& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        Gf128 want = (i == 1) ? Gf128::one() : Gf128::zero();
        if (p[i] != want) return false;
    }
    return true;
}

inline bool gfpoly_is_one(const GfPoly& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        Gf128 want = (i == 0) ? Gf128::one() : Gf128::zero();
        if (p[i] != want) return false;
    }
    return true;
}

inline GfPoly gfpoly_gcd(GfPoly a, GfPoly b) {
    auto trim = [](GfPoly& p) {
        while (!p.empty() && p.back().is_zero()) p.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        // a mod b
        while (a.size() >= b.size() && !a.empty()) {
            Gf128 c = a.back() * b.back().inverse();
            std::size_t shift = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = a[shift + i] + c * b[i];
            trim(a);
        }
        std::swap(a, b);
    }
    if (!a.empty()) { // normalize monic
        Gf128 inv = a.back().inverse();
        for (auto& c : a) c = c * inv;
    }
    return a;
}

inline bool gfpoly_gcd_trivial(const GfPoly& a, const GfPoly& b) {
    return gfpoly_gcd(a, b).size() == 1; // any nonzero constant
}

} // namespace detail

// The register contents: words[0] is the oldest word (the one multiplied by
// omega in the feedback), words[a-1] the newest.
struct WordState {
    std::vector<Gf128> words;

    friend bool operator==(const WordState& a, const WordState& b) { return a.words == b.words; }
    friend bool operator!=(const WordState& a, const WordState& b) { return !(a == b); }

    std::string to_hex() const {
        std::string out;
        char buf[4];
        for (auto w : words) {
            std::snprintf(buf, sizeof buf, "%02x", w.bits());
            out += buf;
        }
        return out;
    }

    static WordState from_hex(const std::string& hex) {
        if (hex.size() % 2) throw usage_error("WordState::from_hex: odd length");
        WordState s;
        for (std::size_t i = 0; i < hex.size(); i += 2) {
            unsigned v = 0;
            auto nib = [&](char c) -> unsigned {
                if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
                if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
                if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
                throw usage_error("WordState::from_hex: bad hex digit");
            };
            v = nib(hex[i]) * 16 + nib(hex[i + 1]);
            if (v > 0x7f) throw usage_error("WordState::from_hex: word above 7 bits");
            s.words.push_back(Gf128(static_cast<std::uint8_t>(v)));
        }
        return s;
    }
};

// The ANF of the decimated WG transformation with d = 13 over GF(2^7),
// computed from the field model. Filter variable x_{j+1} is the coefficient
// of w^j of the filtered word.
inline const BoolPoly& wgt_anf() {
    static const BoolPoly anf = [] {
        TruthTable tt(7);
        for (std::uint64_t v = 0; v < 128; ++v) tt.set(v, wgt(Gf128(static_cast<std::uint8_t>(v))));
        return from_truth_table(tt);
    }();
    return anf;
}

// A word-oriented nonlinear filter generator over GF(2^7): linear feedback
//   S_{a+t} = sum_{j in feedback_taps} S_{j+t} + omega * S_{omega_tap+t}
// with a 7-variable Boolean filter applied to one word of the state.
struct CipherSpec {
    std::string name;
    int a = 0;                      // word count; n = 7a bits
    std::vector<int> feedback_taps; // indices with coefficient 1, ascending
    int omega_tap = 0;              // index with coefficient omega
    int filter_word = 0;            // word fed to the filter
    BoolPoly filter;                // 7-variable ANF
    std::uint64_t max_keystream = 0; // designer limit; 0 = unlimited
    bool has_init_phase = false;    // WG-PRNG style nonlinear initialization
    unsigned decimation = 13;       // WGP decimation used in the init phase

    int nbits() const { return 7 * a; }

    static CipherSpec wg_prng();
    static CipherSpec toy3();
    static CipherSpec toy5();
    static CipherSpec builtin(const std::string& name);

    static CipherSpec parse_config(const std::string& text, const std::string& filename = "<config>");
    std::string to_config_string() const;

    void validate() const;
};

inline CipherSpec CipherSpec::wg_prng() {
    CipherSpec s;
    s.name = "wg-prng";
    s.a = 37;
    s.feedback_taps = {6, 8, 12, 13, 19, 24, 26, 30, 31};
    s.omega_tap = 0;
    s.filter_word = 36;
    s.filter = wgt_anf();
    s.max_keystream = std::uint64_t{1} << 18;
    s.has_init_phase = true;
    s.validate();
    return s;
}

inline CipherSpec CipherSpec::toy3() {
    CipherSpec s;
    s.name = "toy3";
    s.a = 3;
    s.feedback_taps = {1}; // x^3 + x + omega
    s.omega_tap = 0;
    s.filter_word = 2;
    s.filter = wgt_anf();
    s.validate();
    return s;
}

inline CipherSpec CipherSpec::toy5() {
    CipherSpec s;
    s.name = "toy5";
    s.a = 5;
    s.feedback_taps = {2}; // x^5 + x^2 + omega
    s.omega_tap = 0;
    s.filter_word = 4;
    s.filter = wgt_anf();
    s.validate();
    return s;
}

inline CipherSpec CipherSpec::builtin(const std::string& name) {
    if (name == "wg-prng") return wg_prng();
    if (name == "toy3") return toy3();
    if (name == "toy5") return toy5();
    throw usage_error("unknown builtin cipher '" + name + "' (choose wg-prng, toy3, toy5)");
}

inline void CipherSpec::validate() const {
    if (a < 2) throw usage_error("CipherSpec: need at least 2 words");
    if (7 * a > Monomial::kMaxVars) throw usage_error("CipherSpec: state too wide");
    if (filter.nvars() != 7) throw usage_error("CipherSpec: filter must have exactly 7 variables");
    if (filter_word < 0 || filter_word >= a) throw usage_error("CipherSpec: filter_word out of range");
    if (omega_tap < 0 || omega_tap >= a) throw usage_error("CipherSpec: omega_tap out of range");
    for (int t : feedback_taps)
        if (t < 1 || t >= a) throw usage_error("CipherSpec: feedback tap out of range [1, a-1]");
    if (!std::is_sorted(feedback_taps.begin(), feedback_taps.end()) ||
        std::adjacent_find(feedback_taps.begin(), feedback_taps.end()) != feedback_taps.end())
        throw usage_error("CipherSpec: feedback taps must be strictly ascending");

    // Feedback polynomial x^a + sum x^j + omega x^omega_tap over GF(2^7).
    detail::GfPoly f(static_cast<std::size_t>(a) + 1, Gf128::zero());
    f[static_cast<std::size_t>(a)] = Gf128::one();
    for (int t : feedback_taps) f[static_cast<std::size_t>(t)] = f[static_cast<std::size_t>(t)] + Gf128::one();
    f[static_cast<std::size_t>(omega_tap)] = f[static_cast<std::size_t>(omega_tap)] + Gf128::omega();

    // Irreducibility over GF(q), q = 2^7 (Rabin): x^(q^a) = x mod f and
    // gcd(x^(q^(a/p)) - x, f) = 1 for every prime p | a.
    detail::GfPoly x{Gf128::zero(), Gf128::one()};
    auto frobenius_steps = [&](unsigned steps) {
        detail::GfPoly t = x;
        t.resize(static_cast<std::size_t>(a), Gf128::zero());
        for (unsigned s = 0; s < steps; ++s) t = detail::gfpoly_powmod(t, 128, f);
        return t;
    };
    if (!detail::gfpoly_is_x(frobenius_steps(static_cast<unsigned>(a))))
        throw usage_error("CipherSpec: feedback polynomial is not irreducible over GF(2^7)");
    std::vector<std::uint64_t> aprimes;
    detail::factor_u64(static_cast<std::uint64_t>(a), aprimes);
    std::sort(aprimes.begin(), aprimes.end());
    aprimes.erase(std::unique(aprimes.begin(), aprimes.end()), aprimes.end());
    for (auto p : aprimes) {
        detail::GfPoly t = frobenius_steps(static_cast<unsigned>(a / static_cast<int>(p)));
        // t - x
        t[1] = t[1] + Gf128::one();
        if (!detail::gfpoly_gcd_trivial(t, f))
            throw usage_error("CipherSpec: feedback polynomial is not irreducible over GF(2^7)");
    }

    // Primitivity: verifiable exactly while 2^(7a)-1 fits 64 bits. For wider
    // states (wg-prng) irreducibility is as far as local checking goes.
    if (7 * a < 64) {
        std::uint64_t group = (std::uint64_t{1} << (7 * a)) - 1;
        std::vector<std::uint64_t> primes;
        detail::factor_u64(group, primes);
        std::sort(primes.begin(), primes.end());
        primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
        for (auto p : primes) {
            detail::GfPoly t = detail::gfpoly_powmod(x, group / p, f);
            if (detail::gfpoly_is_one(t))
                throw usage_error("CipherSpec: feedback polynomial is irreducible but not primitive");
        }
    }
}

// One clock of the linear update: words shift down, the new top word is the
// tap sum plus omega times the omega word.
inline WordState step(const CipherSpec& spec, const WordState& state) {
    if (static_cast<int>(state.words.size()) != spec.a)
        throw usage_error("step: state has wrong word count");
    WordState next;
    next.words.reserve(static_cast<std::size_t>(spec.a));
    for (int j = 1; j < spec.a; ++j) next.words.push_back(state.words[static_cast<std::size_t>(j)]);
    Gf128 top = Gf128::omega() * state.words[static_cast<std::size_t>(spec.omega_tap)];
    for (int t : spec.feedback_taps) top = top + state.words[static_cast<std::size_t>(t)];
    next.words.push_back(top);
    return next;
}

// One round of the WG-PRNG initialization: the linear feedback plus the
// decimated WG permutation of the newest word.
inline WordState init_round(const CipherSpec& spec, const WordState& state) {
    WordState next = step(spec, state);
    Gf128& top = next.words.back();
    top = top + wgp(state.words.back(), spec.decimation);
    return next;
}

inline WordState inverse_init_round(const CipherSpec& spec, const WordState& state) {
    if (static_cast<int>(state.words.size()) != spec.a)
        throw usage_error("inverse_init_round: state has wrong word count");
    // state = (S_{t+1}, ..., S_{a+t}); recover S_t from the feedback relation.
    Gf128 acc = state.words.back(); // S_{a+t}
    acc = acc + wgp(state.words[static_cast<std::size_t>(spec.a - 2)], spec.decimation);
    for (int t : spec.feedback_taps) acc = acc + state.words[static_cast<std::size_t>(t - 1)];
    if (spec.omega_tap != 0)
        throw usage_error("inverse_init_round: only omega_tap = 0 supported");
    Gf128 s0 = Gf128::omega().inverse() * acc;
    WordState prev;
    prev.words.push_back(s0);
    for (int j = 0; j + 1 < spec.a; ++j) prev.words.push_back(state.words[static_cast<std::size_t>(j)]);
    return prev;
}

inline constexpr int kInitRounds = 74;

// The full initialization phase: 74 nonlinear rounds on the loaded seed.
inline WordState init_phase(const CipherSpec& spec, const WordState& seed) {
    if (!spec.has_init_phase)
        throw usage_error("init_phase: cipher '" + spec.name + "' has no initialization phase");
    WordState s = seed;
    for (int r = 0; r < kInitRounds; ++r) s = init_round(spec, s);
    return s;
}

// Generates t keystream bits from the given state (post-initialization for
// WG-PRNG). Bit i is the filter applied to the filter word of L^i(state).
inline std::vector<bool> keystream(const CipherSpec& spec, const WordState& state, std::uint64_t t,
                                   bool enforce_limit = false) {
    if (enforce_limit && spec.max_keystream && t > spec.max_keystream)
        throw usage_error("keystream: requested " + std::to_string(t) +
                          " bits, above the designer limit of " + std::to_string(spec.max_keystream) +
                          " consecutive bits");
    TruthTable tt = to_truth_table(spec.filter);
    std::vector<bool> z;
    z.reserve(static_cast<std::size_t>(t));
    WordState s = state;
    for (std::uint64_t i = 0; i < t; ++i) {
        z.push_back(tt.get(s.words[static_cast<std::size_t>(spec.filter_word)].bits()));
        s = step(spec, s);
    }
    return z;
}

// State bits flattened for the algebraic model: bit 7j+i of the result is
// the coefficient of w^i in word j, i.e. variable x_{7j+i+1}.
inline BitVec state_bits(const WordState& state) {
    BitVec v(state.words.size() * 7);
    for (std::size_t j = 0; j < state.words.size(); ++j)
        for (int i = 0; i < 7; ++i)
            if (state.words[j].bit(i)) v.set(7 * j + static_cast<std::size_t>(i));
    return v;
}

inline WordState state_from_bits(const BitVec& bits) {
    if (bits.size() % 7) throw usage_error("state_from_bits: length not a multiple of 7");
    WordState s;
    for (std::size_t j = 0; j < bits.size() / 7; ++j) {
        std::uint8_t w = 0;
        for (int i = 0; i < 7; ++i)
            if (bits.get(7 * j + static_cast<std::size_t>(i))) w |= static_cast<std::uint8_t>(1u << i);
        s.words.push_back(Gf128(w));
    }
    return s;
}

using LinearUpdateMatrix = BitMatrix;

// The n x n bit matrix of one clock: bits(step(s)) = M * bits(s).
inline LinearUpdateMatrix update_matrix(const CipherSpec& spec) {
    int n = spec.nbits();
    BitMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    // Shift part: new word j = old word j+1.
    for (int j = 0; j + 1 < spec.a; ++j)
        for (int i = 0; i < 7; ++i)
            m.set(static_cast<std::size_t>(7 * j + i), static_cast<std::size_t>(7 * (j + 1) + i));
    // Top word: taps with coefficient 1.
    int top = 7 * (spec.a - 1);
    for (int t : spec.feedback_taps)
        for (int i = 0; i < 7; ++i) {
            std::size_t r = static_cast<std::size_t>(top + i), c = static_cast<std::size_t>(7 * t + i);
            m.set(r, c, !m.get(r, c));
        }
    // Multiplication by omega as a 7x7 block: w*w^k = w^{k+1}, w^7 = w^3+w^2+w+1.
    for (int k = 0; k < 7; ++k) {
        Gf128 img = Gf128::omega() * Gf128(static_cast<std::uint8_t>(1u << k));
        for (int i = 0; i < 7; ++i)
            if (img.bit(i)) {
                std::size_t r = static_cast<std::size_t>(top + i);
                std::size_t c = static_cast<std::size_t>(7 * spec.omega_tap + k);
                m.set(r, c, !m.get(r, c));
            }
    }
    return m;
}

// Matrix-vector product over GF(2): returns M * v.
inline BitVec apply_matrix(const BitMatrix& m, const BitVec& v) {
    if (m.cols() != v.size()) throw usage_error("apply_matrix: dimension mismatch");
    BitVec out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::uint64_t acc = 0;
        auto row = m.row(r);
        auto vw = v.word_span();
        for (std::size_t i = 0; i < row.size(); ++i) acc ^= row[i] & vw[i];
        if (std::popcount(acc) & 1) out.set(r);
    }
    return out;
}

// --- cipher spec config files -------------------------------------------
//
// Plain key = value lines, '#' comments. Keys: a, feedback_taps, omega_tap,
// filter_word, filter (ANF text or the builtin name WGT13), max_keystream,
// and optionally name.

inline CipherSpec CipherSpec::parse_config(const std::string& text, const std::string& filename) {
    CipherSpec s;
    s.name = "custom";
    bool saw_a = false, saw_filter = false, saw_filter_word = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg, std::size_t col = 1) -> void {
        throw usage_error(filename + ":" + std::to_string(lineno) + ":" + std::to_string(col) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        std::string stripped = line.substr(0, line.find('#'));
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        auto b = std::find_if(stripped.begin(), stripped.end(), notspace);
        if (b == stripped.end()) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        auto trim = [&](std::string v) {
            auto s1 = std::find_if(v.begin(), v.end(), notspace);
            auto s2 = std::find_if(v.rbegin(), v.rend(), notspace).base();
            return (s1 < s2) ? std::string(s1, s2) : std::string();
        };
        std::string key = trim(stripped.substr(0, eq));
        std::string val = trim(stripped.substr(eq + 1));
        if (val.empty()) fail("missing value for '" + key + "'", eq + 2);
        auto parse_int = [&](const std::string& v) {
            try {
                std::size_t used = 0;
                long out = std::stol(v, &used);
                if (used != v.size()) throw std::invalid_argument("");
                return out;
            } catch (const std::exception&) {
                fail("not an integer: '" + v + "'", eq + 2);
                return 0l;
            }
        };
        if (key == "name") {
            s.name = val;
        } else if (key == "a") {
            s.a = static_cast<int>(parse_int(val));
            saw_a = true;
        } else if (key == "omega_tap") {
            s.omega_tap = static_cast<int>(parse_int(val));
        } else if (key == "filter_word") {
            s.filter_word = static_cast<int>(parse_int(val));
            saw_filter_word = true;
        } else if (key == "max_keystream") {
            s.max_keystream = static_cast<std::uint64_t>(parse_int(val));
        } else if (key == "feedback_taps") {
            s.feedback_taps.clear();
            std::istringstream ts(val);
            std::string tok;
            while (std::getline(ts, tok, ',')) s.feedback_taps.push_back(static_cast<int>(parse_int(trim(tok))));
            std::sort(s.feedback_taps.begin(), s.feedback_taps.end());
        } else if (key == "filter") {
            if (val == "WGT13")
                s.filter = wgt_anf();
            else {
                try {
                    s.filter = BoolPoly::parse(val, 7);
                } catch (const usage_error& e) {
                    fail(e.what(), eq + 2);
                }
            }
            saw_filter = true;
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    ++lineno;
    if (!saw_a) fail("missing required key 'a'");
    if (!saw_filter) fail("missing required key 'filter'");
    if (!saw_filter_word) s.filter_word = s.a - 1;
    try {
        s.validate();
    } catch (const usage_error& e) {
        throw usage_error(filename + ": " + e.what());
    }
    return s;
}

inline std::string CipherSpec::to_config_string() const {
    std::ostringstream os;
    os << "name = " << name << "\n";
    os << "a = " << a << "\n";
    os << "feedback_taps = ";
    for (std::size_t i = 0; i < feedback_taps.size(); ++i) os << (i ? "," : "") << feedback_taps[i];
    os << "\n";
    os << "omega_tap = " << omega_tap << "\n";
    os << "filter_word = " << filter_word << "\n";
    os << "filter = " << (filter == wgt_anf() ? "WGT13" : filter.to_string()) << "\n";
    os << "max_keystream = " << max_keystream << "\n";
    return os.str();
}

} // namespace fxl
