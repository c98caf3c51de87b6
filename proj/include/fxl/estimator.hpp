#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>

#include "fxl/annihilator.hpp"
#include "fxl/cipher.hpp"

namespace fxl {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt binom_big(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt acc = 1;
    for (unsigned i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i;
    }
    return acc;
}

// T = sum_{i=0}^{D} C(n, i): the number of square-free monomials of degree
// at most D, i.e. the linearized variable count.
inline BigInt monomial_count(unsigned n, unsigned D) {
    BigInt acc = 0;
    for (unsigned i = 0; i <= std::min(n, D); ++i) acc += binom_big(n, i);
    return acc;
}

inline double log2_big(const BigInt& v) {
    if (v <= 0) throw usage_error("log2_big: nonpositive argument");
    return std::log2(static_cast<double>(v));
}

// Independent equations contributed per keystream bit of one side:
//   k' = sum_{f in S'} sum_{i=0}^{D - deg f} C(n - m, i).
// Members of degree above D contribute nothing.
inline BigInt k_prime(const std::map<int, std::size_t>& degree_histogram, unsigned n, unsigned m, unsigned D) {
    if (m > n) throw usage_error("k_prime: m > n");
    BigInt acc = 0;
    for (const auto& [deg, count] : degree_histogram) {
        if (deg < 0 || static_cast<unsigned>(deg) > D) continue;
        BigInt mult = monomial_count(n - m, D - static_cast<unsigned>(deg));
        acc += mult * static_cast<unsigned long>(count);
    }
    return acc;
}

inline BigInt k_prime(const IndependentSet& s, unsigned n, unsigned m, unsigned D) {
    return k_prime(s.degree_histogram, n, m, D);
}

// t = ceil(T / min(k0, k1)), the keystream requirement.
inline BigInt required_keystream(const BigInt& k0, const BigInt& k1, unsigned n, unsigned D) {
    BigInt k = std::min(k0, k1);
    if (k <= 0) throw analysis_error("required_keystream: no usable annihilators (k' = 0)");
    BigInt T = monomial_count(n, D);
    return (T + k - 1) / k;
}

// The size estimates of the linearization: N generated equations for t
// keystream bits of degree-d equations, T monomial columns.
struct XlSizes {
    BigInt N;
    BigInt T;
};

inline XlSizes xl_size_estimates(const BigInt& t, unsigned n, unsigned d, unsigned D) {
    if (D < d) throw usage_error("xl_size_estimates: D < d");
    return {t * monomial_count(n, D - d), monomial_count(n, D)};
}

inline constexpr double kOmegaStrassen = 2.8073549220576042; // log2(7)
inline constexpr double kOmegaBest = 2.3728596;

// Exponent of the elimination cost estimate T^omega.
inline double complexity_log2(const BigInt& T, double omega = kOmegaStrassen) {
    if (T < 1) throw usage_error("complexity_log2: T must be >= 1");
    if (T == 1) return 0.0;
    return omega * log2_big(T);
}

// Keystream demand of the single-annihilator attack: C(n, e) bits for one
// annihilator of degree e.
inline BigInt baseline_cm_keystream(unsigned n, unsigned e) {
    if (e > n) throw usage_error("baseline_cm_keystream: e > n");
    return binom_big(n, e);
}

struct EstimatorParams {
    double omega = kOmegaStrassen;
    double security_level_bits = 128.0;
    // The T^omega estimate drops constants and memory; within this many bits
    // of the security level the attack is not counted as beating brute force.
    double brute_force_margin_bits = 6.0;
};

enum class Feasibility {
    kFeasible,
    kInfeasibleKeystream, // t above the designer's consecutive-bit limit
    kBruteForceWorse,     // elimination cost at or beyond the brute-force ballpark
};

inline const char* to_string(Feasibility f) {
    switch (f) {
        case Feasibility::kFeasible: return "feasible";
        case Feasibility::kInfeasibleKeystream: return "infeasible: t above keystream limit";
        case Feasibility::kBruteForceWorse: return "worse than brute force";
    }
    return "?";
}

// Everything Step 5 derives for one (cipher, D) pair. Exact integers except
// the two printed exponents.
struct EstimateReport {
    std::string cipher;
    unsigned D = 0;
    unsigned n = 0, m = 0;
    BigInt k0, k1;
    BigInt t;
    BigInt T; // full monomial count
    BigInt N; // generated equations for this t
    double log2_t = 0;
    double complexity_log2 = 0; // omega * log2(C(n, D)), the leading-term cost
    Feasibility feasibility = Feasibility::kFeasible;
    std::uint64_t max_keystream = 0;
};

// Steps 1-4 of the attack on a filter: both Groebner bases, their
// expansions to degree D, and the independent subsets.
struct FilterAnalysis {
    int D = 0;
    int ai = 0;
    AnnihilatorBasis basis0, basis1;
    IndependentSet s0, s1;
    int d = 0; // max degree across both G'
};

inline FilterAnalysis analyze_filter(const BoolPoly& filter, int D) {
    FilterAnalysis fa;
    fa.D = D;
    fa.basis0 = reduced_gb_of_annihilator_ideal(filter, 0);
    fa.basis1 = reduced_gb_of_annihilator_ideal(filter, 1);
    if (fa.basis0.unit_ideal || fa.basis1.unit_ideal)
        throw analysis_error("analyze_filter: constant filter has no usable annihilator pair");
    fa.ai = algebraic_immunity(filter);
    for (const auto& g : fa.basis0.gb_prime) fa.d = std::max(fa.d, g.degree());
    for (const auto& g : fa.basis1.gb_prime) fa.d = std::max(fa.d, g.degree());
    if (D < fa.d) throw usage_error("analyze_filter: D must be at least the basis degree d = " + std::to_string(fa.d));
    fa.s0 = independent_subset(expand_to_degree(fa.basis0, D));
    fa.s1 = independent_subset(expand_to_degree(fa.basis1, D));
    return fa;
}

inline EstimateReport build_estimate(const CipherSpec& spec, unsigned D, const EstimatorParams& params = {},
                                     const FilterAnalysis* analysis = nullptr) {
    FilterAnalysis local;
    if (!analysis) {
        local = analyze_filter(spec.filter, static_cast<int>(D));
        analysis = &local;
    }
    EstimateReport r;
    r.cipher = spec.name;
    r.D = D;
    r.n = static_cast<unsigned>(spec.nbits());
    r.m = 7;
    r.k0 = k_prime(analysis->s0, r.n, r.m, D);
    r.k1 = k_prime(analysis->s1, r.n, r.m, D);
    r.t = required_keystream(r.k0, r.k1, r.n, D);
    XlSizes sizes = xl_size_estimates(r.t, r.n, static_cast<unsigned>(analysis->d), D);
    r.T = sizes.T;
    r.N = sizes.N;
    r.log2_t = log2_big(r.t);
    r.complexity_log2 = complexity_log2(binom_big(r.n, D), params.omega);
    r.max_keystream = spec.max_keystream;
    if (spec.max_keystream && r.t > spec.max_keystream)
        r.feasibility = Feasibility::kInfeasibleKeystream;
    else if (r.complexity_log2 + params.brute_force_margin_bits >= params.security_level_bits)
        r.feasibility = Feasibility::kBruteForceWorse;
    else
        r.feasibility = Feasibility::kFeasible;
    return r;
}

} // namespace fxl
