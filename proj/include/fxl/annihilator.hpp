#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "fxl/bit_matrix.hpp"
#include "fxl/bool_poly.hpp"
#include "fxl/truth_table.hpp"

namespace fxl {

// Reduced degrevlex Groebner basis data for one side of the annihilator
// pair: side 0 holds I_0 = <F> + field equations (annihilators of F+1),
// side 1 holds I_1 = <F+1> + field equations (annihilators of F).
struct AnnihilatorBasis {
    int side = 0;
    int m = 0;                     // filter variable count
    int filter_degree = 0;         // deg F
    std::vector<BoolPoly> gb_prime; // square-free members of degree <= deg F
    std::size_t dropped = 0;       // members above deg F (none for WGT)
    bool unit_ideal = false;       // empty variety: no usable annihilators
};

namespace detail {

// Buchberger-Moeller over a finite point set in GF(2)^m: walks square-free
// monomials in ascending degrevlex, keeping those whose evaluation vectors
// are independent (the standard monomials) and emitting a reduced basis
// element whenever a monomial's evaluation falls into the current span.
inline std::vector<BoolPoly> vanishing_ideal_gb(int m, const std::vector<std::uint64_t>& points) {
    std::vector<Monomial> order = monomials_up_to(m, m);
    std::vector<Monomial> leading;
    std::vector<Monomial> standard;
    struct Row {
        BitVec reduced;  // evaluation vector in echelon form
        std::size_t pivot;
        BitVec combo;    // expresses `reduced` over the standard monomials
    };
    std::vector<Row> rows;
    std::vector<BoolPoly> gb;
    std::size_t npts = points.size();

    for (const auto& mono : order) {
        bool skip = false;
        for (const auto& lt : leading)
            if (lt.divides(mono)) {
                skip = true;
                break;
            }
        if (skip) continue;

        BitVec v(npts);
        for (std::size_t p = 0; p < npts; ++p) {
            std::uint64_t pt = points[p];
            std::uint64_t mask = mono.words()[0];
            if ((pt & mask) == mask) v.set(p);
        }
        BitVec combo(standard.size() + 1); // room for a fresh slot
        for (const auto& row : rows)
            if (v.get(row.pivot)) {
                v.xor_with(row.reduced);
                for (std::size_t i = 0; i < row.combo.size(); ++i)
                    if (row.combo.get(i)) combo.flip(i);
            }
        std::size_t pivot = v.first_set();
        if (pivot == BitVec::npos) {
            // mono + combination of standard monomials vanishes on all points.
            std::vector<Monomial> support{mono};
            for (std::size_t i = 0; i < standard.size(); ++i)
                if (combo.get(i)) support.push_back(standard[i]);
            gb.emplace_back(m, std::move(support));
            leading.push_back(mono);
        } else {
            combo.set(standard.size());
            standard.push_back(mono);
            rows.push_back(Row{std::move(v), pivot, std::move(combo)});
            // Grow earlier combos lazily: widths differ, handled by bounds above.
        }
    }
    return gb;
}

} // namespace detail

// Reduced degrevlex Groebner basis of the side's annihilator ideal, field
// equations excluded, members above deg F dropped (with a generation check).
inline AnnihilatorBasis reduced_gb_of_annihilator_ideal(const BoolPoly& F, int side) {
    int m = F.nvars();
    if (m < 1 || m > 16) throw usage_error("reduced_gb_of_annihilator_ideal: need 1 <= m <= 16");
    if (side != 0 && side != 1) throw usage_error("side must be 0 or 1");

    TruthTable tt = to_truth_table(F);
    std::vector<std::uint64_t> points;
    for (std::uint64_t v = 0; v < tt.size(); ++v)
        if (tt.get(v) == (side == 1)) points.push_back(v);

    AnnihilatorBasis basis;
    basis.side = side;
    basis.m = m;
    basis.filter_degree = F.degree();
    if (points.empty()) {
        basis.unit_ideal = true;
        basis.gb_prime = {BoolPoly::one(m)};
        return basis;
    }

    std::vector<BoolPoly> gb = detail::vanishing_ideal_gb(m, points);
    for (auto& g : gb) {
        if (g.degree() <= basis.filter_degree)
            basis.gb_prime.push_back(std::move(g));
        else
            ++basis.dropped;
    }
    if (basis.dropped) {
        // Retained members must still cut out exactly the same point set.
        TruthTable keep(m);
        for (auto p : points) keep.set(p, true);
        for (std::uint64_t v = 0; v < keep.size(); ++v) {
            if (keep.get(v)) continue;
            bool separated = false;
            for (const auto& g : basis.gb_prime)
                if (g.evaluate(v)) {
                    separated = true;
                    break;
                }
            if (!separated)
                throw analysis_error("annihilator basis: members of degree <= deg F do not generate the ideal");
        }
    }
    return basis;
}

// Minimum degree of a nonzero annihilator of F or F+1. Computed by rank
// growth of the monomial evaluation vectors on each side's variety.
inline int algebraic_immunity(const BoolPoly& F) {
    int m = F.nvars();
    if (m < 1 || m > 16) throw usage_error("algebraic_immunity: need 1 <= m <= 16");
    TruthTable tt = to_truth_table(F);
    std::vector<std::uint64_t> on, off;
    for (std::uint64_t v = 0; v < tt.size(); ++v) (tt.get(v) ? on : off).push_back(v);
    if (on.empty() || off.empty()) return 0; // a constant annihilates one side

    auto min_degree_annihilator = [&](const std::vector<std::uint64_t>& pts) {
        // Smallest d with more degree-<=d monomials than independent
        // evaluation vectors on pts.
        IncrementalRef ref(pts.size());
        std::vector<Monomial> order = monomials_up_to(m, m);
        std::size_t seen = 0;
        int last_degree = 0;
        for (const auto& mono : order) {
            if (mono.degree() > last_degree) {
                if (seen > ref.rank()) return last_degree;
                last_degree = mono.degree();
            }
            BitVec v(pts.size());
            for (std::size_t p = 0; p < pts.size(); ++p) {
                std::uint64_t mask = mono.words()[0];
                if ((pts[p] & mask) == mask) v.set(p);
            }
            ref.add_row(std::move(v));
            ++seen;
        }
        return (seen > ref.rank()) ? last_degree : m;
    };

    return std::min(min_degree_annihilator(on), min_degree_annihilator(off));
}

// The products of Step 3: every basis member times every square-free
// monomial multiplier that keeps the (pre-reduction) degree within D.
struct ExpandedSet {
    int m = 0;
    int D = 0;
    struct Entry {
        BoolPoly poly;
        std::size_t gb_index;
        Monomial multiplier;
    };
    std::vector<Entry> polys; // distinct, nonzero
};

inline ExpandedSet expand_to_degree(const AnnihilatorBasis& basis, int D) {
    int max_deg = 0;
    for (const auto& g : basis.gb_prime) max_deg = std::max(max_deg, g.degree());
    if (D < max_deg) throw usage_error("expand_to_degree: D below the basis degree");
    ExpandedSet out;
    out.m = basis.m;
    out.D = D;
    std::unordered_map<std::size_t, std::vector<std::size_t>> seen; // hash -> indices
    auto poly_hash = [](const BoolPoly& p) {
        std::size_t h = 0x243f6a8885a308d3ULL;
        for (const auto& mono : p.support()) h = h * 0x100000001b3ULL + mono.hash();
        return h;
    };
    for (std::size_t j = 0; j < basis.gb_prime.size(); ++j) {
        const BoolPoly& g = basis.gb_prime[j];
        std::vector<Monomial> multipliers = monomials_up_to(basis.m, D - g.degree());
        for (const auto& alpha : multipliers) {
            BoolPoly prod = g * alpha;
            if (prod.is_zero()) continue;
            std::size_t h = poly_hash(prod);
            bool dup = false;
            for (auto idx : seen[h])
                if (out.polys[idx].poly == prod) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            seen[h].push_back(out.polys.size());
            out.polys.push_back({std::move(prod), j, alpha});
        }
    }
    return out;
}

// Greedy maximal linearly independent subset of an expanded set, low degree
// first so the short polynomials (which earn the most multipliers in the
// keystream estimate) are preferred.
struct IndependentSet {
    int m = 0;
    int D = 0;
    std::vector<BoolPoly> polys;
    std::map<int, std::size_t> degree_histogram;
};

inline IndependentSet independent_subset(const ExpandedSet& s) {
    IndependentSet out;
    out.m = s.m;
    out.D = s.D;
    std::vector<std::size_t> order(s.polys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const BoolPoly& pa = s.polys[a].poly;
        const BoolPoly& pb = s.polys[b].poly;
        if (pa.degree() != pb.degree()) return pa.degree() < pb.degree();
        int c = degrevlex_cmp(pa.leading_monomial(), pb.leading_monomial());
        if (c != 0) return c < 0;
        // Total order: compare supports top-down.
        const auto& sa = pa.support();
        const auto& sb = pb.support();
        std::size_t k = std::min(sa.size(), sb.size());
        for (std::size_t i = 0; i < k; ++i) {
            int cc = degrevlex_cmp(sa[sa.size() - 1 - i], sb[sb.size() - 1 - i]);
            if (cc != 0) return cc < 0;
        }
        return sa.size() < sb.size();
    });

    MonomialIndex idx(s.m, s.D);
    IncrementalRef ref(static_cast<std::size_t>(idx.count()));
    for (auto i : order) {
        const BoolPoly& p = s.polys[i].poly;
        BitVec row(static_cast<std::size_t>(idx.count()));
        for (const auto& mono : p.support()) row.set(static_cast<std::size_t>(idx.rank(mono)));
        if (ref.add_row(std::move(row))) {
            out.polys.push_back(p);
            ++out.degree_histogram[p.degree()];
        }
    }
    return out;
}

} // namespace fxl
