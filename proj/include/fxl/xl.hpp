#pragma once

#include <cstring>
#include <map>
#include <unordered_map>
#include <vector>

#include "fxl/annihilator.hpp"
#include "fxl/bit_matrix.hpp"
#include "fxl/cipher.hpp"
#include "fxl/truth_table.hpp"

namespace fxl {

// The seven linear forms describing the filter word of L^i(x) in terms of
// the unknown initial-state bits. Coordinate n is the affine constant,
// always zero here since L is linear.
struct LinearFormSet {
    int n = 0;
    std::array<BitVec, 7> forms;

    std::uint8_t eval_point(const BitVec& state_bits) const {
        std::uint8_t p = 0;
        for (int j = 0; j < 7; ++j) {
            std::uint64_t acc = 0;
            auto fw = forms[static_cast<std::size_t>(j)].word_span();
            auto sw = state_bits.word_span();
            for (std::size_t k = 0; k < sw.size(); ++k) acc ^= fw[k] & sw[k];
            bool bit = std::popcount(acc) & 1;
            bit ^= forms[static_cast<std::size_t>(j)].get(static_cast<std::size_t>(n)); // constant
            if (bit) p |= static_cast<std::uint8_t>(1u << j);
        }
        return p;
    }
};

// forms(L(x)): each form becomes the XOR of the update-matrix rows selected
// by its state coordinates; the constant coordinate carries through.
inline void advance_forms(LinearFormSet& fs, const BitMatrix& m) {
    for (auto& f : fs.forms) {
        BitVec next(static_cast<std::size_t>(fs.n) + 1);
        for (std::size_t k = 0; k < static_cast<std::size_t>(fs.n); ++k)
            if (f.get(k)) {
                auto row = m.row(k);
                auto nw = next.word_span();
                for (std::size_t w = 0; w < row.size(); ++w) nw[w] ^= row[w];
            }
        if (f.get(static_cast<std::size_t>(fs.n))) next.set(static_cast<std::size_t>(fs.n));
        f = std::move(next);
    }
}

// The rows of M^i addressing the filter word, built by i iterated
// vector-matrix products rather than matrix powering.
inline LinearFormSet tap_forms(const BitMatrix& m, std::uint64_t i, const CipherSpec& spec) {
    LinearFormSet fs;
    fs.n = spec.nbits();
    for (int j = 0; j < 7; ++j) {
        fs.forms[static_cast<std::size_t>(j)] = BitVec(static_cast<std::size_t>(fs.n) + 1);
        fs.forms[static_cast<std::size_t>(j)].set(static_cast<std::size_t>(7 * spec.filter_word + j));
    }
    for (std::uint64_t k = 0; k < i; ++k) advance_forms(fs, m);
    return fs;
}

namespace detail {

// Exact ANF coefficients of up to 64 composed functions f_j(forms(x)) at
// once. Coefficient of x_S is the XOR of f_j at the form images of all
// subsets of S (the Moebius sum), so one pass over subsets serves every
// filter simultaneously.
inline std::vector<BitVec> compose_batch(const LinearFormSet& fs, const std::vector<TruthTable>& filters,
                                         int dmax, const MonomialIndex& idx) {
    int n = fs.n;
    if (filters.size() > 64) throw usage_error("compose_batch: at most 64 filters");
    for (const auto& tt : filters)
        if (tt.nvars() != 7) throw usage_error("compose_batch: filters must have 7 variables");

    std::array<std::uint8_t, Monomial::kMaxVars> col{};
    for (int v = 0; v < n; ++v) {
        std::uint8_t c = 0;
        for (int j = 0; j < 7; ++j)
            if (fs.forms[static_cast<std::size_t>(j)].get(static_cast<std::size_t>(v)))
                c |= static_cast<std::uint8_t>(1u << j);
        col[static_cast<std::size_t>(v)] = c;
    }
    std::uint8_t const_pt = 0;
    for (int j = 0; j < 7; ++j)
        if (fs.forms[static_cast<std::size_t>(j)].get(static_cast<std::size_t>(n)))
            const_pt |= static_cast<std::uint8_t>(1u << j);

    // Filter values at the image of every subset of size <= dmax, in
    // monomial rank order.
    std::vector<std::uint64_t> at_point(static_cast<std::size_t>(idx.count()));
    std::size_t cursor = 0;
    auto value_word = [&](std::uint8_t p) {
        std::uint64_t w = 0;
        for (std::size_t j = 0; j < filters.size(); ++j)
            if (filters[j].get(p)) w |= std::uint64_t{1} << j;
        return w;
    };
    auto gen_points = [&](auto&& self, int universe, int remaining, std::uint8_t p) -> void {
        if (remaining == 0) {
            at_point[cursor++] = value_word(p);
            return;
        }
        for (int a = universe; a >= remaining; --a)
            self(self, a - 1, remaining - 1, static_cast<std::uint8_t>(p ^ col[static_cast<std::size_t>(a - 1)]));
    };
    for (int d = 0; d <= dmax; ++d) gen_points(gen_points, n, d, const_pt);

    std::vector<BitVec> rows(filters.size(), BitVec(static_cast<std::size_t>(idx.count())));
    std::vector<int> elems(static_cast<std::size_t>(dmax));
    cursor = 0;
    auto gen_coeffs = [&](auto&& self, int universe, int remaining, int have) -> void {
        if (remaining == 0) {
            // XOR of at_point over all subsets of the chosen element set.
            std::uint64_t c = 0;
            for (unsigned mask = 0; mask < (1u << have); ++mask) {
                Monomial u;
                for (int b = 0; b < have; ++b)
                    if ((mask >> b) & 1) u.set(elems[static_cast<std::size_t>(b)]);
                c ^= at_point[static_cast<std::size_t>(idx.rank(u))];
            }
            if (c) {
                for (std::size_t j = 0; j < rows.size(); ++j)
                    if ((c >> j) & 1) rows[j].set(cursor);
            }
            ++cursor;
            return;
        }
        for (int a = universe; a >= remaining; --a) {
            elems[static_cast<std::size_t>(have)] = a;
            self(self, a - 1, remaining - 1, have + 1);
        }
    };
    for (int d = 0; d <= dmax; ++d) gen_coeffs(gen_coeffs, n, d, 0);
    return rows;
}

} // namespace detail

// Exact expansion of a 7-variable polynomial under linear substitution. The
// result lives in the quotient ring, so its degree never exceeds deg f.
inline BoolPoly compose(const BoolPoly& f, const LinearFormSet& forms) {
    if (f.nvars() != 7) throw usage_error("compose: filter-side polynomial must have 7 variables");
    if (f.is_zero()) return BoolPoly::zero(forms.n);
    int dmax = f.degree();
    MonomialIndex idx(forms.n, dmax);
    std::vector<TruthTable> tts{to_truth_table(f)};
    auto rows = detail::compose_batch(forms, tts, dmax, idx);
    std::vector<Monomial> support;
    for (std::size_t r = rows[0].first_set(); r != BitVec::npos; r = rows[0].first_set(r + 1))
        support.push_back(idx.unrank(r));
    return BoolPoly(forms.n, std::move(support));
}

// System (clock-tagged composed annihilators) ready for linearization. Row
// coefficients are kept dense over the degree-<= d monomials of n variables.
struct AttackSystem {
    CipherSpec spec;
    int n = 0;
    int d = 0; // max equation degree
    std::vector<bool> keystream;
    BitMatrix equations; // one row per composed basis member, columns = rank space
    struct Tag {
        std::uint32_t clock;
        std::uint16_t gb_index;
        std::uint8_t side;
        std::uint8_t degree; // actual degree of the composed equation
    };
    std::vector<Tag> tags;

    MonomialIndex index() const { return MonomialIndex(n, d); }

    BoolPoly equation_poly(std::size_t i) const {
        MonomialIndex idx = index();
        std::vector<Monomial> support;
        BitVec row = equations.row_vec(i);
        for (std::size_t r = row.first_set(); r != BitVec::npos; r = row.first_set(r + 1))
            support.push_back(idx.unrank(r));
        return BoolPoly(n, std::move(support));
    }
};

// For each clock i, composes every member of the side-z_i basis with the
// forms of L^i. All equations vanish at the true initial state.
inline AttackSystem build_attack_system(const CipherSpec& spec, const AnnihilatorBasis& basis0,
                                        const AnnihilatorBasis& basis1, const std::vector<bool>& ks) {
    if (basis0.side != 0 || basis1.side != 1) throw usage_error("build_attack_system: bases passed in wrong order");
    bool need0 = false, need1 = false;
    for (bool z : ks) (z ? need1 : need0) = true;
    if ((need0 && (basis0.unit_ideal || basis0.gb_prime.empty())) ||
        (need1 && (basis1.unit_ideal || basis1.gb_prime.empty())))
        throw analysis_error("build_attack_system: observed a keystream symbol whose annihilator basis is empty");

    AttackSystem sys;
    sys.spec = spec;
    sys.n = spec.nbits();
    sys.keystream = ks;
    for (const auto& g : basis0.gb_prime) sys.d = std::max(sys.d, g.degree());
    for (const auto& g : basis1.gb_prime) sys.d = std::max(sys.d, g.degree());

    MonomialIndex idx(sys.n, sys.d);
    std::array<std::vector<TruthTable>, 2> tts;
    for (const auto& g : basis0.gb_prime) tts[0].push_back(to_truth_table(g));
    for (const auto& g : basis1.gb_prime) tts[1].push_back(to_truth_table(g));

    std::size_t total_rows = 0;
    for (bool z : ks) total_rows += (z ? basis1 : basis0).gb_prime.size();
    sys.equations = BitMatrix(total_rows, static_cast<std::size_t>(idx.count()));
    sys.tags.reserve(total_rows);

    BitMatrix m = update_matrix(spec);
    LinearFormSet forms = tap_forms(m, 0, spec);
    std::size_t out = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        int side = ks[i] ? 1 : 0;
        auto rows = detail::compose_batch(forms, tts[static_cast<std::size_t>(side)], sys.d, idx);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            sys.equations.set_row(out, rows[j]);
            int deg = 0;
            for (std::size_t r = rows[j].first_set(); r != BitVec::npos; r = rows[j].first_set(r + 1))
                deg = std::max(deg, idx.unrank(r).degree());
            sys.tags.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint16_t>(j),
                                static_cast<std::uint8_t>(side), static_cast<std::uint8_t>(deg)});
            ++out;
        }
        advance_forms(forms, m);
    }
    return sys;
}

// Linearized XL matrix. Columns are the non-constant monomials of degree
// <= D in ascending degrevlex (rank 1..T-1 at columns 0..T-2); the constant
// coefficient sits in the last column, ready for affine solving.
struct XlLinearized {
    int n = 0;
    int D = 0;
    std::size_t rows_generated = 0;
    std::size_t rows_kept = 0;
    BitMatrix matrix;

    MonomialIndex index() const { return MonomialIndex(n, D); }
};

namespace detail {

inline std::size_t col_of_rank(std::uint64_t rank, std::uint64_t T) {
    return static_cast<std::size_t>(rank == 0 ? T - 1 : rank - 1);
}

struct RowHasher {
    static std::uint64_t hash_words(std::span<const std::uint64_t> w) {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto x : w) {
            h ^= x;
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 33;
        }
        return h;
    }
};

// Multiplier monomials grouped by allowed degree, cached across equations.
class MultiplierCache {
public:
    MultiplierCache(int n) : n_(n) {}

    const std::vector<Monomial>& of_degree_at_most(int d) {
        auto it = cache_.find(d);
        if (it == cache_.end()) it = cache_.emplace(d, monomials_up_to(n_, d)).first;
        return it->second;
    }

private:
    int n_;
    std::map<int, std::vector<Monomial>> cache_;
};

} // namespace detail

// XL multiply+linearize: every equation times every square-free monomial in
// all n variables that keeps the product degree within D, deduplicated.
inline XlLinearized xl_multiply_linearize(const AttackSystem& sys, int D, ThreadPool* pool = nullptr) {
    if (D < sys.d) throw usage_error("xl_multiply_linearize: D below the equation degree");
    XlLinearized out;
    out.n = sys.n;
    out.D = D;
    MonomialIndex idx_d = sys.index();
    MonomialIndex idx_D(sys.n, D);
    std::uint64_t T = idx_D.count();

    // The offset pass also warms every degree bucket of the cache, so the
    // parallel phase below only reads it.
    detail::MultiplierCache multipliers(sys.n);
    std::vector<std::size_t> offset(sys.tags.size() + 1, 0);
    for (std::size_t e = 0; e < sys.tags.size(); ++e)
        offset[e + 1] = offset[e] + multipliers.of_degree_at_most(D - sys.tags[e].degree).size();
    out.rows_generated = offset.back();

    // Support monomials of the equation space, unranked once.
    std::vector<Monomial> mono_of_rank(static_cast<std::size_t>(idx_d.count()));
    for (std::size_t r = 0; r < mono_of_rank.size(); ++r) mono_of_rank[r] = idx_d.unrank(r);

    BitMatrix matrix(out.rows_generated, static_cast<std::size_t>(T)); // memory-guarded

    auto build_rows = [&](std::size_t eb, std::size_t ee) {
        for (std::size_t e = eb; e < ee; ++e) {
            BitVec eq = sys.equations.row_vec(e);
            std::vector<std::size_t> support;
            for (std::size_t r = eq.first_set(); r != BitVec::npos; r = eq.first_set(r + 1))
                support.push_back(r);
            const auto& mults = multipliers.of_degree_at_most(D - sys.tags[e].degree);
            for (std::size_t k = 0; k < mults.size(); ++k) {
                std::uint64_t* row = matrix.row(offset[e] + k).data();
                for (auto r : support) {
                    std::size_t c = detail::col_of_rank(idx_D.rank(mono_of_rank[r] * mults[k]), T);
                    row[c >> 6] ^= std::uint64_t{1} << (c & 63); // parity: unions can collide
                }
            }
        }
    };
    if (pool)
        pool->parallel_chunks(sys.tags.size(), build_rows);
    else
        build_rows(0, sys.tags.size());

    // Exact deduplication (hash, then full compare), compacting in place.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    seen.reserve(out.rows_generated * 2);
    std::size_t kept = 0;
    for (std::size_t r = 0; r < out.rows_generated; ++r) {
        auto row = matrix.row(r);
        std::uint64_t h = detail::RowHasher::hash_words(row);
        auto& bucket = seen[h];
        bool dup = false;
        for (auto prev : bucket)
            if (std::memcmp(matrix.row(prev).data(), row.data(), row.size() * 8) == 0) {
                dup = true;
                break;
            }
        if (dup) continue;
        if (kept != r) std::memcpy(matrix.row(kept).data(), row.data(), row.size() * 8);
        bucket.push_back(kept);
        ++kept;
    }
    matrix.truncate_rows(kept);
    out.rows_kept = kept;
    out.matrix = std::move(matrix);
    return out;
}

// Outcome of the linear-algebra step plus state extraction.
struct RecoveryResult {
    enum class Status { kUnique, kEnumerated, kFailed };
    Status status = Status::kFailed;
    WordState state;
    std::size_t rank = 0;
    std::size_t rows_generated = 0;
    std::size_t rows_kept = 0;
    std::uint64_t monomial_count = 0; // T
    std::size_t residual_dimension = 0;
    std::uint64_t candidates_enumerated = 0;
    std::uint64_t candidates_matching = 0;
    std::string message;

    bool recovered() const { return status != Status::kFailed; }
};

struct AttackOptions {
    int D = 5;
    std::size_t enum_cap = 20; // max residual dimension to enumerate
    bool streaming = false;    // reduce rows as they are generated
    ThreadPool* pool = nullptr;
};

namespace detail {

// State extraction from the reduced system: pin the degree-1 coordinates,
// enumerate whatever affine freedom projects onto them, and let keystream
// regeneration arbitrate.
inline RecoveryResult recover_from_rref(const EchelonResult& ech, const MonomialIndex& idx,
                                        const CipherSpec& spec, const std::vector<bool>& ks,
                                        std::size_t enum_cap) {
    RecoveryResult res;
    res.rank = ech.rank;
    res.monomial_count = idx.count();
    std::size_t n = static_cast<std::size_t>(idx.nvars());
    std::uint64_t T = idx.count();
    std::size_t unknowns = static_cast<std::size_t>(T) - 1;

    for (auto c : ech.pivot_cols)
        if (c == unknowns)
            throw analysis_error("solve_and_recover: inconsistent system (keystream does not match the cipher)");

    std::vector<long> pivot_row_of_col(unknowns, -1);
    for (std::size_t i = 0; i < ech.pivot_cols.size(); ++i)
        pivot_row_of_col[ech.pivot_cols[i]] = static_cast<long>(i);

    // Column j < n is the degree-1 monomial of rank j+1, i.e. variable
    // x_{n-j}, i.e. state bit n-1-j.
    auto state_bit_of_col = [&](std::size_t j) { return n - 1 - j; };

    BitVec base(n);
    for (std::size_t j = 0; j < n; ++j) {
        long pr = pivot_row_of_col[j];
        if (pr >= 0 && ech.reduced.get(static_cast<std::size_t>(pr), unknowns))
            base.set(state_bit_of_col(j));
    }

    // Kernel directions that actually move the degree-1 coordinates.
    IncrementalRef proj(n);
    std::vector<BitVec> generators;
    for (std::size_t f = 0; f < unknowns; ++f) {
        if (pivot_row_of_col[f] >= 0) continue;
        BitVec g(n);
        bool nonzero = false;
        if (f < n) {
            g.set(state_bit_of_col(f));
            nonzero = true;
        }
        for (std::size_t j = 0; j < n; ++j) {
            long pr = pivot_row_of_col[j];
            if (pr >= 0 && ech.reduced.get(static_cast<std::size_t>(pr), f)) {
                g.flip(state_bit_of_col(j));
                nonzero = true;
            }
        }
        if (nonzero && proj.add_row(g)) generators.push_back(std::move(g));
    }
    res.residual_dimension = generators.size();

    if (generators.size() > enum_cap) {
        res.status = RecoveryResult::Status::kFailed;
        res.message = "solution affine set projects onto the state with dimension " +
                      std::to_string(generators.size()) + ", above the enumeration cap " +
                      std::to_string(enum_cap);
        return res;
    }

    std::uint64_t combos = std::uint64_t{1} << generators.size();
    res.candidates_enumerated = combos;
    WordState winner;
    std::uint64_t matches = 0;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        BitVec bits = base;
        for (std::size_t g = 0; g < generators.size(); ++g)
            if ((mask >> g) & 1) bits.xor_with(generators[g]);
        WordState cand = state_from_bits(bits);
        if (keystream(spec, cand, ks.size()) == ks) {
            ++matches;
            if (matches == 1) winner = cand;
        }
    }
    res.candidates_matching = matches;
    if (matches == 1) {
        res.state = winner;
        res.status = generators.empty() ? RecoveryResult::Status::kUnique : RecoveryResult::Status::kEnumerated;
    } else if (matches == 0) {
        res.status = RecoveryResult::Status::kFailed;
        res.message = "no candidate reproduces the observed keystream";
    } else {
        res.status = RecoveryResult::Status::kFailed;
        res.message = std::to_string(matches) + " states reproduce the keystream; collect more bits";
    }

    if (res.status != RecoveryResult::Status::kFailed) {
        // Monomial consistency of the winner against the reduced rows.
        BitVec full(static_cast<std::size_t>(T));
        BitVec sbits = state_bits(res.state);
        for (std::uint64_t r = 1; r < T; ++r) {
            bool v = true;
            for (int var : idx.unrank(r).vars())
                if (!sbits.get(static_cast<std::size_t>(var - 1))) {
                    v = false;
                    break;
                }
            if (v) full.set(col_of_rank(r, T));
        }
        full.set(col_of_rank(0, T)); // constant column carries 1
        for (std::size_t i = 0; i < ech.rank; ++i) {
            std::uint64_t acc = 0;
            auto row = ech.reduced.row(i);
            auto fw = full.word_span();
            for (std::size_t w = 0; w < row.size(); ++w) acc ^= row[w] & fw[w];
            if (std::popcount(acc) & 1) {
                res.status = RecoveryResult::Status::kFailed;
                res.message = "recovered state violates a reduced equation (internal inconsistency)";
                break;
            }
        }
    }
    return res;
}

} // namespace detail

inline RecoveryResult solve_and_recover(const XlLinearized& lin, const CipherSpec& spec,
                                        const std::vector<bool>& ks, const AttackOptions& opts = {}) {
    EchelonResult ech = lin.matrix.rref(opts.pool);
    RecoveryResult res = detail::recover_from_rref(ech, lin.index(), spec, ks, opts.enum_cap);
    res.rows_generated = lin.rows_generated;
    res.rows_kept = lin.rows_kept;
    return res;
}

// End-to-end: build the system, multiply, reduce, recover. The streaming
// path reduces rows as they are produced and never materializes the full
// matrix; the batch path is faster when the matrix fits the cap.
inline RecoveryResult run_attack(const CipherSpec& spec, const AnnihilatorBasis& basis0,
                                 const AnnihilatorBasis& basis1, const std::vector<bool>& ks,
                                 const AttackOptions& opts) {
    AttackSystem sys = build_attack_system(spec, basis0, basis1, ks);
    if (!opts.streaming) {
        XlLinearized lin = xl_multiply_linearize(sys, opts.D, opts.pool);
        return solve_and_recover(lin, spec, ks, opts);
    }

    MonomialIndex idx_d = sys.index();
    MonomialIndex idx_D(sys.n, opts.D);
    std::uint64_t T = idx_D.count();
    std::vector<Monomial> mono_of_rank(static_cast<std::size_t>(idx_d.count()));
    for (std::size_t r = 0; r < mono_of_rank.size(); ++r) mono_of_rank[r] = idx_d.unrank(r);
    detail::MultiplierCache multipliers(sys.n);

    IncrementalRef ref(static_cast<std::size_t>(T));
    std::size_t generated = 0;
    std::size_t row_bytes = ((static_cast<std::size_t>(T) + 63) / 64) * 8;
    for (std::size_t e = 0; e < sys.tags.size(); ++e) {
        BitVec eq = sys.equations.row_vec(e);
        std::vector<std::size_t> support;
        for (std::size_t r = eq.first_set(); r != BitVec::npos; r = eq.first_set(r + 1)) support.push_back(r);
        for (const auto& alpha : multipliers.of_degree_at_most(opts.D - sys.tags[e].degree)) {
            BitVec row(static_cast<std::size_t>(T));
            for (auto r : support)
                row.flip(detail::col_of_rank(idx_D.rank(mono_of_rank[r] * alpha), T));
            ++generated;
            if (ref.add_row(std::move(row)) && (ref.rank() + 1) * row_bytes > BitMatrix::memory_cap())
                throw resource_error("run_attack (streaming): pivot store would exceed the memory cap at rank " +
                                         std::to_string(ref.rank()),
                                     (ref.rank() + 1) * row_bytes);
        }
    }
    EchelonResult ech = ref.to_rref();
    RecoveryResult res = detail::recover_from_rref(ech, idx_D, spec, ks, opts.enum_cap);
    res.rows_generated = generated;
    res.rows_kept = generated;
    return res;
}

// ---- the textbook XL variant --------------------------------------------

struct GenericXlResult {
    enum class Status { kSolved, kFailedNoUnivariate, kFailedInconsistent };
    Status status = Status::kFailedNoUnivariate;
    std::vector<bool> solution;

    bool solved() const { return status == Status::kSolved; }
};

namespace detail {

inline BoolPoly substitute(const BoolPoly& p, int var, bool value) {
    std::vector<Monomial> support;
    for (const auto& m : p.support()) {
        if (!m.contains(var))
            support.push_back(m);
        else if (value)
            support.push_back(m.without(var));
    }
    return BoolPoly(p.nvars(), std::move(support));
}

} // namespace detail

// XL as originally stated: uniform multiply, linearize with the monomials of
// one chosen variable ordered last, read a univariate equation, substitute,
// repeat. Returns failure when some round yields no univariate equation.
inline GenericXlResult generic_xl(const std::vector<BoolPoly>& system, int D, int eliminate_last = 1) {
    if (system.empty()) throw usage_error("generic_xl: empty system");
    int n = system.front().nvars();
    int d = kNegInfDegree;
    for (const auto& p : system) {
        if (p.nvars() != n) throw usage_error("generic_xl: mixed variable counts");
        d = std::max(d, p.degree());
    }
    if (d < 1) throw usage_error("generic_xl: system of constants");
    if (D < d) throw usage_error("generic_xl: D < d");
    if (eliminate_last < 1 || eliminate_last > n) throw usage_error("generic_xl: bad variable index");

    std::vector<BoolPoly> eqs = system;
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    std::vector<bool> value(static_cast<std::size_t>(n), false);
    int target = eliminate_last;

    auto pick_next_target = [&]() {
        for (int v = 1; v <= n; ++v)
            if (!assigned[static_cast<std::size_t>(v - 1)]) return v;
        return 0;
    };

    while (true) {
        bool all_assigned = true;
        for (int v = 1; v <= n; ++v) all_assigned = all_assigned && assigned[static_cast<std::size_t>(v - 1)];
        if (all_assigned) break;

        // Live equations; a surviving constant 1 means no solution.
        std::vector<BoolPoly> live;
        for (const auto& p : eqs) {
            if (p.is_zero()) continue;
            if (p == BoolPoly::one(n)) return {GenericXlResult::Status::kFailedInconsistent, {}};
            live.push_back(p);
        }
        if (live.empty()) return {GenericXlResult::Status::kFailedNoUnivariate, {}}; // underdetermined

        // Multiply phase over the unassigned variables.
        std::vector<Monomial> all_mults = monomials_up_to(n, D);
        std::vector<BoolPoly> products;
        for (const auto& p : live) {
            int budget = D - p.degree();
            for (const auto& alpha : all_mults) {
                if (alpha.degree() > budget) continue;
                bool ok = true;
                for (int v : alpha.vars())
                    if (assigned[static_cast<std::size_t>(v - 1)]) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                BoolPoly prod = p * alpha;
                if (!prod.is_zero()) products.push_back(std::move(prod));
            }
        }

        // Linearize: all columns except {x_target, 1} are eliminated first.
        std::vector<Monomial> monos = monomials_up_to(n, D);
        Monomial xt = Monomial::var(target);
        std::vector<Monomial> cols;
        for (const auto& m : monos)
            if (!(m.is_one() || m == xt)) cols.push_back(m);
        std::size_t ncols = cols.size() + 2;
        std::unordered_map<Monomial, std::size_t> col_of;
        for (std::size_t i = 0; i < cols.size(); ++i) col_of.emplace(cols[i], i);
        std::size_t xcol = cols.size(), onecol = cols.size() + 1;
        col_of.emplace(xt, xcol);
        col_of.emplace(Monomial::one(), onecol);

        BitMatrix mat(products.size(), ncols);
        for (std::size_t r = 0; r < products.size(); ++r)
            for (const auto& m : products[r].support()) mat.set(r, col_of.at(m));
        EchelonResult ech = mat.rref();

        // Hunt for a row supported inside {x_target, 1}.
        bool found = false;
        bool bit = false;
        for (std::size_t r = 0; r < ech.rank; ++r) {
            bool hasx = ech.reduced.get(r, xcol), hasone = ech.reduced.get(r, onecol);
            if (!hasx && !hasone) continue;
            bool clean = true;
            for (std::size_t c = 0; c < cols.size() && clean; ++c)
                if (ech.reduced.get(r, c)) clean = false;
            if (!clean) continue;
            if (!hasx) return {GenericXlResult::Status::kFailedInconsistent, {}}; // row "1 = 0"
            found = true;
            bit = hasone; // x + 1 = 0 -> x = 1; x = 0 otherwise
            break;
        }
        if (!found) return {GenericXlResult::Status::kFailedNoUnivariate, {}};

        assigned[static_cast<std::size_t>(target - 1)] = true;
        value[static_cast<std::size_t>(target - 1)] = bit;
        for (auto& p : eqs) p = detail::substitute(p, target, bit);
        target = pick_next_target();
    }

    // Verify against the original system.
    for (const auto& p : system)
        if (p.evaluate(value)) return {GenericXlResult::Status::kFailedInconsistent, {}};
    return {GenericXlResult::Status::kSolved, value};
}

} // namespace fxl
