#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "fxl/errors.hpp"
#include "fxl/thread_pool.hpp"

namespace fxl {

// Dense bit vector, LSB-first within 64-bit words.
class BitVec {
public:
    BitVec() : size_(0) {}
    explicit BitVec(std::size_t size) : size_(size), w_((size + 63) / 64, 0) {}

    std::size_t size() const { return size_; }
    std::size_t words() const { return w_.size(); }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    void set(std::size_t i, bool v = true) {
        std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v)
            w_[i >> 6] |= m;
        else
            w_[i >> 6] &= ~m;
    }

    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    void xor_with(const BitVec& other) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= other.w_[i];
    }

    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    // First set bit at position >= from, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t first_set(std::size_t from = 0) const {
        if (from >= size_) return npos;
        std::size_t wi = from >> 6;
        std::uint64_t w = w_[wi] & (~std::uint64_t{0} << (from & 63));
        while (true) {
            if (w) return (wi << 6) + static_cast<std::size_t>(std::countr_zero(w));
            if (++wi == w_.size()) return npos;
            w = w_[wi];
        }
    }

    std::span<std::uint64_t> word_span() { return w_; }
    std::span<const std::uint64_t> word_span() const { return w_; }

    friend bool operator==(const BitVec& a, const BitVec& b) { return a.size_ == b.size_ && a.w_ == b.w_; }

private:
    std::size_t size_;
    std::vector<std::uint64_t> w_;
};

struct EchelonResult;
struct AffineSolutionSet;

// Dense bit-packed GF(2) matrix, row-major. Bits beyond cols in the last
// word of each row stay zero. Construction enforces the process-wide memory
// cap so oversized attack matrices fail fast with sizing information.
class BitMatrix {
public:
    BitMatrix() : rows_(0), cols_(0), wpr_(0) {}

    BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), wpr_((cols + 63) / 64) {
        std::size_t bytes = estimate_bytes(rows, cols);
        if (bytes > memory_cap())
            throw resource_error("BitMatrix: " + std::to_string(rows) + "x" + std::to_string(cols) +
                                     " needs " + std::to_string(bytes) + " bytes, above the memory cap of " +
                                     std::to_string(memory_cap()) +
                                     " bytes (raise it explicitly to opt in)",
                                 bytes);
        data_.assign(rows_ * wpr_, 0);
    }

    static std::size_t estimate_bytes(std::size_t rows, std::size_t cols) {
        return rows * ((cols + 63) / 64) * 8;
    }

    // Process-wide allocation cap, default 4 GiB.
    static std::size_t& memory_cap() {
        static std::size_t cap = std::size_t{4} << 30;
        return cap;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const { return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1; }

    void set(std::size_t r, std::size_t c, bool v = true) {
        std::uint64_t m = std::uint64_t{1} << (c & 63);
        if (v)
            data_[r * wpr_ + (c >> 6)] |= m;
        else
            data_[r * wpr_ + (c >> 6)] &= ~m;
    }

    std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * wpr_, wpr_}; }
    std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * wpr_, wpr_}; }

    void set_row(std::size_t r, const BitVec& v) {
        std::memcpy(data_.data() + r * wpr_, v.word_span().data(), wpr_ * 8);
    }

    // Drops trailing rows; used after in-place deduplication.
    void truncate_rows(std::size_t new_rows) {
        if (new_rows > rows_) throw usage_error("truncate_rows: cannot grow");
        rows_ = new_rows;
        data_.resize(rows_ * wpr_);
        data_.shrink_to_fit();
    }

    BitVec row_vec(std::size_t r) const {
        BitVec v(cols_);
        std::memcpy(v.word_span().data(), data_.data() + r * wpr_, wpr_ * 8);
        return v;
    }

    void xor_rows(std::size_t dst, std::size_t src) {
        std::uint64_t* d = data_.data() + dst * wpr_;
        const std::uint64_t* s = data_.data() + src * wpr_;
        for (std::size_t i = 0; i < wpr_; ++i) d[i] ^= s[i];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::uint64_t* pa = data_.data() + a * wpr_;
        std::uint64_t* pb = data_.data() + b * wpr_;
        for (std::size_t i = 0; i < wpr_; ++i) std::swap(pa[i], pb[i]);
    }

    bool row_is_zero(std::size_t r) const {
        const std::uint64_t* p = data_.data() + r * wpr_;
        for (std::size_t i = 0; i < wpr_; ++i)
            if (p[i]) return false;
        return true;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                if (get(r, c)) t.set(c, r);
        return t;
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    // Versioned binary dump: "FXBM" + u32 version + u64 rows + u64 cols,
    // little-endian, then the packed rows.
    void save(std::ostream& os) const {
        os.write("FXBM", 4);
        write_u32(os, 1);
        write_u64(os, rows_);
        write_u64(os, cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (auto w : row(r)) write_u64(os, w);
    }

    static BitMatrix load(std::istream& is) {
        char magic[4];
        is.read(magic, 4);
        if (!is || std::memcmp(magic, "FXBM", 4) != 0)
            throw usage_error("BitMatrix::load: bad magic");
        if (read_u32(is) != 1) throw usage_error("BitMatrix::load: unsupported version");
        std::uint64_t rows = read_u64(is), cols = read_u64(is);
        BitMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (auto& w : m.row(r)) w = read_u64(is);
        if (!is) throw usage_error("BitMatrix::load: truncated stream");
        return m;
    }

    EchelonResult rref(ThreadPool* pool = nullptr) const;

private:
    static void write_u32(std::ostream& os, std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        os.write(b, 4);
    }
    static void write_u64(std::ostream& os, std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        os.write(b, 8);
    }
    static std::uint32_t read_u32(std::istream& is) {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
        return v;
    }
    static std::uint64_t read_u64(std::istream& is) {
        unsigned char b[8];
        is.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
        return v;
    }

    std::size_t rows_, cols_, wpr_;
    std::vector<std::uint64_t> data_;
};

struct EchelonResult {
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols; // strictly increasing
    BitMatrix reduced;                   // RREF; pivot rows first, zero rows last
};

// Full Gauss-Jordan elimination. Pivoting is deterministic: lowest-index
// nonzero column, first available row. Column order is never permuted, so
// column identities (monomial indices) stay addressable.
inline EchelonResult BitMatrix::rref(ThreadPool* pool) const {
    EchelonResult res;
    res.reduced = *this;
    BitMatrix& m = res.reduced;
    std::size_t done = 0;
    for (std::size_t col = 0; col < cols_ && done < rows_; ++col) {
        std::size_t wi = col >> 6;
        std::uint64_t mask = std::uint64_t{1} << (col & 63);
        std::size_t pivot = rows_;
        for (std::size_t r = done; r < rows_; ++r)
            if (m.row(r)[wi] & mask) {
                pivot = r;
                break;
            }
        if (pivot == rows_) continue;
        m.swap_rows(done, pivot);
        const std::uint64_t* prow = m.row(done).data();
        auto eliminate = [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                if (r == done) continue;
                std::uint64_t* target = m.row(r).data();
                if (target[wi] & mask)
                    for (std::size_t i = 0; i < m.wpr_; ++i) target[i] ^= prow[i];
            }
        };
        if (pool && rows_ > 256)
            pool->parallel_chunks(rows_, [&](std::size_t b, std::size_t e) { eliminate(b, e); });
        else
            eliminate(0, rows_);
        res.pivot_cols.push_back(col);
        ++done;
    }
    res.rank = done;
    return res;
}

struct AffineSolutionSet {
    bool consistent = false;
    BitVec particular;          // one solution (unknowns only)
    std::vector<BitVec> basis;  // kernel basis of the homogeneous part
};

// Solves the system encoded row-wise. With rhs_included the final column is
// the constant column; otherwise the system is homogeneous. The returned
// vectors cover the unknown columns only.
inline AffineSolutionSet solve_affine(const BitMatrix& m, bool rhs_included, ThreadPool* pool = nullptr) {
    if (rhs_included && m.cols() == 0) throw usage_error("solve_affine: no constant column");
    EchelonResult e = m.rref(pool);
    std::size_t unknowns = m.cols() - (rhs_included ? 1 : 0);
    AffineSolutionSet sol;
    sol.consistent = true;
    if (rhs_included)
        for (auto c : e.pivot_cols)
            if (c == unknowns) sol.consistent = false; // a row reduced to 0 = 1
    if (!sol.consistent) return sol;

    sol.particular = BitVec(unknowns);
    std::vector<std::size_t> pivot_row_of_col(unknowns, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
        std::size_t c = e.pivot_cols[i];
        pivot_row_of_col[c] = i;
        if (rhs_included && e.reduced.get(i, unknowns)) sol.particular.set(c);
    }
    for (std::size_t f = 0; f < unknowns; ++f) {
        if (pivot_row_of_col[f] != static_cast<std::size_t>(-1)) continue;
        BitVec v(unknowns);
        v.set(f);
        for (std::size_t i = 0; i < e.pivot_cols.size(); ++i)
            if (e.reduced.get(i, f)) v.set(e.pivot_cols[i]);
        sol.basis.push_back(std::move(v));
    }
    return sol;
}

// Incremental row-echelon accumulator: feed rows one at a time, keeping only
// the independent ones. Backbone of the streaming elimination mode and of
// greedy independent-subset selection.
class IncrementalRef {
public:
    explicit IncrementalRef(std::size_t cols) : cols_(cols), pivot_of_col_(cols, -1) {}

    std::size_t cols() const { return cols_; }
    std::size_t rank() const { return rows_.size(); }

    // Reduces the row in place; keeps it if independent. Returns true when
    // the row joined the echelon.
    bool add_row(BitVec row) {
        std::size_t c = row.first_set();
        while (c != BitVec::npos) {
            long p = pivot_of_col_[c];
            if (p < 0) break;
            row.xor_with(rows_[static_cast<std::size_t>(p)]);
            c = row.first_set(c + 1);
        }
        if (c == BitVec::npos) return false;
        pivot_of_col_[c] = static_cast<long>(rows_.size());
        pivot_cols_.push_back(c);
        rows_.push_back(std::move(row));
        return true;
    }

    // True iff the row is in the span of the rows seen so far.
    bool in_span(BitVec row) const {
        std::size_t c = row.first_set();
        while (c != BitVec::npos) {
            long p = pivot_of_col_[c];
            if (p < 0) return false;
            row.xor_with(rows_[static_cast<std::size_t>(p)]);
            c = row.first_set(c + 1);
        }
        return true;
    }

    const std::vector<BitVec>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivot_cols_in_order() const { return pivot_cols_; }

    // Back-substitutes to full RREF (pivot rows sorted by pivot column).
    EchelonResult to_rref() const {
        std::vector<std::size_t> order(rows_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pivot_cols_[a] < pivot_cols_[b]; });
        std::vector<BitVec> work;
        work.reserve(rows_.size());
        for (auto i : order) work.push_back(rows_[i]);
        // Eliminate above, highest pivot first.
        for (std::size_t i = work.size(); i-- > 0;) {
            std::size_t c = pivot_cols_[order[i]];
            for (std::size_t j = 0; j < i; ++j)
                if (work[j].get(c)) work[j].xor_with(work[i]);
        }
        EchelonResult res;
        res.rank = work.size();
        res.reduced = BitMatrix(work.size(), cols_);
        for (std::size_t i = 0; i < work.size(); ++i) {
            res.reduced.set_row(i, work[i]);
            res.pivot_cols.push_back(pivot_cols_[order[i]]);
        }
        return res;
    }

private:
    std::size_t cols_;
    std::vector<long> pivot_of_col_;
    std::vector<std::size_t> pivot_cols_;
    std::vector<BitVec> rows_;
};

// Greedy maximal linearly independent subset, first vector wins. Returns
// strictly increasing indices into the input.
inline std::vector<std::size_t> max_independent_rows(const std::vector<BitVec>& vectors) {
    std::vector<std::size_t> kept;
    if (vectors.empty()) return kept;
    std::size_t cols = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != cols) throw usage_error("max_independent_rows: mixed vector lengths");
    IncrementalRef ref(cols);
    for (std::size_t i = 0; i < vectors.size(); ++i)
        if (ref.add_row(vectors[i])) kept.push_back(i);
    return kept;
}

} // namespace fxl
