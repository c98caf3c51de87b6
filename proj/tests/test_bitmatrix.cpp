#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "fxl/bit_matrix.hpp"

using namespace fxl;

namespace {

BitMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double density = 0.5) {
    BitMatrix m(rows, cols);
    std::bernoulli_distribution bit(density);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (bit(rng)) m.set(r, c);
    return m;
}

} // namespace

TEST_CASE("rref basics") {
    SECTION("identity has full rank") {
        BitMatrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i) m.set(i, i);
        auto e = m.rref();
        REQUIRE(e.rank == 3);
        REQUIRE(e.pivot_cols == std::vector<std::size_t>{0, 1, 2});
        REQUIRE(e.reduced == m);
    }
    SECTION("duplicate rows count once") {
        BitMatrix m(2, 3);
        m.set(0, 0);
        m.set(0, 2);
        m.set(1, 0);
        m.set(1, 2);
        REQUIRE(m.rref().rank == 1);
    }
    SECTION("empty matrix") {
        BitMatrix m(0, 5);
        REQUIRE(m.rref().rank == 0);
    }
    SECTION("idempotence") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            BitMatrix m = random_matrix(20, 30, rng);
            auto e1 = m.rref();
            auto e2 = e1.reduced.rref();
            REQUIRE(e1.rank == e2.rank);
            REQUIRE(e1.reduced == e2.reduced);
            REQUIRE(e1.pivot_cols == e2.pivot_cols);
        }
    }
    SECTION("rank equals rank of the transpose") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t r = 1 + rng() % 64, c = 1 + rng() % 64;
            BitMatrix m = random_matrix(r, c, rng);
            REQUIRE(m.rref().rank == m.transposed().rref().rank);
        }
    }
    SECTION("parallel elimination matches serial") {
        std::mt19937_64 rng(9);
        ThreadPool pool(2);
        for (int trial = 0; trial < 5; ++trial) {
            BitMatrix m = random_matrix(300, 200, rng);
            auto serial = m.rref();
            auto parallel = m.rref(&pool);
            REQUIRE(serial.rank == parallel.rank);
            REQUIRE(serial.reduced == parallel.reduced);
        }
    }
}

TEST_CASE("solve_affine") {
    SECTION("single pinned variable") {
        BitMatrix m(1, 2); // x1 = 1
        m.set(0, 0);
        m.set(0, 1);
        auto s = solve_affine(m, true);
        REQUIRE(s.consistent);
        REQUIRE(s.basis.empty());
        REQUIRE(s.particular.get(0) == true);
    }
    SECTION("zero-row homogeneous system has a full-dimension kernel") {
        BitMatrix m(0, 2);
        auto s = solve_affine(m, false);
        REQUIRE(s.consistent);
        REQUIRE(s.basis.size() == 2);
    }
    SECTION("inconsistent row flips the flag") {
        BitMatrix m(1, 3); // 0*x1 + 0*x2 = 1
        m.set(0, 2);
        REQUIRE_FALSE(solve_affine(m, true).consistent);
    }
    SECTION("random systems round-trip") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t unknowns = 2 + rng() % 30, rows = 1 + rng() % 40;
            BitMatrix a = random_matrix(rows, unknowns, rng, 0.35);
            BitVec x(unknowns);
            for (std::size_t i = 0; i < unknowns; ++i)
                if (rng() & 1) x.set(i);
            BitMatrix sys(rows, unknowns + 1);
            for (std::size_t r = 0; r < rows; ++r) {
                bool rhs = false;
                for (std::size_t c = 0; c < unknowns; ++c)
                    if (a.get(r, c)) {
                        sys.set(r, c);
                        rhs ^= x.get(c);
                    }
                sys.set(r, unknowns, rhs);
            }
            auto s = solve_affine(sys, true);
            REQUIRE(s.consistent);
            auto check = [&](const BitVec& y) {
                for (std::size_t r = 0; r < rows; ++r) {
                    bool acc = false;
                    for (std::size_t c = 0; c < unknowns; ++c)
                        if (sys.get(r, c) && y.get(c)) acc = !acc;
                    REQUIRE(acc == sys.get(r, unknowns));
                }
            };
            check(s.particular);
            for (const auto& b : s.basis) {
                BitVec y = s.particular;
                y.xor_with(b);
                check(y);
            }
            // The planted solution lies in the affine set: reduce x - particular
            // against the basis and expect zero.
            BitVec diff = x;
            diff.xor_with(s.particular);
            IncrementalRef ref(unknowns);
            for (const auto& b : s.basis) ref.add_row(b);
            REQUIRE(ref.in_span(diff));
        }
    }
}

TEST_CASE("max_independent_rows") {
    SECTION("duplicate keeps the first") {
        BitVec v(4);
        v.set(1);
        REQUIRE(max_independent_rows({v, v}) == std::vector<std::size_t>{0});
    }
    SECTION("zero vector alone") {
        BitVec z(4);
        REQUIRE(max_independent_rows({z}).empty());
    }
    SECTION("result size equals the stacked rank") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t n = 1 + rng() % 20, count = 1 + rng() % 40;
            std::vector<BitVec> vecs;
            BitMatrix stacked(count, n);
            for (std::size_t i = 0; i < count; ++i) {
                BitVec v(n);
                for (std::size_t c = 0; c < n; ++c)
                    if (rng() & 1) v.set(c);
                stacked.set_row(i, v);
                vecs.push_back(std::move(v));
            }
            auto kept = max_independent_rows(vecs);
            REQUIRE(kept.size() == stacked.rref().rank);
            REQUIRE(std::is_sorted(kept.begin(), kept.end()));
        }
    }
}

TEST_CASE("incremental echelon matches batch elimination") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t rows = 1 + rng() % 50, cols = 1 + rng() % 40;
        BitMatrix m = random_matrix(rows, cols, rng, 0.4);
        IncrementalRef ref(cols);
        for (std::size_t r = 0; r < rows; ++r) ref.add_row(m.row_vec(r));
        auto batch = m.rref();
        auto inc = ref.to_rref();
        REQUIRE(inc.rank == batch.rank);
        REQUIRE(inc.pivot_cols == batch.pivot_cols);
        REQUIRE(inc.reduced.rows() == batch.rank);
        for (std::size_t r = 0; r < inc.rank; ++r)
            REQUIRE(inc.reduced.row_vec(r) == batch.reduced.row_vec(r));
    }
}

TEST_CASE("binary dump round-trips") {
    std::mt19937_64 rng(19);
    BitMatrix m = random_matrix(13, 70, rng);
    std::stringstream ss;
    m.save(ss);
    BitMatrix back = BitMatrix::load(ss);
    REQUIRE(back == m);

    std::stringstream bad("XXXX????");
    REQUIRE_THROWS_AS(BitMatrix::load(bad), usage_error);
}

TEST_CASE("memory cap guards construction") {
    std::size_t old_cap = BitMatrix::memory_cap();
    BitMatrix::memory_cap() = 1 << 20;
    REQUIRE_THROWS_AS(BitMatrix(1 << 20, 1 << 10), resource_error);
    try {
        BitMatrix big(1 << 20, 1 << 10);
    } catch (const resource_error& e) {
        REQUIRE(e.required_bytes == (std::size_t{1} << 20) * 128);
    } catch (...) {
    }
    BitMatrix::memory_cap() = old_cap;
    REQUIRE_NOTHROW(BitMatrix(8, 8));
}
