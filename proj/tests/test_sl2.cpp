#include <doctest.h>

#include <sstream>

#include "operstokes/sl2.hpp"

using namespace operstokes;

namespace {

using Q = BigRational;

RationalMatrix diag(std::initializer_list<long> d) {
    RationalMatrix m(d.size(), d.size());
    std::size_t i = 0;
    for (long v : d) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("build_sl2 examples") {
    CHECK(build_sl2(3).h == diag({2, 0, -2}));

    auto t2 = build_sl2(2);
    CHECK(t2.e == RationalMatrix::unit(2, 0, 1));
    CHECK(t2.f == RationalMatrix::unit(2, 1, 0));
    CHECK(t2.h == diag({1, -1}));

    auto t4 = build_sl2(4);
    CHECK(t4.f(1, 0) == 3);
    CHECK(t4.f(2, 1) == 2);
    CHECK(t4.f(3, 2) == 1);
    CHECK(commutator(t4.e, t4.f) == t4.h);

    CHECK_THROWS_AS(build_sl2(1), std::invalid_argument);
}

TEST_CASE("lowest weight vectors") {
    for (int n = 2; n <= 7; ++n) {
        auto t = build_sl2(n);
        auto low = lowest_weight_vectors(t);
        REQUIRE(low.size() == static_cast<std::size_t>(n - 1));
        CHECK(low.front() == t.f);
        CHECK(low.back() == RationalMatrix::unit(n, n - 1, 0));
    }
    auto low4 = lowest_weight_vectors(build_sl2(4));
    RationalMatrix f2(4, 4);
    f2(2, 0) = 3;
    f2(3, 1) = 1;
    CHECK(low4[1] == f2);
}

TEST_CASE("weight basis examples") {
    for (int n = 2; n <= 5; ++n) {
        auto t = build_sl2(n);
        WeightBasis b(t);
        CHECK(b.size() == static_cast<std::size_t>(n * n - 1));
        CHECK(b.v(1, 0) == t.h);
        CHECK(b.v(1, 1) == Q(-2) * t.e);
        for (int i = 1; i < n; ++i) CHECK(b.v(i, -i) == b.lowest(i));
        CHECK_THROWS_AS(b.v(n, 0), std::out_of_range);
        CHECK_THROWS_AS(b.v(1, 2), std::out_of_range);
    }
}

TEST_CASE("decompose examples") {
    auto t = build_sl2(4);
    WeightBasis b(t);
    auto c = b.decompose(t.h);
    for (std::size_t q = 0; q < c.size(); ++q) CHECK(c[q] == (q == b.index(1, 0) ? Q(1) : Q(0)));
    for (const auto& x : b.decompose(RationalMatrix(4, 4))) CHECK(x == 0);
    c = b.decompose(t.e);
    for (std::size_t q = 0; q < c.size(); ++q) CHECK(c[q] == (q == b.index(1, 1) ? make_rational(-1, 2) : Q(0)));
    CHECK_THROWS_AS(b.decompose(RationalMatrix::identity(4)), std::invalid_argument);

    // round trip on every basis element and a mixed combination
    RationalMatrix mix(4, 4);
    for (std::size_t q = 0; q < b.size(); ++q) {
        auto [i, j] = b.label(q);
        CHECK(b.index(i, j) == q);
        mix += make_rational(static_cast<long>(q) - 5, 3) * b.v(i, j);
    }
    c = b.decompose(mix);
    for (std::size_t q = 0; q < c.size(); ++q) CHECK(c[q] == make_rational(static_cast<long>(q) - 5, 3));
}

TEST_CASE("structure table examples") {
    for (int n = 2; n <= 6; ++n) {
        WeightBasis b(build_sl2(n));
        StructureTables tab(b);
        CHECK(tab.a(1, 1) == 2);
        CHECK(commutator(b.triple().f, b.v(1, 1)) == Q(2) * b.v(1, 0));
        CHECK(tab.c(n - 1, n - 1, n - 2) == 2 * (n - 1));
        CHECK(tab.c(n - 1, n - 2, n - 2) == 2);
        if (n >= 3) CHECK(tab.c(n - 2, n - 2, n - 2) == 0);
        CHECK_THROWS_AS(tab.c(0, 0, 0), std::out_of_range);
        CHECK_THROWS_AS(tab.c(1, 1, n - 1), std::out_of_range);
        CHECK_THROWS_AS(tab.a(1, -1), std::out_of_range);
        // recursion instance at (n-1, n-2, n-2)
        CHECK(Q(2) * tab.a(n - 1, -(n - 2)) / tab.a(1, 1) == 2 * (n - 1));
    }
}

TEST_CASE("sign property") {
    for (int n = 2; n <= 6; ++n) {
        WeightBasis b(build_sl2(n));
        StructureTables tab(b);
        auto res = verify_sign_property(tab);
        CHECK(res.passed);
        CHECK(res.checked > 0);
    }
}

TEST_CASE("band grading, annihilation and commuting ad operators") {
    for (int n = 2; n <= 5; ++n) {
        WeightBasis b(build_sl2(n));
        const auto& f = b.triple().f;
        const auto& top = b.lowest(n - 1);
        for (std::size_t p = 0; p < b.size(); ++p) {
            auto [i, j] = b.label(p);
            for (std::size_t q = 0; q < b.size(); ++q) {
                auto [k, l] = b.label(q);
                if (std::abs(j + l) <= n - 1) CHECK(in_band(commutator(b.v(i, j), b.v(k, l)), j + l));
            }
            if (j < 0) CHECK(commutator(top, b.v(i, j)).is_zero());
            auto x = b.v(i, j);
            CHECK(commutator(top, commutator(f, x)) == commutator(f, commutator(top, x)));
        }
        for (int i = 1; i < n; ++i) CHECK(commutator(f, b.lowest(i)).is_zero());
    }
}

TEST_CASE("a is positive on its range") {
    WeightBasis b(build_sl2(7));
    StructureTables tab(b);
    for (const auto& [key, val] : tab.a_table()) CHECK(val > 0);
}

TEST_CASE("lemma suite and negative control") {
    for (int n = 2; n <= 6; ++n) {
        CHECK(run_lemma_suite(n).passed());
        CHECK_FALSE(run_lemma_suite(n, true).passed());
    }
}

TEST_CASE("table text format") {
    WeightBasis b(build_sl2(2));
    StructureTables tab(b);
    std::ostringstream os;
    tab.write_text(os);
    CHECK(os.str() == "a 1 0 2/1\na 1 1 2/1\nc 1 0 0 2/1\nc 1 1 0 2/1\n");
}
