#include <doctest.h>

#include <random>

#include "operstokes/exact_linalg.hpp"
#include "operstokes/poly.hpp"
#include "operstokes/sl2.hpp"

using namespace operstokes;

namespace {

using QPoly = Poly<BigRational>;
using Q = BigRational;

QPoly z_pow(int p, long c = 1) { return QPoly::monomial(p, Q(c)); }

RationalMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    RationalMatrix m(rows.size(), rows.begin()->size());
    std::size_t r = 0;
    for (auto row : rows) {
        std::size_t c = 0;
        for (long v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int zero_pct) {
    std::uniform_int_distribution<int> pct(0, 99), num(-9, 9), den(1, 5);
    RationalMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (pct(rng) >= zero_pct) m(i, j) = make_rational(num(rng), den(rng));
    return m;
}

QPoly random_poly(std::mt19937_64& rng, int deg) {
    std::uniform_int_distribution<int> num(-7, 7), den(1, 4);
    std::vector<Q> c;
    for (int i = 0; i <= deg; ++i) c.push_back(make_rational(num(rng), den(rng)));
    return QPoly(c);
}

}  // namespace

TEST_CASE("rational parsing and printing") {
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("-6/4") == make_rational(-3, 2));
    CHECK(parse_rational("0.25") == make_rational(1, 4));
    CHECK(parse_rational("-1.50") == make_rational(-3, 2));
    CHECK(parse_rational("010") == 10);
    CHECK(to_fraction_string(make_rational(4, -6)) == "-2/3");
    CHECK(to_fraction_string(Q(5)) == "5/1");
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
    CHECK_THROWS(make_rational(1, 0));
}

TEST_CASE("poly derivative examples") {
    CHECK(poly_derivative(z_pow(3)) == z_pow(2, 3));
    CHECK(poly_derivative(QPoly()).is_zero());
    CHECK(poly_derivative(z_pow(4) + z_pow(1, 2)) == z_pow(3, 4) + QPoly{Q(2)});
    CHECK(QPoly().degree() == -1);
    CHECK(QPoly{Q(1), Q(0), Q(0)}.degree() == 0);
}

TEST_CASE("poly derivative is linear and Leibniz") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> deg(0, 8);
    for (int trial = 0; trial < 50; ++trial) {
        QPoly f = random_poly(rng, deg(rng)), g = random_poly(rng, deg(rng));
        Q s = make_rational(trial - 20, 3);
        CHECK(poly_derivative(f + s * g) == poly_derivative(f) + s * poly_derivative(g));
        CHECK(poly_derivative(f * g) == poly_derivative(f) * g + f * poly_derivative(g));
    }
}

TEST_CASE("commutator examples") {
    auto t = build_sl2(2);
    CHECK(commutator(t.e, t.f) == t.h);
    CHECK(commutator(t.e, t.e).is_zero());
    auto e12 = RationalMatrix::unit(2, 0, 1), e21 = RationalMatrix::unit(2, 1, 0);
    CHECK(commutator(e12, e21) == from_rows({{1, 0}, {0, -1}}));
    CHECK_THROWS_AS(commutator(RationalMatrix(2, 2), RationalMatrix(3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(commutator(RationalMatrix(2, 3), RationalMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("exact_nullspace examples") {
    CHECK(exact_nullspace(RationalMatrix(3, 3)).size() == 3);
    CHECK(exact_nullspace(RationalMatrix::identity(4)).empty());
    auto ker = exact_nullspace(from_rows({{1, 2}, {2, 4}}));
    REQUIRE(ker.size() == 1);
    CHECK(ker[0] == RationalVector{Q(-2), Q(1)});
}

TEST_CASE("exact_solve examples") {
    auto s1 = exact_solve(RationalMatrix::identity(3), {Q(1), Q(0), Q(0)});
    REQUIRE(s1);
    CHECK(s1->particular == RationalVector{Q(1), Q(0), Q(0)});
    CHECK(s1->kernel.empty());

    CHECK_FALSE(exact_solve(RationalMatrix(2, 2), {Q(1), Q(0)}));

    auto s3 = exact_solve(from_rows({{1, 1}}), {Q(1)});
    REQUIRE(s3);
    CHECK(s3->particular == RationalVector{Q(1), Q(0)});
    REQUIRE(s3->kernel.size() == 1);
    CHECK(s3->kernel[0] == RationalVector{Q(-1), Q(1)});
}

TEST_CASE("nullity plus rank equals column count") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 9);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t r = dim(rng), c = dim(rng);
        auto m = random_matrix(rng, r, c, trial % 3 == 0 ? 70 : 30);
        auto ker = exact_nullspace(m);
        auto rk = reference::rank(m);
        CHECK(ker.size() + rk == c);
        CHECK(exact_rank(m, Execution::serial) == rk);
        for (const auto& x : ker)
            for (const auto& y : multiply(m, x)) CHECK(y == 0);
        CHECK(reference::nullspace(m).size() == ker.size());
    }
}

TEST_CASE("exact_solve re-substitution") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(1, 8);
    int solved = 0, refused = 0;
    for (int trial = 0; trial < 80; ++trial) {
        std::size_t r = dim(rng), c = dim(rng);
        auto m = random_matrix(rng, r, c, 40);
        RationalVector b;
        if (trial % 2 == 0) {
            auto x = random_matrix(rng, c, 1, 0);
            RationalVector xv;
            for (std::size_t i = 0; i < c; ++i) xv.push_back(x(i, 0));
            b = multiply(m, xv);
        } else {
            auto bm = random_matrix(rng, r, 1, 0);
            for (std::size_t i = 0; i < r; ++i) b.push_back(bm(i, 0));
        }
        auto sol = exact_solve(m, b);
        if (trial % 2 == 0) REQUIRE(sol);
        if (!sol) {
            // inconsistency must be genuine: appending b raises the rank
            RationalMatrix aug(r, c + 1);
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < c; ++j) aug(i, j) = m(i, j);
                aug(i, c) = b[i];
            }
            CHECK(reference::rank(aug) == reference::rank(m) + 1);
            ++refused;
            continue;
        }
        CHECK(multiply(m, sol->particular) == b);
        CHECK(sol->kernel.size() == c - reference::rank(m));
        ++solved;
    }
    CHECK(solved > 0);
    CHECK(refused > 0);
}

TEST_CASE("parallel and serial elimination agree") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto m = random_matrix(rng, 40, 50, 60);
        auto a = fraction_free_echelon(m, Execution::parallel);
        auto b = fraction_free_echelon(m, Execution::serial);
        CHECK(a.pivots == b.pivots);
        CHECK(a.rows == b.rows);
    }
}
