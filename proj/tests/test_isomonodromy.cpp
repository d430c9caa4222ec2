#include <doctest.h>

#include <random>

#include "operstokes/scalar.hpp"

using namespace operstokes;

namespace {

using Q = BigRational;

OperPoint random_oper(std::mt19937_64& rng, int n, int k) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
    OperPoint op = monomial_oper(n, k);
    for (auto& c : op.coeffs) c = make_rational(num(rng), den(rng));
    return op;
}

QPoly random_poly(std::mt19937_64& rng, int deg) {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    std::vector<Q> c;
    for (int i = 0; i <= deg; ++i) c.push_back(make_rational(num(rng), den(rng)));
    return QPoly(c);
}

PolyMatrix constant(const RationalMatrix& m) { return PolyMatrix{{m}}; }

RationalMatrix apply_constant(const OperPoint& op, const RationalMatrix& m) {
    auto img = multiply(jmu_operator(op, 0), flatten(constant(m), op.n, 0));
    return unflatten(img, op.n)[0];
}

}  // namespace

TEST_CASE("connection matrix examples") {
    OperPoint op = monomial_oper(2, 1);
    auto a = connection_matrix(op);
    REQUIRE(a.coeffs.size() == 3);
    RationalMatrix a2(2, 2);
    a2(1, 0) = 1;
    CHECK(a[0] == RationalMatrix::unit(2, 0, 1));
    CHECK(a[1].is_zero());
    CHECK(a[2] == a2);

    std::mt19937_64 rng(1);
    auto op3 = random_oper(rng, 3, 2);
    auto a3 = connection_matrix(op3);
    auto t = build_sl2(3);
    auto low = lowest_weight_vectors(t);
    CHECK(a3[0] == t.e + op3.coeffs[0] * low.back());
    CHECK(a3[0](0, 1) == 1);
    CHECK(a3[0](1, 2) == 2);
    for (const auto& c : a3.coeffs) CHECK(c.trace() == 0);
}

TEST_CASE("jmu operator examples") {
    OperPoint op = monomial_oper(2, 1);
    // identity is horizontal
    for (const auto& x : multiply(jmu_operator(op, 0), flatten(constant(RationalMatrix::identity(2)), 2, 0)))
        CHECK(x == 0);

    // T(e~) = -[A, e~] = z^2 h~ for p = z^2
    auto t = build_sl2(2);
    auto img = unflatten(multiply(jmu_operator(op, 0), flatten(constant(t.e), 2, 0)), 2);
    REQUIRE(img.coeffs.size() == 3);
    CHECK(img[0].is_zero());
    CHECK(img[1].is_zero());
    CHECK(img[2] == t.h);
    CHECK(apply_constant(op, t.e).is_zero());

    // Omega = A gives p' f_{n-1}
    std::mt19937_64 rng(2);
    for (int n = 2; n <= 4; ++n) {
        auto opn = random_oper(rng, n, 1);
        auto a = connection_matrix(opn);
        auto res = unflatten(multiply(jmu_operator(opn, opn.d), flatten(a, n, opn.d)), n);
        auto dp = opn.p().derivative();
        for (int m = 0; m < static_cast<int>(res.coeffs.size()); ++m) {
            RationalMatrix want(n, n);
            want(n - 1, 0) = dp[m];
            CHECK(res[m] == want);
        }
    }
}

TEST_CASE("solvability examples") {
    auto r22 = solvability(monomial_oper(2, 1), 10);
    CHECK(r22.tangent_dim == 0);
    CHECK(r22.homogeneous_kernel_dim == 1);
    CHECK(r22.traceless_kernel_dim == 0);
    CHECK_FALSE(r22.witness);

    auto r33 = solvability(monomial_oper(3, 1), 12);
    CHECK(r33.tangent_dim == 0);
    CHECK(r33.homogeneous_kernel_dim == 1);
}

TEST_CASE("witness path with the unconstrained pdot degree") {
    // pdot = p' has degree d-1 and is matched by Omega = A
    std::mt19937_64 rng(4);
    for (int n = 2; n <= 3; ++n) {
        auto op = random_oper(rng, n, 1);
        auto rep = solvability(op, op.d + 2, op.d - 1);
        CHECK(rep.tangent_dim == 1);
        REQUIRE(rep.witness);
        CHECK(rep.witness_residual_zero);
        CHECK(rep.witness->pdot.degree() == op.d - 1);
    }
}

TEST_CASE("tangent dimension stays zero as D grows") {
    std::mt19937_64 rng(8);
    auto op = random_oper(rng, 2, 2);
    for (int D = 0; D <= 12; D += 3) {
        auto rep = solvability(op, D);
        CHECK(rep.tangent_dim == 0);
        CHECK(rep.homogeneous_kernel_dim == 1);
    }
}

TEST_CASE("parallel and serial solvability agree") {
    std::mt19937_64 rng(9);
    auto op = random_oper(rng, 3, 1);
    auto a = solvability(op, 8, -1, Execution::parallel);
    auto b = solvability(op, 8, -1, Execution::serial);
    CHECK(a.tangent_dim == b.tangent_dim);
    CHECK(a.homogeneous_kernel_dim == b.homogeneous_kernel_dim);
}

TEST_CASE("numeric solvability matches the exact answer") {
    auto rep = solvability_numeric(to_complex(monomial_oper(2, 1)), 8);
    CHECK(rep.tangent_dim == 0);
    CHECK(rep.homogeneous_kernel_dim == 1);
}

TEST_CASE("scalar reduction examples") {
    auto sys = scalar_reduction(monomial_oper(2, 1));
    CHECK(sys.equations.size() == 3);
    bool found = false;
    for (const auto& eq : sys.equations)
        if (eq.i == 1 && eq.j == -1) {
            found = true;
            CHECK(eq.pdot);
            REQUIRE(eq.rhs.size() == 1);
            CHECK(eq.rhs[0].i == 1);
            CHECK(eq.rhs[0].j == 0);
            CHECK(eq.rhs[0].times_p);
            CHECK(eq.rhs[0].coeff == 2);
        }
    CHECK(found);
    for (int n = 2; n <= 6; ++n) CHECK(scalar_reduction(monomial_oper(n, 1)).equations.size() == std::size_t(n * n - 1));
}

TEST_CASE("scalar residuals equal the decomposed matrix residual") {
    std::mt19937_64 rng(12);
    for (auto [n, k] : {std::pair{2, 1}, {2, 2}, {3, 1}, {4, 1}}) {
        auto op = random_oper(rng, n, k);
        WeightBasis b(build_sl2(n));
        StructureTables tab(b);
        auto sys = scalar_reduction(tab);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<QPoly> om;
            for (std::size_t q = 0; q < b.size(); ++q) om.push_back(random_poly(rng, trial % 4));
            auto pdot = random_poly(rng, op.d - 2);
            auto lhs = scalar_residuals(sys, b, op.p(), pdot, om);
            auto rhs = matrix_residuals(op, b, pdot, om);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("weight expressions") {
    for (int n = 2; n <= 5; ++n) {
        auto rep = weight_expression_check(monomial_oper(n, 1));
        CHECK(rep.passed());
        const auto& top = rep.expressions.back();
        CHECK(top.i == n - 1);
        CHECK(top.pdot_terms.size() == 1);
        CHECK(top.pdot_terms.at(0) == 1);
        // group for m = 1 is weight one in (p, omega_{1,1}) with positive coefficients
        const WeightGroup* g = nullptr;
        for (const auto& gr : top.groups)
            if (gr.k == n - 2) g = &gr;
        REQUIRE(g);
        for (const auto& t : g->terms) {
            CHECK(t.a + t.b == 1);
            CHECK(t.coeff > 0);
        }
    }
    auto r3 = weight_expression_check(monomial_oper(3, 1));
    const auto& e1 = r3.expressions.front();
    CHECK(e1.i == 1);
    WeightBasis b(build_sl2(3));
    StructureTables tab(b);
    for (const auto& g : e1.groups) {
        CHECK(g.k <= 1);
        CHECK(tab.c(1, g.k, g.k) != 0);
    }
}

TEST_CASE("derivative of a weight expression raises the weight") {
    std::vector<WeightTerm> w{{2, 0, Q(3)}, {1, 1, Q(1)}, {0, 2, make_rational(1, 2)}};
    auto dw = differentiate(w);
    for (const auto& t : dw) {
        CHECK(t.a + t.b == 3);
        CHECK(t.coeff > 0);
    }
}

TEST_CASE("degree obstruction") {
    for (int d0 = 0; d0 <= 6; ++d0) {
        auto r = degree_obstruction(monomial_oper(2, 1), d0);
        CHECK(r.contradiction());
        bool saw = false;
        for (const auto& l : r.lines)
            if (l.i == 1 && l.k == 0) {
                saw = true;
                CHECK(l.strict);
                CHECK(l.rhs == 2 + d0 - 1);
            }
        CHECK(saw);
    }
    CHECK(degree_obstruction(monomial_oper(3, 2), 5).contradiction());
    OperPoint bad{3, 4, std::vector<Q>(3, Q(0))};
    CHECK_THROWS_AS(degree_obstruction(bad, 3), std::domain_error);
}

TEST_CASE("seeded reduction equivalence") {
    auto r = reduction_equivalence(3, 3, 10, 99);
    CHECK(r.samples == 10);
    CHECK(r.passed());
    CHECK_THROWS_AS(reduction_equivalence(3, 4, 1, 1), std::domain_error);
}
