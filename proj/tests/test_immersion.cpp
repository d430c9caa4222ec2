#include <doctest.h>

#include "operstokes/immersion.hpp"

using namespace operstokes;
using C = std::complex<double>;

namespace {

ComplexOperPoint monomial(int n, int k) { return to_complex(monomial_oper(n, k)); }

}  // namespace

TEST_CASE("n=2, d=2: one nonzero column") {
    auto rep = jacobian<double>(monomial(2, 1), {});
    CHECK(rep.jacobian.rows() == 4);
    CHECK(rep.jacobian.cols() == 1);
    CHECK(rep.rank == 1);
    CHECK(rep.singular_values[0] > 1e-3);
    CHECK(rep.holomorphy_defect < 1e-4);
    CHECK(rep.evaluations == 5);
}

TEST_CASE("n=2, d=4: rank 3") {
    auto rep = jacobian<double>(monomial(2, 2), {});
    CHECK(rep.jacobian.rows() == 6);
    CHECK(rep.rank == 3);
    CHECK(rep.gap >= 1e-4);
    for (std::size_t i = 0; i + 1 < rep.singular_values.size(); ++i)
        CHECK(rep.singular_values[i] >= rep.singular_values[i + 1]);
}

TEST_CASE("n=3, d=3 at a perturbed point") {
    auto op = monomial(3, 1);
    op.coeffs = {C(0.15, -0.1), C(-0.2, 0.05)};
    auto rep = jacobian<double>(op, {});
    CHECK(rep.jacobian.rows() == 12);
    CHECK(rep.rank == 2);
    CHECK(rep.gap >= 1e-4);
    CHECK(rep.holomorphy_defect < 1e-4);
    CHECK(rep.identity_residual < 1e-6);
}

TEST_CASE("rank stable under step sweep") {
    for (double h : {1e-3, 1e-4, 1e-5}) {
        JacobianSettings s;
        s.h = h;
        s.holomorphy = false;
        CHECK(jacobian<double>(monomial(2, 2), s).rank == 3);
    }
}

TEST_CASE("serial and parallel stencils agree") {
    JacobianSettings s;
    s.holomorphy = false;
    auto a = jacobian<double>(monomial(3, 1), s);
    s.stokes.exec = Execution::serial;
    auto b = jacobian<double>(monomial(3, 1), s);
    CHECK(a.jacobian == b.jacobian);
}

TEST_CASE("preconditions") {
    ComplexOperPoint bad{3, 4, std::vector<C>(3)};
    CHECK_THROWS_AS(jacobian<double>(bad, {}), std::domain_error);
    JacobianSettings s;
    s.h = 0;
    CHECK_THROWS_AS(jacobian<double>(monomial(2, 1), s), std::invalid_argument);
}

TEST_CASE("cross-check at the monomial points") {
    for (auto [n, k] : {std::pair{2, 1}, std::pair{3, 1}}) {
        auto rep = kernel_cross_check(monomial_oper(n, k), 12);
        CHECK(rep.exact_injective);
        CHECK(rep.numeric_full_rank);
        CHECK(rep.agree());
    }
}

TEST_CASE("coarse settings flip only the numeric side") {
    JacobianSettings s;
    s.rank_tol = 0.999;  // absurd threshold: keeps only sigma_1
    auto rep = kernel_cross_check(monomial_oper(2, 2), 12, s);
    CHECK(rep.exact_injective);
    CHECK_FALSE(rep.numeric_full_rank);
    CHECK_FALSE(rep.agree());
}
