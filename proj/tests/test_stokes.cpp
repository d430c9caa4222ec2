#include <doctest.h>

#include <random>
#include <set>

#include "operstokes/ode.hpp"
#include "operstokes/stokes.hpp"

using namespace operstokes;
using C = std::complex<double>;

namespace {

ComplexOper<double> monomial(int n, int k) { return {n, n * k, std::vector<C>(static_cast<std::size_t>(n * k - 1))}; }

CMatrix<double> random_matrix(std::size_t n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    CMatrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = C(g(rng), g(rng));
    return m;
}

bool contains(const std::vector<BigRational>& v, BigRational q) {
    q -= 2 * floor(q.get_d() / 2);
    for (const auto& x : v)
        if (x == q) return true;
    return false;
}

}  // namespace

TEST_CASE("LU solve and inverse") {
    std::mt19937 rng(3);
    auto a = random_matrix(5, rng);
    auto inv = inverse(a);
    CHECK(max_abs(CMatrix<double>(a * inv - CMatrix<double>::identity(5))) < 1e-12);
    CMatrix<double> z(2, 2);
    CHECK_THROWS_AS(LU<double>{z}, NumericalError);
}

TEST_CASE("orthonormalize keeps nested spans") {
    std::mt19937 rng(5);
    auto a = random_matrix(4, rng), q = a;
    orthonormalize_columns(q);
    CHECK(max_abs(CMatrix<double>(adjoint(q) * q - CMatrix<double>::identity(4))) < 1e-13);
    // Q^{-1} A is upper triangular
    auto r = inverse(q) * a;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < i; ++j) CHECK(abs(r(i, j)) < 1e-12);
}

TEST_CASE("hermitian eigen") {
    std::mt19937 rng(7);
    auto b = random_matrix(5, rng);
    CMatrix<double> h = adjoint(b) * b;
    auto e = hermitian_eigen(h);
    for (std::size_t i = 0; i + 1 < 5; ++i) CHECK(e.values[i] <= e.values[i + 1]);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) {
            C hv(0);
            for (std::size_t l = 0; l < 5; ++l) hv += h(i, l) * e.vectors(l, j);
            CHECK(abs(hv - e.values[j] * e.vectors(i, j)) < 1e-10);
        }
}

TEST_CASE("dopri5 accuracy on y' = i y and renormalizing hook") {
    Dopri5<double> ode([](double, const CVector<double>& y, CVector<double>& dy) { dy[0] = C(0, 1) * y[0]; }, 1e-10);
    CVector<double> y{C(1)};
    ode.integrate(y, 0.0, 10.0);
    CHECK(abs(y[0] - std::polar(1.0, 10.0)) < 1e-8);

    Dopri5<double> grow([](double, const CVector<double>& y, CVector<double>& dy) { dy[0] = 3.0 * y[0]; }, 1e-10);
    CVector<double> u{C(1)};
    double logs = 0;
    grow.integrate(u, 0.0, 200.0, [&](CVector<double>& s) {
        double m = abs(s[0]);
        s[0] /= m;
        logs += std::log(m);
    });
    CHECK(logs == doctest::Approx(600.0).epsilon(1e-8));
}

TEST_CASE("gauge transform") {
    auto gc = gauge_transform(convert_oper<double>(to_complex(monomial_oper(2, 1))));
    CHECK(gc.B.size() == 3);
    // B0 has eigenvalues +-1: trace 0, det -1
    CHECK(abs(gc.B[0](0, 0) + gc.B[0](1, 1)) < 1e-15);
    CHECK(abs(gc.B[0](0, 0) * gc.B[0](1, 1) - gc.B[0](0, 1) * gc.B[0](1, 0) + 1.0) < 1e-15);
    for (int n = 2; n <= 5; ++n) {
        auto g = gauge_transform(convert_oper<double>(to_complex(monomial_oper(n, 2))));
        // g'g^{-1} contributes (n-1-a)k on the diagonal of B_{k+1}
        for (int a = 0; a < n; ++a) CHECK(g.B[3](a, a).real() == doctest::Approx((n - 1 - a) * 2));
        CHECK(g.kappa == doctest::Approx(2.0 * (n - 1) / 2));
        auto d0 = g.Aprime[0];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                CHECK(abs(d0(a, b) - (a == b ? std::polar(1.0, 2 * M_PI * a / n) : C(0))) < 1e-13);
    }
    OperPointT<C> bad{3, 4, std::vector<C>(3)};
    CHECK_THROWS_AS(gauge_transform(convert_oper<double>(bad)), std::domain_error);
}

TEST_CASE("formal solution") {
    for (int n = 2; n <= 4; ++n)
        for (int k = 1; k <= 2; ++k) {
            auto op = monomial(n, k);
            op.coeffs[0] = C(0.3, -0.2);
            auto gc = gauge_transform(op);
            auto fs = formal_solution(gc, 12);
            CHECK(max_abs(CMatrix<double>(fs.Y[0] - CMatrix<double>::identity(n))) == 0);
            for (int a = 0; a < n; ++a) CHECK(abs(fs.q[k + 1][a] - gc.lambda[a] / double(k + 1)) < 1e-14);
            C tr(0);
            for (auto l : fs.Lambda) tr += l;
            CHECK(abs(tr) <= 10 * n * std::numeric_limits<double>::epsilon());
        }
    CHECK_THROWS_AS(formal_solution(gauge_transform(monomial(2, 1)), 2), std::invalid_argument);
}

TEST_CASE("formal residual decays by |z|^-2 per two extra orders") {
    auto op = monomial(3, 1);
    op.coeffs[1] = C(0.5, 0.25);
    auto gc = gauge_transform(op);
    const int M = 8;
    auto lo = formal_solution(gc, M), hi = formal_solution(gc, M + 2);
    std::vector<double> ratios;
    for (double mod : {8.0, 16.0}) {
        C z = std::polar(mod, 0.3);
        ratios.push_back(formal_residual(gc, hi, z) / formal_residual(gc, lo, z));
        CHECK(ratios.back() < 1.0);
    }
    // doubling |z| divides the ratio by 4
    CHECK(ratios[0] / ratios[1] == doctest::Approx(4.0).epsilon(0.2));
    double r1 = formal_residual(gc, lo, C(8.0)), r2 = formal_residual(gc, lo, C(16.0));
    CHECK(std::log2(r1 / r2) > M - 2);
}

TEST_CASE("layout: counts and exact angles") {
    for (int n = 3; n <= 5; ++n)
        for (int k = 1; k <= 3; ++k) {
            auto lay = sector_layout(n, k);
            CHECK(lay.r == 2 * n * (k + 1));
            CHECK(lay.ell == n);
        }
    // for n = 2 the two exponentials +-z^{k+1}/(k+1) only give 2(k+1) directions
    auto two = sector_layout(2, 1);
    CHECK(two.r == 4);
    CHECK(two.ell == 1);
    CHECK(two.d(1) == make_rational(1, 2));
    CHECK(two.d(2) == 1);
    CHECK(two.d(5) == two.d(1) + 2);
}

TEST_CASE("layout: rotation invariance and symmetric sector") {
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k <= 3; ++k) {
            auto lay = sector_layout(n, k);
            std::vector<BigRational> angles;
            for (const auto& d : lay.directions) {
                BigRational a = d.angle;
                angles.push_back(a - 2 * floor(a.get_d() / 2));
            }
            for (const auto& a : angles) CHECK(contains(angles, a + make_rational(1, k + 1)));
            // supersectors are bounded by Stokes lines
            auto sl = stokes_lines(n, k);
            for (int i = 0; i <= lay.r; ++i) {
                auto [lo, hi] = lay.supersector(i);
                CHECK(contains(sl, lo));
                CHECK(contains(sl, hi));
            }
            if (n % 2 == 1) {
                bool found = false;
                for (int i = 0; i < lay.r; ++i) {
                    auto [lo, hi] = lay.sector(i);
                    if (lo + hi == 0) found = true;
                }
                CHECK(found);
            }
        }
}

TEST_CASE("layout: base direction on a ray") {
    CHECK_THROWS_AS(sector_layout(3, 1, make_rational(1, 12)), std::invalid_argument);
    CHECK_NOTHROW(sector_layout(3, 1, make_rational(1, 13)));
}

TEST_CASE("Stokes pipeline residuals") {
    for (int n : {2, 3}) {
        auto op = monomial(n, 1);
        StokesSettings s;
        auto st = monodromy_map(op, s);
        CHECK(st.factors.size() == static_cast<std::size_t>(st.layout.r));
        CHECK(st.matrices.size() == 4);
        CHECK(st.residuals.identity < 1e-6);
        CHECK(st.residuals.unipotency < 1e-6);
        CHECK(st.residuals.support < 1e-6);
        CHECK(st.residuals.trace < 1e-12);
        CHECK(st.monitored().size() == static_cast<std::size_t>(2 * n * (n - 1)));
        // P^{-1} S_1 P upper triangular
        auto s1 = st.permuted(1);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < x; ++y) CHECK(abs(s1(x, y)) < 1e-6);
    }
}

TEST_CASE("Stokes multipliers of y'' = z^2 y") {
    auto st = monodromy_map(monomial(2, 1), StokesSettings{});
    // every nontrivial entry has modulus sqrt(2) (Weber equation at the symmetric point)
    for (auto m : st.monitored()) CHECK(abs(m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
}

TEST_CASE("refinement shrinks residuals and keeps the output") {
    auto op = monomial(3, 1);
    op.coeffs[0] = C(0.2, 0.1);
    StokesSettings s;
    auto coarse = monodromy_map(op, s);
    s.trunc_order = 30;
    s.ode_tol = 1e-12;
    auto fine = monodromy_map(op, s);
    CHECK(fine.residuals.identity * 10 <= coarse.residuals.identity);
    CHECK(fine.residuals.unipotency * 10 <= coarse.residuals.unipotency);
    auto a = coarse.monitored(), b = fine.monitored();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(abs(a[i] - b[i]) < 1e-8);
}

TEST_CASE("halving ode tolerance moves canonical solutions by less than 10 tol") {
    for (int n : {2, 3}) {
        StokesSettings s;
        auto a = monodromy_map(monomial(n, 1), s);
        const double tol = s.ode_tol;
        s.ode_tol /= 2;
        auto b = monodromy_map(monomial(n, 1), s);
        for (std::size_t i = 0; i < a.canonical.size(); ++i) {
            double scale = std::max(1.0, max_abs(a.canonical[i]));
            CHECK(max_abs(CMatrix<double>(a.canonical[i] - b.canonical[i])) < 10 * tol * scale);
        }
    }
}

TEST_CASE("serial and parallel runs agree exactly") {
    auto op = monomial(3, 1);
    op.coeffs[1] = C(-0.4, 0.3);
    StokesSettings s;
    s.exec = Execution::serial;
    auto a = monodromy_map(op, s);
    s.exec = Execution::parallel;
    auto b = monodromy_map(op, s);
    CHECK(a.monitored() == b.monitored());
    CHECK(a.residuals.identity == b.residuals.identity);
}

TEST_CASE("diagonal framing conjugates the Stokes factors") {
    auto op = monomial(3, 1);
    StokesSettings s;
    auto a = monodromy_map(op, s);
    s.framing = {C(1), C(2, 1), C(0.5, -0.3)};
    auto b = monodromy_map(op, s);
    CHECK(b.residuals.support < 1e-6);
    for (std::size_t i = 0; i < a.factors.size(); ++i)
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                C expect = a.factors[i](x, y) * s.framing[y] / s.framing[x];
                CHECK(abs(b.factors[i](x, y) - expect) < 1e-6);
            }
}

TEST_CASE("base direction change keeps residuals small") {
    StokesSettings s;
    s.v0 = make_rational(1, 7);
    auto st = monodromy_map(monomial(3, 1), s);
    CHECK(st.residuals.identity < 1e-6);
    CHECK(st.residuals.unipotency < 1e-6);
}

TEST_CASE("extended precision") {
    StokesSettings s;
    s.trunc_order = 24;
    s.ode_tol = 1e-13;
    s.radius_tol = 1e-15;
    auto st = monodromy_map(convert_oper<long double>(to_complex(monomial_oper(2, 1))), s);
    CHECK(static_cast<double>(st.residuals.identity) < 1e-10);
}
