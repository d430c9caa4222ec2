#include "operstokes/isomonodromy.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <stdexcept>

namespace operstokes {

int PolyMatrix::degree() const {
    for (int m = static_cast<int>(coeffs.size()) - 1; m >= 0; --m)
        if (!coeffs[static_cast<std::size_t>(m)].is_zero()) return m;
    return -1;
}

namespace {

// Coefficients A_0..A_d of A = e~ + p f_{n-1}.
template <class C>
std::vector<Matrix<C>> connection_coeffs(int n, int d, const std::vector<C>& c) {
    const auto un = static_cast<std::size_t>(n);
    std::vector<Matrix<C>> a(static_cast<std::size_t>(d) + 1, Matrix<C>(un, un));
    for (int r = 0; r + 1 < n; ++r) a[0](r, r + 1) = C(r + 1);
    for (int s = 0; s <= d - 2; ++s) a[static_cast<std::size_t>(s)](un - 1, 0) += c[static_cast<std::size_t>(s)];
    a[static_cast<std::size_t>(d)](un - 1, 0) = C(1);
    return a;
}

template <class C>
Matrix<C> assemble_jmu(int n, int d, const std::vector<C>& c, int D) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const auto a = connection_coeffs(n, d, c);
    Matrix<C> t(nn * static_cast<std::size_t>(D + d + 1), nn * static_cast<std::size_t>(D + 1));
    for (int m = 0; m <= D; ++m)
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                const std::size_t col = m * nn + p * n + q;
                if (m >= 1) t((m - 1) * nn + p * n + q, col) += C(m);
                for (int s = 0; s <= d; ++s) {
                    const auto& as = a[static_cast<std::size_t>(s)];
                    const std::size_t base = (m + s) * nn;
                    // -[A_s, E_pq] = -(A_s E_pq) + E_pq A_s
                    for (int r = 0; r < n; ++r)
                        if (!(as(r, p) == C(0))) t(base + r * n + q, col) -= as(r, p);
                    for (int r = 0; r < n; ++r)
                        if (!(as(q, r) == C(0))) t(base + p * n + r, col) += as(q, r);
                }
            }
    return t;
}

// Omega' - [A, Omega] - pdot f_{n-1}, by polynomial arithmetic on the matrices.
PolyMatrix jmu_residual(const OperPoint& op, const PolyMatrix& omega, const Poly<BigRational>& pdot) {
    const auto un = static_cast<std::size_t>(op.n);
    const auto a = connection_matrix(op);
    const int D = static_cast<int>(omega.coeffs.size()) - 1;
    PolyMatrix out;
    out.coeffs.assign(static_cast<std::size_t>(std::max(D, 0) + op.d + 1), RationalMatrix(un, un));
    for (int m = 1; m <= D; ++m) out[m - 1] += BigRational(m) * omega[m];
    for (int m = 0; m <= D; ++m)
        for (int s = 0; s <= op.d; ++s) out[m + s] -= commutator(a[s], omega[m]);
    for (int t = 0; t <= pdot.degree(); ++t) out[t](un - 1, 0) -= pdot[t];
    return out;
}

}  // namespace

PolyMatrix connection_matrix(const OperPoint& op) {
    op.validate();
    return PolyMatrix{connection_coeffs(op.n, op.d, op.coeffs)};
}

RationalVector flatten(const PolyMatrix& omega, int n, int D) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    RationalVector x(nn * static_cast<std::size_t>(D + 1), BigRational(0));
    for (int m = 0; m <= D && m < static_cast<int>(omega.coeffs.size()); ++m)
        for (std::size_t q = 0; q < nn; ++q) x[m * nn + q] = omega[m].data()[q];
    return x;
}

PolyMatrix unflatten(const RationalVector& x, int n) {
    const auto un = static_cast<std::size_t>(n);
    const std::size_t nn = un * un;
    PolyMatrix out;
    for (std::size_t m = 0; m * nn < x.size(); ++m) {
        RationalMatrix c(un, un);
        for (std::size_t q = 0; q < nn && m * nn + q < x.size(); ++q) c(q / un, q % un) = x[m * nn + q];
        out.coeffs.push_back(std::move(c));
    }
    return out;
}

RationalMatrix jmu_operator(const OperPoint& op, int D) {
    op.validate();
    if (D < 0) throw std::invalid_argument("degree cap D must be non-negative");
    return assemble_jmu(op.n, op.d, op.coeffs, D);
}

SolvabilityReport solvability(const OperPoint& op, int D, int max_pdot_degree, Execution exec) {
    auto t0 = std::chrono::steady_clock::now();
    op.validate();
    const int n = op.n;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    SolvabilityReport rep;
    rep.n = n;
    rep.k = op.k();
    rep.d = op.d;
    rep.D = D;
    rep.max_pdot_degree = max_pdot_degree < 0 ? op.d - 2 : max_pdot_degree;
    const std::size_t npd = static_cast<std::size_t>(rep.max_pdot_degree + 1);

    RationalMatrix t = jmu_operator(op, D);
    const std::size_t ct = t.cols();
    std::size_t rows = std::max(t.rows(), nn * static_cast<std::size_t>(rep.max_pdot_degree + 1));
    RationalMatrix joint(rows, ct + npd);
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < ct; ++c)
            if (t(r, c) != 0) joint(r, c) = t(r, c);
    for (std::size_t s = 0; s < npd; ++s) joint(s * nn + (n - 1) * n, ct + s) = -1;

    // T occupies the leading columns, so its echelon form is the restriction.
    EchelonForm ef = fraction_free_echelon(joint, exec);
    std::size_t rank_t = 0, rank_pd = 0;
    for (auto p : ef.pivots) (p < ct ? rank_t : rank_pd) += 1;
    rep.homogeneous_kernel_dim = ct - rank_t;
    rep.tangent_dim = npd - rank_pd;

    if (rep.tangent_dim > 0) {
        for (const auto& x : exact_nullspace(joint, exec)) {
            std::vector<BigRational> pd(x.begin() + static_cast<long>(ct), x.end());
            Poly<BigRational> pdot(pd);
            if (pdot.is_zero()) continue;
            RationalVector om(x.begin(), x.begin() + static_cast<long>(ct));
            Witness w{pdot, unflatten(om, n)};
            rep.witness_residual_zero = jmu_residual(op, w.omega, w.pdot).degree() < 0;
            rep.witness = std::move(w);
            break;
        }
    }

    RationalMatrix tl(t.rows() + static_cast<std::size_t>(D + 1), ct);
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < ct; ++c)
            if (t(r, c) != 0) tl(r, c) = t(r, c);
    for (int m = 0; m <= D; ++m)
        for (int a = 0; a < n; ++a) tl(t.rows() + m, m * nn + a * n + a) = 1;
    rep.traceless_kernel_dim = ct - exact_rank(tl, exec);

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

NumericSolvability solvability_numeric(const ComplexOperPoint& op, int D, double rel_tol) {
    op.validate();
    using cd = std::complex<double>;
    const int n = op.n;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    Matrix<cd> t = assemble_jmu(n, op.d, op.coeffs, D);
    const std::size_t ct = t.cols(), npd = static_cast<std::size_t>(op.d - 1);
    Eigen::MatrixXcd jt(t.rows(), ct + npd);
    jt.setZero();
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < ct; ++c) jt(r, c) = t(r, c);
    for (std::size_t s = 0; s < npd; ++s) jt(s * nn + (n - 1) * n, ct + s) = -1.0;

    auto rank_of = [&](const Eigen::MatrixXcd& m, double* smallest) {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
        const auto& s = svd.singularValues();
        std::size_t r = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) {
                ++r;
                if (smallest) *smallest = s(i);
            }
        return r;
    };
    NumericSolvability out;
    std::size_t rt = rank_of(jt.leftCols(ct), nullptr);
    std::size_t rj = rank_of(jt, &out.smallest_kept_sigma);
    out.homogeneous_kernel_dim = ct - rt;
    out.tangent_dim = npd - (rj - rt);
    return out;
}

}  // namespace operstokes
