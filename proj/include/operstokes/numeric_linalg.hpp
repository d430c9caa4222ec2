#pragma once

#include <boost/math/constants/constants.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "operstokes/matrix.hpp"

namespace operstokes {

template <class R>
using Cx = std::complex<R>;
template <class R>
using CMatrix = Matrix<Cx<R>>;
template <class R>
using CVector = std::vector<Cx<R>>;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class R>
R pi_v() {
    return boost::math::constants::pi<R>();
}

template <class R>
R max_abs(const CMatrix<R>& m) {
    R best = 0;
    for (const auto& x : m.data()) best = std::max<R>(best, abs(x));
    return best;
}

template <class R>
R norm2(const CVector<R>& v) {
    R s = 0;
    for (const auto& x : v) s += norm(x);
    return sqrt(s);
}

template <class R>
CVector<R> matvec(const CMatrix<R>& m, const CVector<R>& x) {
    CVector<R> y(m.rows(), Cx<R>(0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
    return y;
}

template <class R>
CMatrix<R> adjoint(const CMatrix<R>& m) {
    CMatrix<R> t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = conj(m(i, j));
    return t;
}

// LU with partial pivoting, kept factored for repeated solves.
template <class R>
class LU {
public:
    explicit LU(CMatrix<R> a) : lu_(std::move(a)), perm_(lu_.rows()) {
        const std::size_t n = lu_.rows();
        if (!lu_.square()) throw std::invalid_argument("LU of a non-square matrix");
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        const R scale = max_abs(lu_);
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n; ++r)
                if (abs(lu_(r, c)) > abs(lu_(p, c))) p = r;
            if (abs(lu_(p, c)) <= scale * std::numeric_limits<R>::epsilon() * R(n) || scale == 0)
                throw NumericalError("matrix is numerically singular");
            if (p != c) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(c, j));
                std::swap(perm_[p], perm_[c]);
            }
            for (std::size_t r = c + 1; r < n; ++r) {
                lu_(r, c) /= lu_(c, c);
                const Cx<R> f = lu_(r, c);
                for (std::size_t j = c + 1; j < n; ++j) lu_(r, j) -= f * lu_(c, j);
            }
        }
    }

    CVector<R> solve(const CVector<R>& b) const {
        const std::size_t n = lu_.rows();
        CVector<R> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    CMatrix<R> solve(const CMatrix<R>& b) const {
        CMatrix<R> x(b.rows(), b.cols());
        CVector<R> col(b.rows());
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
            auto s = solve(col);
            for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = s[i];
        }
        return x;
    }

private:
    CMatrix<R> lu_;
    std::vector<std::size_t> perm_;
};

template <class R>
CMatrix<R> inverse(const CMatrix<R>& a) {
    return LU<R>(a).solve(CMatrix<R>::identity(a.rows()));
}

// In-place modified Gram-Schmidt (twice, for orthogonality at full rank).
// Column spans are nested: span(q_0..q_j) = span(a_0..a_j).
template <class R>
void orthonormalize_columns(CMatrix<R>& a) {
    const std::size_t n = a.rows(), m = a.cols();
    for (std::size_t j = 0; j < m; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < j; ++i) {
                Cx<R> dot(0);
                for (std::size_t r = 0; r < n; ++r) dot += conj(a(r, i)) * a(r, j);
                for (std::size_t r = 0; r < n; ++r) a(r, j) -= dot * a(r, i);
            }
        R nrm = 0;
        for (std::size_t r = 0; r < n; ++r) nrm += norm(a(r, j));
        nrm = sqrt(nrm);
        if (!(nrm > 0)) throw NumericalError("rank loss during re-orthonormalization");
        for (std::size_t r = 0; r < n; ++r) a(r, j) /= nrm;
    }
}

template <class R>
struct HermitianEigen {
    std::vector<R> values;  // ascending
    CMatrix<R> vectors;     // columns
};

// Cyclic complex Jacobi; fine for the small Hermitian matrices used here.
template <class R>
HermitianEigen<R> hermitian_eigen(CMatrix<R> a) {
    const std::size_t n = a.rows();
    CMatrix<R> v = CMatrix<R>::identity(n);
    const R eps = std::numeric_limits<R>::epsilon();
    for (int sweep = 0; sweep < 100; ++sweep) {
        R off = 0, total = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += norm(a(i, j));
                if (i != j) off += norm(a(i, j));
            }
        if (off <= eps * eps * total || total == 0) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const R apq = abs(a(p, q));
                if (apq == 0) continue;
                const Cx<R> phase = a(p, q) / apq;
                const R app = real(a(p, p)), aqq = real(a(q, q));
                const R theta = (aqq - app) / (2 * apq);
                const R t = (theta >= 0 ? R(1) : R(-1)) / (abs(theta) + sqrt(theta * theta + 1));
                const R c = 1 / sqrt(t * t + 1), s = t * c;
                // rotation acting on columns p, q: [c, s*phase; -s*conj(phase), c]
                for (std::size_t k = 0; k < n; ++k) {
                    const Cx<R> akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * conj(phase) * akq;
                    a(k, q) = s * phase * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Cx<R> apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * conj(phase) * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Cx<R> vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * conj(phase) * vkq;
                    v(k, q) = s * phase * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return real(a(x, x)) < real(a(y, y)); });
    HermitianEigen<R> out{std::vector<R>(n), CMatrix<R>(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = real(a(idx[j], idx[j]));
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[j]);
    }
    return out;
}

}  // namespace operstokes
