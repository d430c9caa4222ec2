#include "operstokes/immersion.hpp"

#include <Eigen/SVD>
#include <boost/multiprecision/float128.hpp>

#include <exception>

namespace operstokes {

namespace {

template <class R>
struct Evaluation {
    std::vector<std::complex<double>> entries;
    double identity = 0, unipotency = 0;
};

template <class R>
Evaluation<R> evaluate(const ComplexOperPoint& op, const StokesSettings& s, const std::vector<int>& perm) {
    auto st = monodromy_map(convert_oper<R>(op), s);
    if (st.permutation != perm) throw NumericalError("dominance order changed at a stencil point");
    Evaluation<R> ev;
    for (const auto& m : st.monitored()) ev.entries.emplace_back(double(m.real()), double(m.imag()));
    ev.identity = double(st.residuals.identity);
    ev.unipotency = double(st.residuals.unipotency);
    return ev;
}

}  // namespace

template <class R>
JacobianReport jacobian(const ComplexOperPoint& op, const JacobianSettings& settings) {
    op.require_multiple();
    if (!(settings.h > 0)) throw std::invalid_argument("finite-difference step must be positive");
    JacobianReport rep;
    rep.n = op.n;
    rep.k = op.k();
    rep.d = op.d;
    rep.params = op.coeffs;
    rep.h = settings.h;
    rep.rank_tol = settings.rank_tol;

    auto base = monodromy_map(convert_oper<R>(op), settings.stokes);
    rep.radius = double(base.radius);
    rep.identity_residual = double(base.residuals.identity);
    rep.unipotency_residual = double(base.residuals.unipotency);
    rep.evaluations = 1;

    StokesSettings frozen = settings.stokes;
    frozen.radius = double(base.radius);
    frozen.v0 = base.layout.v0;
    const Execution outer = frozen.exec;
    frozen.exec = Execution::serial;

    const int cols = op.d - 1;
    const int dirs = settings.holomorphy ? 2 : 1;
    // job = ((dir * cols) + m) * 2 + sign
    const std::size_t jobs = static_cast<std::size_t>(dirs * cols * 2);
    std::vector<Evaluation<R>> evals(jobs);
    std::vector<std::exception_ptr> errs(jobs);
    auto body = [&](std::size_t j) {
        try {
            const int sign = j % 2 == 0 ? 1 : -1;
            const int m = static_cast<int>(j / 2) % cols;
            const int dir = static_cast<int>(j / 2) / cols;
            ComplexOperPoint p = op;
            std::complex<double> step = dir == 0 ? std::complex<double>(settings.h) : std::complex<double>(0, settings.h);
            p.coeffs[static_cast<std::size_t>(m)] += double(sign) * step;
            evals[j] = evaluate<R>(p, frozen, base.permutation);
        } catch (...) {
            errs[j] = std::current_exception();
        }
    };
    const long nj = static_cast<long>(jobs);
    if (outer == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long j = 0; j < nj; ++j) body(static_cast<std::size_t>(j));
    } else {
        for (long j = 0; j < nj; ++j) body(static_cast<std::size_t>(j));
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    const std::size_t rows = evals[0].entries.size();
    rep.jacobian = Matrix<std::complex<double>>(rows, static_cast<std::size_t>(cols));
    double jmax = 0, hdef = 0;
    for (int m = 0; m < cols; ++m) {
        const auto& plus = evals[static_cast<std::size_t>(2 * m)];
        const auto& minus = evals[static_cast<std::size_t>(2 * m + 1)];
        for (std::size_t r = 0; r < rows; ++r) {
            auto v = (plus.entries[r] - minus.entries[r]) / (2 * settings.h);
            rep.jacobian(r, static_cast<std::size_t>(m)) = v;
            jmax = std::max(jmax, std::abs(v));
        }
        if (settings.holomorphy) {
            const auto& ip = evals[static_cast<std::size_t>(2 * (cols + m))];
            const auto& im = evals[static_cast<std::size_t>(2 * (cols + m) + 1)];
            for (std::size_t r = 0; r < rows; ++r) {
                auto v = (ip.entries[r] - im.entries[r]) / std::complex<double>(0, 2 * settings.h);
                hdef = std::max(hdef, std::abs(v - rep.jacobian(r, static_cast<std::size_t>(m))));
            }
        }
    }
    rep.holomorphy_defect = jmax > 0 ? hdef / jmax : hdef;
    for (const auto& e : evals) {
        rep.identity_residual = std::max(rep.identity_residual, e.identity);
        rep.unipotency_residual = std::max(rep.unipotency_residual, e.unipotency);
    }
    rep.evaluations += static_cast<long>(jobs);

    Eigen::MatrixXcd j(static_cast<Eigen::Index>(rows), cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (int m = 0; m < cols; ++m) j(static_cast<Eigen::Index>(r), m) = rep.jacobian(r, static_cast<std::size_t>(m));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(j);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) rep.singular_values.push_back(sv[i]);
    const double s1 = rep.singular_values.empty() ? 0 : rep.singular_values.front();
    for (double s : rep.singular_values)
        if (s1 > 0 && s >= s1 * settings.rank_tol) ++rep.rank;
    rep.gap = s1 > 0 ? rep.singular_values.back() / s1 : 0;
    return rep;
}

CrossCheckReport kernel_cross_check(const OperPoint& op, int D, const JacobianSettings& settings) {
    CrossCheckReport out;
    out.exact = solvability(op, D, -1, settings.stokes.exec);
    out.numeric = jacobian<double>(to_complex(op), settings);
    out.exact_injective = out.exact.tangent_dim == 0;
    out.numeric_full_rank = out.numeric.rank == op.d - 1;
    return out;
}

template JacobianReport jacobian<double>(const ComplexOperPoint&, const JacobianSettings&);
template JacobianReport jacobian<long double>(const ComplexOperPoint&, const JacobianSettings&);
template JacobianReport jacobian<boost::multiprecision::float128>(const ComplexOperPoint&, const JacobianSettings&);

}  // namespace operstokes
