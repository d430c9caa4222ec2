#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "operstokes/exact_linalg.hpp"
#include "operstokes/numeric_linalg.hpp"
#include "operstokes/oper.hpp"

namespace operstokes {

template <class R>
using ComplexOper = OperPointT<Cx<R>>;

template <class R>
ComplexOper<R> convert_oper(const ComplexOperPoint& op) {
    ComplexOper<R> out{op.n, op.d, {}};
    for (const auto& c : op.coeffs) out.coeffs.emplace_back(R(c.real()), R(c.imag()));
    return out;
}

// B(z) = g'g^{-1} + g A g^{-1} = z^k sum_j B_j z^{-j} with g = diag(z^{(n-1-a)k}),
// A the companion matrix of y^(n) = p y. The scalar part kappa/z of the
// residue is split off; A'_j = f0^{-1} (B_j - [j = k+1] kappa I) f0.
template <class R>
struct GaugedConnection {
    int n = 0, k = 0, d = 0;
    std::vector<CMatrix<R>> B;
    std::vector<CMatrix<R>> Aprime;
    std::vector<Cx<R>> lambda;
    CMatrix<R> f0, f0_inv;
    R kappa = 0;
};

template <class R>
GaugedConnection<R> gauge_transform(const ComplexOper<R>& op);

// Y(z) = f0 Yhat(z) z^{kappa + Lambda} exp(Q(z)) solves the gauged system, with
// Yhat = sum_m Y_m z^{-m}, Q(z)_a = sum_{p=1}^{k+1} q[p][a] z^p.
template <class R>
struct FormalSolution {
    int n = 0, k = 0, M = 0;
    std::vector<CMatrix<R>> Y;
    std::vector<std::vector<Cx<R>>> q;
    std::vector<Cx<R>> Lambda;  // traceless part
    R kappa = 0;

    Cx<R> q_at(int a, Cx<R> z) const;
    CMatrix<R> yhat_at(Cx<R> z) const;
};

template <class R>
FormalSolution<R> formal_solution(const GaugedConnection<R>& gc, int M);

// Max-abs residual of Yhat' - A' Yhat + Yhat (Q' + Lambda/z) at z (gauged, framed
// coordinates, trace split off).
template <class R>
R formal_residual(const GaugedConnection<R>& gc, const FormalSolution<R>& fs, Cx<R> z);

// Angles are exact rational multiples of pi.
struct Direction {
    BigRational angle;
    std::vector<std::pair<int, int>> pairs;  // (a, b): entry (a, b) of the Stokes factor may be nonzero
};

struct SectorLayout {
    int n = 0, k = 0, r = 0, ell = 0;
    BigRational v0;
    std::vector<Direction> directions;  // d_1 .. d_r, increasing within (v0, v0 + 2)

    // d_i for any integer i, with d_{i+r} = d_i + 2.
    BigRational d(long i) const;
    std::pair<BigRational, BigRational> sector(long i) const;
    std::pair<BigRational, BigRational> supersector(long i) const;
    const Direction& direction(long i) const;
};

BigRational canonical_v0(int n, int k);

// All anti-Stokes directions of the cyclic system. Throws std::invalid_argument
// when v0 lies on one of them.
SectorLayout sector_layout(int n, int k, const std::optional<BigRational>& v0 = std::nullopt);

// Angles in [0, 2) where two exponentials have equal real part.
std::vector<BigRational> stokes_lines(int n, int k);

struct StokesSettings {
    int trunc_order = 20;
    double ode_tol = 1e-10;
    double radius_tol = 1e-12;
    double radius = 0;  // 0: adaptive
    std::optional<BigRational> v0;
    // optional diagonal rescaling of the framing, f0 -> f0 diag(framing)
    std::vector<std::complex<double>> framing;
    Execution exec = Execution::parallel;
};

template <class R>
struct StokesData {
    SectorLayout layout;
    FormalSolution<R> formal;
    R radius = 0;
    std::vector<CMatrix<R>> canonical;  // values at z = 0 of Phi_0 .. Phi_r
    std::vector<CMatrix<R>> factors;    // K_1 .. K_r
    std::vector<CMatrix<R>> matrices;   // S_1 .. S_{2k+2}
    std::vector<int> permutation;       // position -> eigenvalue index
    struct Residuals {
        R identity = 0, unipotency = 0, support = 0, trace = 0, asymptotic = 0, flag = 0;
    } residuals;
    long ode_steps = 0;

    // P^{-1} S_i P (i is 1-based).
    CMatrix<R> permuted(int i) const;
    // Strictly upper entries for odd i, strictly lower for even i, in order.
    std::vector<Cx<R>> monitored() const;
};

template <class R>
StokesData<R> monodromy_map(const ComplexOper<R>& op, const StokesSettings& s);

}  // namespace operstokes
