#pragma once

#include <optional>
#include <vector>

#include "operstokes/exact_linalg.hpp"
#include "operstokes/oper.hpp"

namespace operstokes {

// Polynomial matrix as its coefficient list: Omega = sum_m coeffs[m] z^m.
struct PolyMatrix {
    std::vector<RationalMatrix> coeffs;

    int degree() const;
    RationalMatrix& operator[](std::size_t m) { return coeffs[m]; }
    const RationalMatrix& operator[](std::size_t m) const { return coeffs[m]; }
};

// A = e~ + p f_{n-1}.
PolyMatrix connection_matrix(const OperPoint& op);

// Omega (deg <= D) in coordinates m*n^2 + a*n + b.
RationalVector flatten(const PolyMatrix& omega, int n, int D);
PolyMatrix unflatten(const RationalVector& x, int n);

// T(Omega) = Omega' - [A, Omega] from degree <= D into degree <= D + d.
RationalMatrix jmu_operator(const OperPoint& op, int D);

struct Witness {
    Poly<BigRational> pdot;
    PolyMatrix omega;
};

struct SolvabilityReport {
    int n = 0, k = 0, d = 0, D = 0;
    int max_pdot_degree = 0;
    std::size_t tangent_dim = 0;
    std::size_t homogeneous_kernel_dim = 0;
    std::size_t traceless_kernel_dim = 0;
    std::optional<Witness> witness;
    bool witness_residual_zero = true;
    double seconds = 0;
};

// Joint system Omega' = pdot f_{n-1} + [A, Omega] with deg pdot <= max_pdot_degree
// (default d-2, i.e. the tangent space of the monic trace-free slice).
SolvabilityReport solvability(const OperPoint& op, int D, int max_pdot_degree = -1,
                              Execution exec = Execution::parallel);

// Floating-point variant for complex points. Rank is decided by singular
// values relative to rel_tol, so the answer is an estimate, not a certificate.
struct NumericSolvability {
    std::size_t tangent_dim = 0;
    std::size_t homogeneous_kernel_dim = 0;
    double smallest_kept_sigma = 0;
};
NumericSolvability solvability_numeric(const ComplexOperPoint& op, int D, double rel_tol = 1e-10);

}  // namespace operstokes
