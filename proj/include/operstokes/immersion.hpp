#pragma once

#include <complex>
#include <vector>

#include "operstokes/isomonodromy.hpp"
#include "operstokes/stokes.hpp"

namespace operstokes {

struct JacobianSettings {
    StokesSettings stokes;
    double h = 1e-4;
    double rank_tol = 1e-4;
    bool holomorphy = true;  // also difference along i*h
};

struct JacobianReport {
    int n = 0, k = 0, d = 0;
    std::vector<std::complex<double>> params;  // c_0 .. c_{d-2}
    Matrix<std::complex<double>> jacobian;     // monitored entries x (d-1)
    std::vector<double> singular_values;       // descending
    int rank = 0;
    double h = 0, rank_tol = 0;
    double gap = 0;  // sigma_min / sigma_1
    double holomorphy_defect = 0;
    double radius = 0;
    // worst residuals over the base point and every stencil point
    double identity_residual = 0, unipotency_residual = 0;
    long evaluations = 0;
};

// Central differences of the monitored Stokes entries in the coordinates
// c_0..c_{d-2}. Radius, layout and permutation are frozen at the base point.
template <class R>
JacobianReport jacobian(const ComplexOperPoint& op, const JacobianSettings& settings);

struct CrossCheckReport {
    SolvabilityReport exact;
    JacobianReport numeric;
    bool exact_injective = false;
    bool numeric_full_rank = false;
    bool agree() const { return exact_injective == numeric_full_rank; }
};

CrossCheckReport kernel_cross_check(const OperPoint& op, int D, const JacobianSettings& settings = {});

}  // namespace operstokes
