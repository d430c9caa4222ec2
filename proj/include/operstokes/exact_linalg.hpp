#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "operstokes/matrix.hpp"
#include "operstokes/rational.hpp"

namespace operstokes {

using RationalMatrix = Matrix<BigRational>;
using RationalVector = std::vector<BigRational>;

// Reduced row echelon form produced by fraction-free elimination. Each
// stored row is a primitive integer row whose pivot entry is positive;
// `pivots[r]` is the pivot column of row r.
struct EchelonForm {
    std::size_t cols = 0;
    std::vector<std::vector<BigInteger>> rows;
    std::vector<std::size_t> pivots;

    std::size_t rank() const { return pivots.size(); }
};

enum class Execution { serial, parallel };

// Fraction-free Gauss-Jordan elimination. Row updates within one pivot step
// are independent and run under OpenMP when `exec` is parallel; the result
// does not depend on the thread count.
EchelonForm fraction_free_echelon(const RationalMatrix& m, Execution exec = Execution::parallel);

std::size_t exact_rank(const RationalMatrix& m, Execution exec = Execution::parallel);

// Basis of ker M as column vectors (one per free column); dim = cols - rank.
std::vector<RationalVector> exact_nullspace(const RationalMatrix& m,
                                            Execution exec = Execution::parallel);

struct SolveResult {
    RationalVector particular;
    std::vector<RationalVector> kernel;
};

// nullopt when b is not in the image of M.
std::optional<SolveResult> exact_solve(const RationalMatrix& m, const RationalVector& b,
                                       Execution exec = Execution::parallel);

RationalVector multiply(const RationalMatrix& m, const RationalVector& x);

// Serial textbook Gauss-Jordan over mpq; kept as the independent reference
// for the fraction-free kernels.
namespace reference {
std::size_t rank(const RationalMatrix& m);
std::vector<RationalVector> nullspace(const RationalMatrix& m);
}  // namespace reference

}  // namespace operstokes
