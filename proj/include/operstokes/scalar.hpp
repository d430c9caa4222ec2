#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "operstokes/isomonodromy.hpp"
#include "operstokes/sl2.hpp"

namespace operstokes {

using QPoly = Poly<BigRational>;

// coeff * omega_{i,j}, optionally multiplied by p.
struct ScalarTerm {
    int i = 0, j = 0;
    BigRational coeff;
    bool times_p = false;
};

// omega_{i,j}' = sum(rhs) [+ pdot]
struct ScalarEquation {
    int i = 0, j = 0;
    char kind = 'a';  // which of the four shapes produced it
    std::vector<ScalarTerm> rhs;
    bool pdot = false;
};

struct ScalarSystem {
    int n = 0;
    std::vector<ScalarEquation> equations;
};

ScalarSystem scalar_reduction(const StructureTables& tables);
ScalarSystem scalar_reduction(const OperPoint& op);

// omega_{i,j}' - rhs for every equation, in the weight-basis flat order.
std::vector<QPoly> scalar_residuals(const ScalarSystem& sys, const WeightBasis& basis, const QPoly& p,
                                    const QPoly& pdot, const std::vector<QPoly>& omega);

// Same quantity through the matrix operator: decompose(T(Omega) - pdot f_{n-1}).
std::vector<QPoly> matrix_residuals(const OperPoint& op, const WeightBasis& basis, const QPoly& pdot,
                                    const std::vector<QPoly>& omega);

// coeff * p^(a) * omega_{m,m}^(b)
struct WeightTerm {
    int a = 0, b = 0;
    BigRational coeff;
};

struct WeightGroup {
    int k = 0;  // omega_{m,m} with m = n-1-k
    std::vector<WeightTerm> terms;
};

// Weight-w group differentiated once is a weight-(w+1) group.
std::vector<WeightTerm> differentiate(const std::vector<WeightTerm>& terms);

struct WeightExpression {
    int i = 0;
    std::vector<WeightGroup> groups;
    std::map<int, BigRational> pdot_terms;  // derivative order -> coefficient
    bool only_allowed_groups = true;
    bool weights_match = true;
    bool signs_uniform = true;
    std::vector<std::string> violations;

    bool passed() const { return only_allowed_groups && weights_match && signs_uniform; }
};

struct WeightReport {
    int n = 0;
    std::vector<WeightExpression> expressions;  // i = 1 .. n-1
    bool passed() const {
        for (const auto& e : expressions)
            if (!e.passed()) return false;
        return true;
    }
};

// Iterates the scalar system symbolically to write omega_{i,i}^(2i+1) in
// terms of p^(a) omega_{m,m}^(b) (and pdot for i = n-1).
WeightReport weight_expression_check(const StructureTables& tables);
WeightReport weight_expression_check(const OperPoint& op);

struct ObstructionLine {
    int i = 0, k = 0;
    long lhs = 0, rhs = 0;  // degree of omega_{i,i}^(2i+1) vs degree forced by the group
    bool strict = false;    // pdot comparison (i = n-1) uses a strict inequality
    bool holds = false;
};

struct ObstructionReport {
    int n = 0, d = 0, d0 = 0;
    std::vector<ObstructionLine> lines;
    bool contradiction() const {
        for (const auto& l : lines)
            if (l.holds) return false;
        return !lines.empty();
    }
};

// For a hypothetical max degree d0 of the omega_{i,i}, replays the degree
// comparison group by group. Throws std::domain_error unless n divides d.
ObstructionReport degree_obstruction(const OperPoint& op, int d0);

}  // namespace operstokes

namespace operstokes {

// Random rational (op, Omega, pdot) samples; counts samples where the scalar
// residuals differ from the decomposed matrix residual.
struct ReductionCheck {
    int n = 0, d = 0, samples = 0, mismatches = 0;
    bool passed() const { return mismatches == 0; }
};
ReductionCheck reduction_equivalence(int n, int d, int samples, unsigned long long seed);

}  // namespace operstokes
