#include "operstokes/scalar.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace operstokes {

ScalarSystem scalar_reduction(const StructureTables& tab) {
    const int n = tab.n();
    ScalarSystem sys{n, {}};
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j <= i; ++j) sys.equations.push_back({i, j, 'a', {{i, j - 1, BigRational(1), false}}, false});
        for (int j = 0; j <= i; ++j) {
            ScalarEquation eq{i, -j, 'b', {}, false};
            if (j < i) eq.rhs.push_back({i, -j - 1, BigRational(1), false});
            else eq.kind = i < n - 1 ? 'c' : 'd';
            for (int k = 0; k <= std::min(j, n - 2); ++k)
                eq.rhs.push_back({n - 1 - k, n - 1 - j, tab.c(i, j, k), true});
            eq.pdot = i == n - 1 && j == n - 1;
            sys.equations.push_back(std::move(eq));
        }
    }
    return sys;
}

ScalarSystem scalar_reduction(const OperPoint& op) {
    op.validate();
    WeightBasis b(build_sl2(op.n));
    return scalar_reduction(StructureTables(b));
}

std::vector<QPoly> scalar_residuals(const ScalarSystem& sys, const WeightBasis& basis, const QPoly& p,
                                    const QPoly& pdot, const std::vector<QPoly>& omega) {
    std::vector<QPoly> out(basis.size());
    for (const auto& eq : sys.equations) {
        QPoly r = omega[basis.index(eq.i, eq.j)].derivative();
        for (const auto& t : eq.rhs) {
            QPoly term = t.coeff * omega[basis.index(t.i, t.j)];
            r -= t.times_p ? p * term : term;
        }
        if (eq.pdot) r -= pdot;
        out[basis.index(eq.i, eq.j)] = r;
    }
    return out;
}

std::vector<QPoly> matrix_residuals(const OperPoint& op, const WeightBasis& basis, const QPoly& pdot,
                                    const std::vector<QPoly>& omega) {
    const int n = op.n;
    const auto un = static_cast<std::size_t>(n);
    int D = 0;
    for (const auto& w : omega) D = std::max(D, w.degree());
    PolyMatrix om;
    om.coeffs.assign(static_cast<std::size_t>(D) + 1, RationalMatrix(un, un));
    for (std::size_t q = 0; q < omega.size(); ++q) {
        auto [i, j] = basis.label(q);
        for (int m = 0; m <= omega[q].degree(); ++m)
            if (omega[q][m] != 0) om[m] += omega[q][m] * basis.v(i, j);
    }
    auto image = unflatten(multiply(jmu_operator(op, D), flatten(om, n, D)), n);
    for (int t = 0; t <= pdot.degree(); ++t) image[t](un - 1, 0) -= pdot[t];

    std::vector<std::vector<BigRational>> coeffs(basis.size(), std::vector<BigRational>(image.coeffs.size()));
    for (std::size_t m = 0; m < image.coeffs.size(); ++m) {
        auto c = basis.decompose(image[m]);
        for (std::size_t q = 0; q < c.size(); ++q) coeffs[q][m] = c[q];
    }
    std::vector<QPoly> out;
    for (auto& c : coeffs) out.emplace_back(std::move(c));
    return out;
}

std::vector<WeightTerm> differentiate(const std::vector<WeightTerm>& terms) {
    std::map<std::pair<int, int>, BigRational> acc;
    for (const auto& t : terms) {
        acc[{t.a + 1, t.b}] += t.coeff;
        acc[{t.a, t.b + 1}] += t.coeff;
    }
    std::vector<WeightTerm> out;
    for (auto& [ab, c] : acc)
        if (c != 0) out.push_back({ab.first, ab.second, c});
    return out;
}

namespace {

WeightExpression iterate(const StructureTables& tab, int i) {
    const int n = tab.n();
    WeightExpression ex;
    ex.i = i;
    std::map<std::tuple<int, int, int>, BigRational> terms;  // (k, a, b)
    std::map<int, BigRational> pdot;
    int chain = i;  // current chain symbol omega_{i,chain}
    bool chain_alive = true;

    for (int step = 1; step <= 2 * i + 1; ++step) {
        std::map<std::tuple<int, int, int>, BigRational> next;
        for (const auto& [key, c] : terms) {
            auto [k, a, b] = key;
            next[{k, a + 1, b}] += c;
            next[{k, a, b + 1}] += c;
        }
        std::map<int, BigRational> next_pdot;
        for (const auto& [a, c] : pdot) next_pdot[a + 1] += c;
        if (!chain_alive) throw std::logic_error("chain exhausted before order 2i+1");
        if (chain >= 1) {
            --chain;
        } else {
            const int j = -chain;
            // omega_{n-1-k, n-1-j} = omega_{m,m}^(j-k), m = n-1-k
            for (int k = 0; k <= std::min(j, n - 2); ++k) next[{k, 0, j - k}] += tab.c(i, j, k);
            if (j < i) {
                --chain;
            } else {
                chain_alive = false;
                if (i == n - 1) next_pdot[0] += 1;
            }
        }
        terms = std::move(next);
        pdot = std::move(next_pdot);
    }
    if (chain_alive) throw std::logic_error("chain survives past order 2i+1");

    for (const auto& [key, c] : terms) {
        if (c == 0) continue;
        auto [k, a, b] = key;
        if (ex.groups.empty() || ex.groups.back().k != k) ex.groups.push_back({k, {}});
        ex.groups.back().terms.push_back({a, b, c});
    }
    for (const auto& [a, c] : pdot)
        if (c != 0) ex.pdot_terms[a] = c;

    const std::string tag = "omega_{" + std::to_string(i) + "," + std::to_string(i) + "}: ";
    for (const auto& g : ex.groups) {
        const std::string gt = tag + "group k=" + std::to_string(g.k);
        if (g.k > i || !tab.has_c(i, g.k, g.k) || tab.c(i, g.k, g.k) == 0) {
            ex.only_allowed_groups = false;
            ex.violations.push_back(gt + " appears although c(i,k,k) = 0");
        }
        int s0 = sgn(g.terms.front().coeff);
        for (const auto& t : g.terms) {
            if (t.a + t.b != i - g.k) {
                ex.weights_match = false;
                ex.violations.push_back(gt + " has a term of weight " + std::to_string(t.a + t.b));
            }
            if (sgn(t.coeff) != s0) {
                ex.signs_uniform = false;
                ex.violations.push_back(gt + " mixes signs");
            }
        }
    }
    return ex;
}

}  // namespace

WeightReport weight_expression_check(const StructureTables& tab) {
    WeightReport rep{tab.n(), {}};
    for (int i = 1; i < tab.n(); ++i) rep.expressions.push_back(iterate(tab, i));
    return rep;
}

WeightReport weight_expression_check(const OperPoint& op) {
    op.validate();
    WeightBasis b(build_sl2(op.n));
    return weight_expression_check(StructureTables(b));
}

ObstructionReport degree_obstruction(const OperPoint& op, int d0) {
    op.require_multiple();
    if (d0 < 0) throw std::invalid_argument("hypothetical degree must be non-negative");
    const int n = op.n, d = op.d;
    auto rep = weight_expression_check(op);
    if (!rep.passed()) throw std::logic_error("weight expressions are malformed; no degree argument applies");
    ObstructionReport out{n, d, d0, {}};
    for (const auto& ex : rep.expressions) {
        const int i = ex.i;
        for (const auto& g : ex.groups) {
            ObstructionLine l;
            l.i = i;
            l.k = g.k;
            l.lhs = d0 - (2 * i + 1);
            l.rhs = d + d0 - i + g.k;
            if (i == n - 1) {
                // pdot has degree <= d-2 < d-1, so it cannot absorb the top term
                l.strict = true;
                l.lhs = std::max<long>(l.lhs, d - 2);
            }
            l.holds = l.lhs >= l.rhs;
            out.lines.push_back(l);
        }
    }
    return out;
}

ReductionCheck reduction_equivalence(int n, int d, int samples, unsigned long long seed) {
    if (d % n != 0) throw std::domain_error("degree must be a multiple of n");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
    auto rational = [&] { return make_rational(num(rng), den(rng)); };
    auto poly = [&](int deg) {
        std::vector<BigRational> c;
        for (int i = 0; i <= deg; ++i) c.push_back(rational());
        return QPoly(c);
    };
    WeightBasis basis(build_sl2(n));
    StructureTables tables(basis);
    auto sys = scalar_reduction(tables);
    ReductionCheck out{n, d, samples, 0};
    for (int s = 0; s < samples; ++s) {
        OperPoint op = monomial_oper(n, d / n);
        for (auto& c : op.coeffs) c = rational();
        std::vector<QPoly> omega;
        for (std::size_t q = 0; q < basis.size(); ++q) omega.push_back(poly(s % 5));
        auto pdot = poly(std::max(0, d - 2));
        if (scalar_residuals(sys, basis, op.p(), pdot, omega) != matrix_residuals(op, basis, pdot, omega))
            ++out.mismatches;
    }
    return out;
}

}  // namespace operstokes
