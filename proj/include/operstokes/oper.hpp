#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "operstokes/poly.hpp"
#include "operstokes/rational.hpp"

namespace operstokes {

// y^(n) = p y with p = z^d + c_{d-2} z^{d-2} + ... + c_0 (monic, no z^{d-1}).
template <class C>
struct OperPointT {
    int n = 2;
    int d = 2;
    std::vector<C> coeffs;  // c_0 .. c_{d-2}

    int k() const { return d / n; }
    bool degree_is_multiple() const { return d % n == 0; }

    Poly<C> p() const {
        std::vector<C> c(coeffs);
        c.resize(static_cast<std::size_t>(d) + 1, C(0));
        c[static_cast<std::size_t>(d)] = C(1);
        return Poly<C>(std::move(c));
    }

    void validate() const {
        if (n < 2) throw std::invalid_argument("n must be at least 2");
        if (d < 1) throw std::invalid_argument("degree must be positive");
        if (coeffs.size() != static_cast<std::size_t>(d - 1))
            throw std::invalid_argument("expected " + std::to_string(d - 1) + " coefficients c_0..c_{d-2}, got " +
                                        std::to_string(coeffs.size()));
    }
    void require_multiple() const {
        validate();
        if (!degree_is_multiple())
            throw std::domain_error("degree " + std::to_string(d) + " is not a multiple of n = " +
                                    std::to_string(n));
    }
};

using OperPoint = OperPointT<BigRational>;
using ComplexOperPoint = OperPointT<std::complex<double>>;

inline OperPoint monomial_oper(int n, int k) {
    OperPoint op{n, n * k, std::vector<BigRational>(static_cast<std::size_t>(n * k - 1), BigRational(0))};
    return op;
}

inline ComplexOperPoint to_complex(const OperPoint& op) {
    ComplexOperPoint c{op.n, op.d, {}};
    for (const auto& q : op.coeffs) c.coeffs.emplace_back(q.get_d(), 0.0);
    return c;
}

}  // namespace operstokes
