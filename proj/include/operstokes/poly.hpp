#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace operstokes {

// Dense univariate polynomial, coefficients by ascending power of z.
// The coefficient list never ends in a zero; the zero polynomial is empty.
template <class C>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<C> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<C> coeffs) : c_(coeffs) { trim(); }

    static Poly monomial(int power, C value = C(1)) {
        std::vector<C> c(static_cast<std::size_t>(power) + 1, C(0));
        c.back() = std::move(value);
        return Poly(std::move(c));
    }

    // -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    // Coefficient of z^i, zero beyond the stored range.
    C operator[](int i) const {
        if (i < 0 || i >= static_cast<int>(c_.size())) return C(0);
        return c_[static_cast<std::size_t>(i)];
    }
    const std::vector<C>& coefficients() const { return c_; }

    template <class T>
    T evaluate(const T& z) const {
        T acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + T(*it);
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<C> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = C(static_cast<long>(i)) * c_[i];
        return Poly(std::move(d));
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), C(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), C(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    Poly& operator*=(const C& s) {
        for (auto& x : c_) x *= s;
        trim();
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    friend Poly operator*(Poly a, const C& s) { return a *= s; }
    friend Poly operator*(const C& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<C> r(a.c_.size() + b.c_.size() - 1, C(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == C(0)) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == C(0)) c_.pop_back();
    }

    std::vector<C> c_;
};

template <class C>
Poly<C> poly_derivative(const Poly<C>& p) {
    return p.derivative();
}

}  // namespace operstokes
