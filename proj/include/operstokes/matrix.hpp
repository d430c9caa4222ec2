#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace operstokes {

// Dense row-major matrix with dimensions fixed at construction.
template <class C>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const C& fill = C(0))
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = C(1);
        return m;
    }
    // Single 1 at (r, c).
    static Matrix unit(std::size_t n, std::size_t r, std::size_t c) {
        Matrix m(n, n);
        m(r, c) = C(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    C& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const C& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    const std::vector<C>& data() const { return a_; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!(x == C(0))) return false;
        return true;
    }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(const C& s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a) {
        for (auto& x : a.a_) x = -x;
        return a;
    }
    friend Matrix operator*(Matrix a, const C& s) { return a *= s; }
    friend Matrix operator*(const C& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        if (x.cols_ != y.rows_) throw std::invalid_argument("matrix product: inner dimension mismatch");
        Matrix r(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                const C& xik = x(i, k);
                if (xik == C(0)) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) r(i, j) += xik * y(k, j);
            }
        return r;
    }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

    C trace() const {
        C t(0);
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shapes differ");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<C> a_;
};

// XY - YX.
template <class C>
Matrix<C> commutator(const Matrix<C>& x, const Matrix<C>& y) {
    if (!x.square() || !y.square() || x.rows() != y.rows())
        throw std::invalid_argument("commutator: operands must be square of equal size");
    return x * y - y * x;
}

}  // namespace operstokes
