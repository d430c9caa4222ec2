#include "operstokes/exact_linalg.hpp"

#include <stdexcept>
#include <utility>

namespace operstokes {

namespace {

using IntRow = std::vector<BigInteger>;

IntRow to_integer_row(const RationalMatrix& m, std::size_t r) {
    BigInteger den = 1;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const BigRational& q = m(r, c);
        if (q != 0) den = lcm(den, BigInteger(q.get_den()));
    }
    IntRow row(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const BigRational& q = m(r, c);
        if (q != 0) row[c] = q.get_num() * (den / q.get_den());
    }
    return row;
}

void make_primitive(IntRow& row) {
    BigInteger g = 0;
    for (const auto& x : row) {
        if (x == 0) continue;
        g = gcd(g, x);
        if (g == 1) return;
    }
    if (g == 0 || g == 1) return;
    for (auto& x : row)
        if (x != 0) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

// row <- piv*row - a*pivot_row, where a = row[c]; then strip the content.
void eliminate(IntRow& row, const IntRow& pivot_row, const BigInteger& piv, std::size_t c) {
    BigInteger a = row[c];
    BigInteger t;
    for (std::size_t j = 0; j < row.size(); ++j) {
        bool rz = row[j] == 0, pz = pivot_row[j] == 0;
        if (rz && pz) continue;
        if (!rz) row[j] *= piv;
        if (!pz) {
            t = a * pivot_row[j];
            row[j] -= t;
        }
    }
    row[c] = 0;
    make_primitive(row);
}

}  // namespace

EchelonForm fraction_free_echelon(const RationalMatrix& m, Execution exec) {
    EchelonForm ef;
    ef.cols = m.cols();
    std::vector<IntRow> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        IntRow row = to_integer_row(m, r);
        make_primitive(row);
        bool nz = false;
        for (const auto& x : row) nz = nz || x != 0;
        if (nz) rows.push_back(std::move(row));
    }

    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols() && rank < rows.size(); ++c) {
        // smallest pivot keeps growth down; ties go to the lowest index
        std::size_t best = rows.size();
        std::size_t best_bits = 0;
        for (std::size_t r = rank; r < rows.size(); ++r) {
            if (rows[r][c] == 0) continue;
            std::size_t bits = mpz_sizeinbase(rows[r][c].get_mpz_t(), 2);
            if (best == rows.size() || bits < best_bits) {
                best = r;
                best_bits = bits;
            }
        }
        if (best == rows.size()) continue;
        std::swap(rows[rank], rows[best]);
        if (rows[rank][c] < 0)
            for (auto& x : rows[rank]) x = -x;

        const IntRow& prow = rows[rank];
        const BigInteger piv = prow[c];
        const long nrows = static_cast<long>(rows.size());
        const long skip = static_cast<long>(rank);
        if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
            for (long r = 0; r < nrows; ++r)
                if (r != skip && rows[r][c] != 0) eliminate(rows[r], prow, piv, c);
        } else {
            for (long r = 0; r < nrows; ++r)
                if (r != skip && rows[r][c] != 0) eliminate(rows[r], prow, piv, c);
        }
        ef.pivots.push_back(c);
        ++rank;
    }
    rows.resize(rank);
    ef.rows = std::move(rows);
    return ef;
}

std::size_t exact_rank(const RationalMatrix& m, Execution exec) {
    return fraction_free_echelon(m, exec).rank();
}

namespace {

std::vector<RationalVector> nullspace_from(const EchelonForm& ef, std::size_t ncols) {
    std::vector<bool> is_pivot(ncols, false);
    for (auto p : ef.pivots)
        if (p < ncols) is_pivot[p] = true;
    std::vector<RationalVector> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        RationalVector x(ncols, BigRational(0));
        x[f] = 1;
        for (std::size_t r = 0; r < ef.rows.size(); ++r) {
            std::size_t p = ef.pivots[r];
            if (p >= ncols || ef.rows[r][f] == 0) continue;
            BigRational q(-ef.rows[r][f], ef.rows[r][p]);
            q.canonicalize();
            x[p] = q;
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace

std::vector<RationalVector> exact_nullspace(const RationalMatrix& m, Execution exec) {
    return nullspace_from(fraction_free_echelon(m, exec), m.cols());
}

std::optional<SolveResult> exact_solve(const RationalMatrix& m, const RationalVector& b,
                                       Execution exec) {
    if (b.size() != m.rows()) throw std::invalid_argument("exact_solve: rhs length mismatch");
    const std::size_t nc = m.cols();
    RationalMatrix aug(m.rows(), nc + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < nc; ++c) aug(r, c) = m(r, c);
        aug(r, nc) = b[r];
    }
    EchelonForm ef = fraction_free_echelon(aug, exec);
    if (!ef.pivots.empty() && ef.pivots.back() == nc) return std::nullopt;

    SolveResult out;
    out.particular.assign(nc, BigRational(0));
    for (std::size_t r = 0; r < ef.rows.size(); ++r) {
        std::size_t p = ef.pivots[r];
        BigRational q(ef.rows[r][nc], ef.rows[r][p]);
        q.canonicalize();
        out.particular[p] = q;
    }
    out.kernel = nullspace_from(ef, nc);
    return out;
}

RationalVector multiply(const RationalMatrix& m, const RationalVector& x) {
    if (x.size() != m.cols()) throw std::invalid_argument("multiply: length mismatch");
    RationalVector y(m.rows(), BigRational(0));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0 && x[c] != 0) y[r] += m(r, c) * x[c];
    return y;
}

namespace reference {

namespace {

std::pair<RationalMatrix, std::vector<std::size_t>> rref(RationalMatrix a) {
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < a.cols() && rank < a.rows(); ++c) {
        std::size_t p = rank;
        while (p < a.rows() && a(p, c) == 0) ++p;
        if (p == a.rows()) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(rank, j));
        BigRational inv = 1 / a(rank, c);
        for (std::size_t j = 0; j < a.cols(); ++j) a(rank, j) *= inv;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r == rank || a(r, c) == 0) continue;
            BigRational f = a(r, c);
            for (std::size_t j = 0; j < a.cols(); ++j) a(r, j) -= f * a(rank, j);
        }
        pivots.push_back(c);
        ++rank;
    }
    return {std::move(a), std::move(pivots)};
}

}  // namespace

std::size_t rank(const RationalMatrix& m) { return rref(m).second.size(); }

std::vector<RationalVector> nullspace(const RationalMatrix& m) {
    auto [a, pivots] = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<RationalVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        RationalVector x(m.cols(), BigRational(0));
        x[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -a(r, f);
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace reference

}  // namespace operstokes
