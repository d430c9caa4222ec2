#include "operstokes/sl2.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <stdexcept>

namespace operstokes {

namespace {

std::string ij(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }
std::string ijk(int i, int j, int k) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
}

// Flatten the matrices into the rows of one matrix.
RationalMatrix stack_rows(const std::vector<RationalMatrix>& ms) {
    if (ms.empty()) return {};
    std::size_t len = ms.front().rows() * ms.front().cols();
    RationalMatrix out(ms.size(), len);
    for (std::size_t r = 0; r < ms.size(); ++r)
        for (std::size_t c = 0; c < len; ++c) out(r, c) = ms[r].data()[c];
    return out;
}

}  // namespace

Sl2Triple build_sl2(int n) {
    if (n < 2) throw std::invalid_argument("sl(n) needs n >= 2, got " + std::to_string(n));
    const auto un = static_cast<std::size_t>(n);
    Sl2Triple t{n, RationalMatrix(un, un), RationalMatrix(un, un), RationalMatrix(un, un)};
    for (int a = 0; a < n; ++a) {
        t.h(a, a) = n - 1 - 2 * a;
        if (a + 1 < n) {
            t.e(a, a + 1) = a + 1;
            t.f(a + 1, a) = n - 1 - a;
        }
    }
    return t;
}

bool in_band(const RationalMatrix& x, int j) {
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c)
            if (x(r, c) != 0 && static_cast<long>(c) - static_cast<long>(r) != j) return false;
    return true;
}

std::vector<RationalMatrix> lowest_weight_vectors(const Sl2Triple& t) {
    const int n = t.n;
    const auto un = static_cast<std::size_t>(n);
    std::vector<RationalMatrix> out;
    for (int i = 1; i < n; ++i) {
        const int len = n - i;
        // columns: band positions (t+i, t); rows: entries of [f~, X]
        RationalMatrix op(un * un, static_cast<std::size_t>(len));
        for (int s = 0; s < len; ++s) {
            auto img = commutator(t.f, RationalMatrix::unit(un, s + i, s));
            for (std::size_t q = 0; q < un * un; ++q) op(q, s) = img.data()[q];
        }
        auto ker = exact_nullspace(op);
        if (ker.size() != 1)
            throw std::logic_error("ker ad_f on band S(-" + std::to_string(i) + ") has dimension " +
                                   std::to_string(ker.size()));
        BigInteger den = 1, g = 0;
        for (const auto& x : ker[0])
            if (x != 0) den = lcm(den, BigInteger(x.get_den()));
        std::vector<BigInteger> ints;
        for (const auto& x : ker[0]) {
            BigInteger v = x.get_num() * (den / x.get_den());
            g = gcd(g, v);
            ints.push_back(v);
        }
        if (ints.front() < 0) g = -g;
        RationalMatrix fi(un, un);
        BigInteger least = 0;
        for (int s = 0; s < len; ++s) {
            BigInteger v = ints[s] / g;
            if (v <= 0)
                throw std::logic_error("lowest weight vector f_" + std::to_string(i) +
                                       " has a non-positive entry");
            if (least == 0 || v < least) least = v;
            fi(s + i, s) = BigRational(v);
        }
        if (least != 1)
            throw std::logic_error("lowest weight vector f_" + std::to_string(i) + " has least entry " +
                                   least.get_str());
        out.push_back(std::move(fi));
    }
    return out;
}

WeightBasis::WeightBasis(const Sl2Triple& t) : triple_(t), lowest_(lowest_weight_vectors(t)) {
    const int n = t.n;
    std::size_t off = 0;
    for (int i = 1; i < n; ++i) {
        offset_.push_back(off);
        off += static_cast<std::size_t>(2 * i + 1);
        RationalMatrix v = lowest_[static_cast<std::size_t>(i - 1)];
        for (int j = -i; j <= i; ++j) {
            if (v.is_zero() || !in_band(v, j))
                throw std::logic_error("v" + ij(i, j) + " is zero or leaves band S(" +
                                       std::to_string(j) + ")");
            if (commutator(t.h, v) != BigRational(2 * j) * v)
                throw std::logic_error("v" + ij(i, j) + " does not have weight " + std::to_string(2 * j));
            vectors_.push_back(v);
            v = commutator(t.e, v);
        }
        if (!v.is_zero()) throw std::logic_error("ad_e^(2i+1) f_i is nonzero for i=" + std::to_string(i));
    }
    if (exact_rank(stack_rows(vectors_)) != vectors_.size())
        throw std::logic_error("weight basis is linearly dependent");
}

const RationalMatrix& WeightBasis::lowest(int i) const {
    if (i < 1 || i >= n()) throw std::out_of_range("f_" + std::to_string(i) + " out of range");
    return lowest_[static_cast<std::size_t>(i - 1)];
}

std::size_t WeightBasis::index(int i, int j) const {
    if (i < 1 || i >= n() || j < -i || j > i) throw std::out_of_range("v" + ij(i, j) + " out of range");
    return offset_[static_cast<std::size_t>(i - 1)] + static_cast<std::size_t>(j + i);
}

std::pair<int, int> WeightBasis::label(std::size_t idx) const {
    for (int i = n() - 1; i >= 1; --i) {
        std::size_t o = offset_[static_cast<std::size_t>(i - 1)];
        if (idx >= o) {
            if (idx - o > static_cast<std::size_t>(2 * i)) break;
            return {i, static_cast<int>(idx - o) - i};
        }
    }
    throw std::out_of_range("basis index " + std::to_string(idx) + " out of range");
}

const RationalMatrix& WeightBasis::v(int i, int j) const { return vectors_[index(i, j)]; }

RationalVector WeightBasis::decompose(const RationalMatrix& x) const {
    const int nn = n();
    const auto un = static_cast<std::size_t>(nn);
    if (x.rows() != un || x.cols() != un) throw std::invalid_argument("decompose: wrong matrix size");
    if (x.trace() != 0) throw std::invalid_argument("decompose: matrix is not traceless");
    RationalVector coeff(size(), BigRational(0));
    for (int j = -(nn - 1); j <= nn - 1; ++j) {
        const int len = nn - std::abs(j);
        const int i0 = std::max(1, std::abs(j));
        const int nunk = nn - i0;
        RationalMatrix m(static_cast<std::size_t>(len), static_cast<std::size_t>(nunk));
        RationalVector rhs(static_cast<std::size_t>(len));
        bool any = false;
        for (int s = 0; s < len; ++s) {
            std::size_t r = static_cast<std::size_t>(j >= 0 ? s : s - j);
            std::size_t c = static_cast<std::size_t>(j >= 0 ? s + j : s);
            rhs[s] = x(r, c);
            any = any || rhs[s] != 0;
            for (int u = 0; u < nunk; ++u) m(s, u) = v(i0 + u, j)(r, c);
        }
        if (!any) continue;
        auto sol = exact_solve(m, rhs, Execution::serial);
        if (!sol || !sol->kernel.empty())
            throw std::logic_error("decompose: band " + std::to_string(j) + " is not spanned uniquely");
        for (int u = 0; u < nunk; ++u) coeff[index(i0 + u, j)] = sol->particular[u];
    }
    return coeff;
}

WeightBasis build_weight_basis(const Sl2Triple& t) { return WeightBasis(t); }

StructureTables::StructureTables(const WeightBasis& b) : n_(b.n()) {
    const int n = n_;
    const auto& f = b.triple().f;
    for (int i = 1; i < n; ++i)
        for (int j = -i + 1; j <= i; ++j) {
            auto co = b.decompose(commutator(f, b.v(i, j)));
            std::size_t target = b.index(i, j - 1);
            for (std::size_t q = 0; q < co.size(); ++q)
                if (q != target && co[q] != 0)
                    throw std::logic_error("[f, v" + ij(i, j) + "] is not a multiple of v" + ij(i, j - 1));
            a_[{i, j}] = co[target];
        }
    const auto& top = b.lowest(n - 1);
    for (int k = 0; k <= n - 2; ++k)
        for (int j = k; j <= n - 1; ++j) {
            auto co = b.decompose(commutator(top, b.v(n - 1 - k, n - 1 - j)));
            for (std::size_t q = 0; q < co.size(); ++q) {
                if (co[q] == 0) continue;
                auto [i, jj] = b.label(q);
                if (jj != -j || i < std::max(1, j))
                    throw std::logic_error("[f_{n-1}, v] has a component outside band S(-j)");
            }
            for (int i = std::max(1, j); i <= n - 1; ++i) c_[{i, j, k}] = co[b.index(i, -j)];
        }
}

const BigRational& StructureTables::a(int i, int j) const {
    auto it = a_.find({i, j});
    if (it == a_.end()) throw std::out_of_range("a" + ij(i, j) + " out of range");
    return it->second;
}

bool StructureTables::has_c(int i, int j, int k) const { return c_.count({i, j, k}) != 0; }

const BigRational& StructureTables::c(int i, int j, int k) const {
    auto it = c_.find({i, j, k});
    if (it == c_.end()) throw std::out_of_range("c" + ijk(i, j, k) + " out of range");
    return it->second;
}

void StructureTables::set_c(int i, int j, int k, BigRational value) {
    auto it = c_.find({i, j, k});
    if (it == c_.end()) throw std::out_of_range("c" + ijk(i, j, k) + " out of range");
    it->second = std::move(value);
}

void StructureTables::write_text(std::ostream& os) const {
    for (const auto& [key, val] : a_)
        os << "a " << key.first << ' ' << key.second << ' ' << to_fraction_string(val) << '\n';
    for (const auto& [key, val] : c_)
        os << "c " << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key) << ' '
           << to_fraction_string(val) << '\n';
}

StructureTables compute_structure_tables(const WeightBasis& b) { return StructureTables(b); }

CheckResult verify_sign_property(const StructureTables& t) {
    CheckResult res{"c sign lemma and recursion"};
    const int n = t.n();
    for (int k = 0; k <= n - 2; ++k)
        for (int i = std::max(1, k); i <= n - 1; ++i) {
            const BigRational& ckk = t.c(i, k, k);
            if (ckk != 0) {
                for (int j = k; j <= i; ++j) {
                    ++res.checked;
                    const BigRational& cj = t.c(i, j, k);
                    if (cj == 0 || sgn(cj) != sgn(ckk))
                        res.fail("c" + ijk(i, j, k) + " = " + to_fraction_string(cj) +
                                 " disagrees in sign with c" + ijk(i, k, k));
                }
            }
            for (int j = k; j < i; ++j) {
                ++res.checked;
                BigRational lhs = t.c(i, j + 1, k) * t.a(n - 1 - k, n - 1 - j);
                BigRational rhs = t.a(i, -j) * t.c(i, j, k);
                if (lhs != rhs) res.fail("recursion fails at " + ijk(i, j, k));
            }
        }
    return res;
}

LemmaSuite run_lemma_suite(int n, bool corrupt) {
    LemmaSuite suite{n, {}};
    const auto un = static_cast<std::size_t>(n);
    Sl2Triple t = build_sl2(n);

    CheckResult rel{"sl2 relations"};
    rel.checked = 4;
    if (commutator(t.e, t.f) != t.h) rel.fail("[e,f] != h");
    if (commutator(t.h, t.e) != BigRational(2) * t.e) rel.fail("[h,e] != 2e");
    if (commutator(t.h, t.f) != BigRational(-2) * t.f) rel.fail("[h,f] != -2f");
    if (t.e.trace() != 0 || t.f.trace() != 0 || t.h.trace() != 0) rel.fail("nonzero trace");
    suite.checks.push_back(rel);

    CheckResult low{"lowest weight vectors"};
    std::optional<WeightBasis> basis;
    try {
        basis.emplace(t);
        for (int i = 1; i < n; ++i) {
            ++low.checked;
            if (!commutator(t.f, basis->lowest(i)).is_zero()) low.fail("[f, f_" + std::to_string(i) + "] != 0");
        }
        if (basis->lowest(1) != t.f) low.fail("f_1 != f");
        if (basis->lowest(n - 1) != RationalMatrix::unit(un, un - 1, 0)) low.fail("f_{n-1} != E_{n,1}");
    } catch (const std::exception& ex) {
        low.fail(ex.what());
    }
    suite.checks.push_back(low);
    if (!basis) return suite;

    CheckResult span{"weight basis spans sl(n)"};
    {
        std::vector<RationalMatrix> vs;
        for (int i = 1; i < n; ++i)
            for (int j = -i; j <= i; ++j) vs.push_back(basis->v(i, j));
        span.checked = vs.size();
        std::size_t r = exact_rank(stack_rows(vs));
        if (vs.size() != un * un - 1 || r != un * un - 1)
            span.fail("rank " + std::to_string(r) + ", expected " + std::to_string(un * un - 1));
    }
    suite.checks.push_back(span);

    StructureTables tab(*basis);
    if (corrupt) tab.set_c(n - 1, n - 1, n - 2, -tab.c(n - 1, n - 1, n - 2));

    CheckResult af{"a(i,j) = (i+j)(i-j+1)"};
    for (const auto& [key, val] : tab.a_table()) {
        ++af.checked;
        auto [i, j] = key;
        if (val != BigRational((i + j) * (i - j + 1)) || val <= 0)
            af.fail("a" + ij(i, j) + " = " + to_fraction_string(val));
    }
    suite.checks.push_back(af);

    CheckResult special{"c(n-1,n-1,n-2), c(n-1,n-2,n-2), c(n-2,n-2,n-2)"};
    special.checked = 2;
    if (tab.c(n - 1, n - 1, n - 2) != BigRational(2 * (n - 1))) special.fail("c(n-1,n-1,n-2) != 2(n-1)");
    if (tab.c(n - 1, n - 2, n - 2) != 2) special.fail("c(n-1,n-2,n-2) != 2");
    if (n >= 3) {
        ++special.checked;
        if (tab.c(n - 2, n - 2, n - 2) != 0) special.fail("c(n-2,n-2,n-2) != 0");
    }
    suite.checks.push_back(special);

    suite.checks.push_back(verify_sign_property(tab));
    return suite;
}

}  // namespace operstokes
