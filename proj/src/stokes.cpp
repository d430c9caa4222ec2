#include "operstokes/stokes.hpp"

#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <exception>
#include <map>
#include <numeric>
#include <set>

#include "operstokes/ode.hpp"

namespace operstokes {

namespace {

template <class R>
R to_real(const BigRational& q) {
    return R(q.get_num().get_si()) / R(q.get_den().get_si());
}

template <class R>
R angle_of(const BigRational& q) {
    return to_real<R>(q) * pi_v<R>();
}

// Units of pi/(2n(k+1)): every anti-Stokes direction and Stokes line is an integer.
long unit_den(int n, int k) { return 2L * n * (k + 1); }
long period(int n, int k) { return 4L * n * (k + 1); }

long mod(long a, long m) { return ((a % m) + m) % m; }

BigRational floor_q(const BigRational& q) {
    BigInteger f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return BigRational(f);
}

std::map<long, std::vector<std::pair<int, int>>> anti_stokes_units(int n, int k) {
    std::map<long, std::vector<std::pair<int, int>>> out;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            for (int m = 0; m <= k; ++m) {
                long N = n - 2L * (a + b) - (a < b ? 2L * n : 0) + 4L * n * m;
                out[mod(N, period(n, k))].emplace_back(a, b);
            }
        }
    return out;
}

std::set<long> stokes_units(int n, int k) {
    std::set<long> out;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (long m = 0; m < 2L * (k + 1); ++m) out.insert(mod(-2L * (a + b) + 2L * n * m, period(n, k)));
    return out;
}

}  // namespace

BigRational canonical_v0(int n, int k) { return make_rational(1, 4L * n * (k + 1)); }

BigRational SectorLayout::d(long i) const {
    long idx = mod(i - 1, r);
    long wraps = (i - 1 - idx) / r;
    return directions[static_cast<std::size_t>(idx)].angle + BigRational(2 * wraps);
}

const Direction& SectorLayout::direction(long i) const { return directions[static_cast<std::size_t>(mod(i - 1, r))]; }

std::pair<BigRational, BigRational> SectorLayout::sector(long i) const { return {d(i), d(i + 1)}; }

std::pair<BigRational, BigRational> SectorLayout::supersector(long i) const {
    BigRational w = make_rational(1, 2L * (k + 1));
    return {d(i) - w, d(i + 1) + w};
}

SectorLayout sector_layout(int n, int k, const std::optional<BigRational>& v0opt) {
    if (n < 2 || k < 1) throw std::invalid_argument("sector layout needs n >= 2 and k >= 1");
    SectorLayout lay;
    lay.n = n;
    lay.k = k;
    lay.v0 = v0opt ? *v0opt : canonical_v0(n, k);
    const long ud = unit_den(n, k), per = period(n, k);
    const auto dirs = anti_stokes_units(n, k);

    BigRational v0u = lay.v0 * ud;
    if (v0u.get_den() == 1 && dirs.count(mod(v0u.get_num().get_si(), per)))
        throw std::invalid_argument("base direction " + to_fraction_string(lay.v0) +
                                    " pi lies on an anti-Stokes direction");
    for (const auto& [N, pairs] : dirs) {
        BigRational ang(N, ud);
        ang.canonicalize();
        // representative in (v0, v0 + 2)
        ang += BigRational(2) * floor_q((lay.v0 - ang) / 2 + 1);
        if (ang <= lay.v0) ang += 2;
        if (ang >= lay.v0 + 2) ang -= 2;
        lay.directions.push_back({ang, pairs});
    }
    std::sort(lay.directions.begin(), lay.directions.end(),
              [](const Direction& x, const Direction& y) { return x.angle < y.angle; });
    lay.r = static_cast<int>(lay.directions.size());
    if (lay.r % (2 * (k + 1)) != 0) throw std::logic_error("direction count not divisible by 2(k+1)");
    lay.ell = lay.r / (2 * (k + 1));
    return lay;
}

std::vector<BigRational> stokes_lines(int n, int k) {
    std::vector<BigRational> out;
    for (long N : stokes_units(n, k)) {
        BigRational q(N, unit_den(n, k));
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

template <class R>
GaugedConnection<R> gauge_transform(const ComplexOper<R>& op) {
    op.require_multiple();
    using C = Cx<R>;
    GaugedConnection<R> gc;
    const int n = op.n, d = op.d, k = op.k();
    gc.n = n;
    gc.k = k;
    gc.d = d;
    const auto un = static_cast<std::size_t>(n);
    gc.B.assign(static_cast<std::size_t>(d) + 1, CMatrix<R>(un, un));
    for (int a = 0; a + 1 < n; ++a) gc.B[0](a, a + 1) = C(1);
    gc.B[0](un - 1, 0) = C(1);
    for (int m = 1; m <= d; ++m) {
        int s = d - m;
        if (s <= d - 2) gc.B[static_cast<std::size_t>(m)](un - 1, 0) += op.coeffs[static_cast<std::size_t>(s)];
    }
    for (int a = 0; a < n; ++a) gc.B[static_cast<std::size_t>(k + 1)](a, a) += C(R((n - 1 - a) * k));
    gc.kappa = R(k * (n - 1)) / 2;

    const R tau = 2 * pi_v<R>();
    gc.f0 = CMatrix<R>(un, un);
    gc.f0_inv = CMatrix<R>(un, un);
    for (int j = 0; j < n; ++j) {
        gc.lambda.push_back(std::polar(R(1), tau * R(j) / R(n)));
        for (int r = 0; r < n; ++r) {
            C w = std::polar(R(1), tau * R((j * r) % n) / R(n));
            gc.f0(r, j) = w;
            gc.f0_inv(j, r) = conj(w) / R(n);
        }
    }
    for (int j = 0; j <= d; ++j) {
        CMatrix<R> b = gc.B[static_cast<std::size_t>(j)];
        if (j == k + 1)
            for (int a = 0; a < n; ++a) b(a, a) -= C(gc.kappa);
        gc.Aprime.push_back(gc.f0_inv * b * gc.f0);
    }
    return gc;
}

template <class R>
FormalSolution<R> formal_solution(const GaugedConnection<R>& gc, int M) {
    using C = Cx<R>;
    const int n = gc.n, k = gc.k;
    if (M < k + 2) throw std::invalid_argument("truncation order must be at least k+2");
    const auto un = static_cast<std::size_t>(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (abs(gc.lambda[a] - gc.lambda[b]) < 100 * std::numeric_limits<R>::epsilon())
                throw NumericalError("leading eigenvalues collide");
    const int S = M + k + 1;
    auto ap = [&](int j) -> const CMatrix<R>* {
        return j <= gc.d ? &gc.Aprime[static_cast<std::size_t>(j)] : nullptr;
    };
    std::vector<CMatrix<R>> T{CMatrix<R>::identity(un)};
    std::vector<std::vector<C>> D{std::vector<C>(un)};
    for (int a = 0; a < n; ++a) D[0][a] = gc.Aprime[0](a, a);
    for (int s = 1; s <= S; ++s) {
        CMatrix<R> Rs = ap(s) ? *ap(s) : CMatrix<R>(un, un);
        for (int j = 1; j < s; ++j) {
            const CMatrix<R>& t = T[static_cast<std::size_t>(s - j)];
            if (ap(j)) Rs += *ap(j) * t;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) Rs(a, b) -= t(a, b) * D[static_cast<std::size_t>(j)][b];
        }
        if (s - k - 1 >= 1) Rs += R(s - k - 1) * T[static_cast<std::size_t>(s - k - 1)];
        std::vector<C> ds(un);
        CMatrix<R> ts(un, un);
        for (int a = 0; a < n; ++a) {
            ds[a] = Rs(a, a);
            for (int b = 0; b < n; ++b)
                if (a != b) ts(a, b) = -Rs(a, b) / (gc.lambda[a] - gc.lambda[b]);
        }
        T.push_back(std::move(ts));
        D.push_back(std::move(ds));
    }

    FormalSolution<R> fs;
    fs.n = n;
    fs.k = k;
    fs.M = M;
    fs.kappa = gc.kappa;
    fs.q.assign(static_cast<std::size_t>(k) + 2, std::vector<C>(un));
    for (int p = 1; p <= k + 1; ++p)
        for (int a = 0; a < n; ++a) fs.q[p][a] = D[static_cast<std::size_t>(k + 1 - p)][a] / R(p);
    fs.Lambda = D[static_cast<std::size_t>(k + 1)];

    // E = exp(-sum_m D_{k+1+m} z^{-m} / m), coefficientwise on the diagonal
    std::vector<std::vector<C>> e(static_cast<std::size_t>(M) + 1, std::vector<C>(un)),
        E(static_cast<std::size_t>(M) + 1, std::vector<C>(un));
    for (int m = 1; m <= M; ++m)
        for (int a = 0; a < n; ++a) e[m][a] = -D[static_cast<std::size_t>(k + 1 + m)][a] / R(m);
    for (int a = 0; a < n; ++a) E[0][a] = C(1);
    for (int m = 1; m <= M; ++m)
        for (int a = 0; a < n; ++a) {
            C acc(0);
            for (int j = 1; j <= m; ++j) acc += R(j) * e[j][a] * E[m - j][a];
            E[m][a] = acc / R(m);
        }
    for (int m = 0; m <= M; ++m) {
        CMatrix<R> y(un, un);
        for (int j = 0; j <= m; ++j) {
            const CMatrix<R>& t = T[static_cast<std::size_t>(m - j)];
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) y(a, b) += t(a, b) * E[j][b];
        }
        fs.Y.push_back(std::move(y));
    }
    return fs;
}

template <class R>
Cx<R> FormalSolution<R>::q_at(int a, Cx<R> z) const {
    Cx<R> acc(0);
    for (int p = k + 1; p >= 1; --p) acc = (acc + q[p][a]) * z;
    return acc;
}

template <class R>
CMatrix<R> FormalSolution<R>::yhat_at(Cx<R> z) const {
    const Cx<R> w = Cx<R>(1) / z;
    CMatrix<R> acc = Y[static_cast<std::size_t>(M)];
    for (int m = M - 1; m >= 0; --m) acc = acc * w + Y[static_cast<std::size_t>(m)];
    return acc;
}

template <class R>
R formal_residual(const GaugedConnection<R>& gc, const FormalSolution<R>& fs, Cx<R> z) {
    using C = Cx<R>;
    const auto un = static_cast<std::size_t>(gc.n);
    CMatrix<R> yh = fs.yhat_at(z), dy(un, un), a(un, un);
    for (int m = 1; m <= fs.M; ++m) dy += (-R(m) * pow(z, -m - 1)) * fs.Y[static_cast<std::size_t>(m)];
    for (int j = 0; j <= gc.d; ++j) a += pow(z, gc.k - j) * gc.Aprime[static_cast<std::size_t>(j)];
    CMatrix<R> res = dy - a * yh;
    for (int b = 0; b < gc.n; ++b) {
        C qp(0);
        for (int p = 1; p <= gc.k + 1; ++p) qp += R(p) * fs.q[p][b] * pow(z, p - 1);
        qp += fs.Lambda[b] / z;
        for (std::size_t r = 0; r < un; ++r) res(r, b) += yh(r, b) * qp;
    }
    return max_abs(res);
}

namespace {

template <class R>
struct Pipeline {
    using C = Cx<R>;
    const ComplexOper<R>& op;
    const GaugedConnection<R>& gc;
    const FormalSolution<R>& fs;
    R radius;
    R rtol;

    int n() const { return gc.n; }

    C p_at(C z) const {
        C acc(1);
        for (int s = op.d - 1; s >= 0; --s) acc = acc * z + (s <= op.d - 2 ? op.coeffs[s] : C(0));
        return acc;
    }

    // y' = A y along z = t e^{i theta}, for `cols` stacked column vectors.
    typename Dopri5<R>::Rhs ray_rhs(R theta, std::size_t cols) const {
        const C dir = std::polar(R(1), theta);
        const std::size_t nn = static_cast<std::size_t>(n());
        return [this, dir, cols, nn](R t, const CVector<R>& y, CVector<R>& dy) {
            const C pz = p_at(dir * t);
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t o = c * nn;
                for (std::size_t r = 0; r + 1 < nn; ++r) dy[o + r] = dir * y[o + r + 1];
                dy[o + nn - 1] = dir * pz * y[o];
            }
        };
    }

    // g^{-1} f0 Yhat(z): asymptotic solution without the scalar exponential factors.
    CMatrix<R> seed(C z) const {
        CMatrix<R> f = gc.f0 * fs.yhat_at(z);
        for (int a = 0; a < n(); ++a) {
            C s = pow(z, -(n() - 1 - a) * gc.k);
            for (int b = 0; b < n(); ++b) f(a, b) *= s;
        }
        return f;
    }

    R growth(int a, R theta) const { return real(gc.lambda[a] * std::polar(R(1), R(gc.k + 1) * theta)); }

    std::vector<int> order(R theta) const {
        std::vector<int> o(n());
        std::iota(o.begin(), o.end(), 0);
        std::sort(o.begin(), o.end(), [&](int x, int y) { return growth(x, theta) < growth(y, theta); });
        return o;
    }

    R gap(int b, R theta) const {
        R g = std::numeric_limits<R>::max();
        for (int a = 0; a < n(); ++a)
            if (a != b) g = std::min<R>(g, abs(growth(a, theta) - growth(b, theta)));
        return g;
    }

    C log_factor(int b, C z, R theta_chain) const {
        return fs.q_at(b, z) + (R(gc.kappa) + fs.Lambda[b]) * C(log(radius), theta_chain);
    }

    struct Flag {
        std::vector<int> order;
        CMatrix<R> q;
        long steps = 0;
    };

    // Integrate the recessive-first seed basis inward to the origin.
    Flag flag(R theta) const {
        const std::size_t nn = static_cast<std::size_t>(n());
        Flag out;
        out.order = order(theta);
        CMatrix<R> f = seed(std::polar(radius, theta)), y(nn, nn);
        for (std::size_t j = 0; j < nn; ++j)
            for (std::size_t r = 0; r < nn; ++r) y(r, j) = f(r, out.order[j]);
        orthonormalize_columns(y);
        CVector<R> state(nn * nn);
        auto pack = [&](const CMatrix<R>& m, CVector<R>& s) {
            for (std::size_t j = 0; j < nn; ++j)
                for (std::size_t r = 0; r < nn; ++r) s[j * nn + r] = m(r, j);
        };
        auto unpack = [&](const CVector<R>& s, CMatrix<R>& m) {
            for (std::size_t j = 0; j < nn; ++j)
                for (std::size_t r = 0; r < nn; ++r) m(r, j) = s[j * nn + r];
        };
        pack(y, state);
        Dopri5<R> ode(ray_rhs(theta, nn), rtol);
        auto st = ode.integrate(state, radius, R(0), [&](CVector<R>& s) {
            CMatrix<R> m(nn, nn);
            unpack(s, m);
            orthonormalize_columns(m);
            pack(m, s);
        });
        out.steps = st.accepted + st.rejected;
        out.q = CMatrix<R>(nn, nn);
        unpack(state, out.q);
        return out;
    }

    // Vector ODE along a ray with running log-scale; returns (unit vector, log scale).
    std::pair<CVector<R>, C> transport(R theta, CVector<R> u, C logscale, R t0, R t1, long& steps) const {
        R nrm = norm2(u);
        for (auto& x : u) x /= nrm;
        logscale += C(log(nrm));
        Dopri5<R> ode(ray_rhs(theta, 1), rtol);
        auto st = ode.integrate(u, t0, t1, [&](CVector<R>& s) {
            R m = norm2(s);
            for (auto& x : s) x /= m;
            logscale += C(log(m));
        });
        steps += st.accepted + st.rejected;
        return {u, logscale};
    }
};

template <class R>
struct SectorPlan {
    long index = 0;
    std::vector<BigRational> samples;  // chain angles (multiples of pi)
    std::vector<std::size_t> flag_ids;
};

// Critical angles (Stokes and anti-Stokes) in [lo, hi].
std::vector<BigRational> critical_between(int n, int k, const BigRational& lo, const BigRational& hi) {
    const long ud = unit_den(n, k), per = period(n, k);
    auto as = anti_stokes_units(n, k);
    auto sl = stokes_units(n, k);
    BigRational l = lo * ud, h = hi * ud;
    long a = floor_q(l).get_num().get_si(), b = floor_q(h).get_num().get_si() + 1;
    std::vector<BigRational> out;
    for (long N = a; N <= b; ++N) {
        BigRational q(N, ud);
        q.canonicalize();
        if (q < lo || q > hi) continue;
        long m = mod(N, per);
        if (as.count(m) || sl.count(m)) out.push_back(q);
    }
    return out;
}

template <class T, class F>
void run_jobs(std::size_t count, Execution exec, F&& body) {
    std::vector<std::exception_ptr> errs(count);
    const long nj = static_cast<long>(count);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long j = 0; j < nj; ++j) {
            try {
                body(static_cast<std::size_t>(j));
            } catch (...) {
                errs[static_cast<std::size_t>(j)] = std::current_exception();
            }
        }
    } else {
        for (long j = 0; j < nj; ++j) {
            try {
                body(static_cast<std::size_t>(j));
            } catch (...) {
                errs[static_cast<std::size_t>(j)] = std::current_exception();
            }
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace

template <class R>
CMatrix<R> StokesData<R>::permuted(int i) const {
    const CMatrix<R>& s = matrices.at(static_cast<std::size_t>(i - 1));
    const std::size_t n = s.rows();
    CMatrix<R> out(n, n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) out(x, y) = s(permutation[x], permutation[y]);
    return out;
}

template <class R>
std::vector<Cx<R>> StokesData<R>::monitored() const {
    std::vector<Cx<R>> out;
    for (int i = 1; i <= static_cast<int>(matrices.size()); ++i) {
        CMatrix<R> m = permuted(i);
        for (std::size_t x = 0; x < m.rows(); ++x)
            for (std::size_t y = 0; y < m.cols(); ++y)
                if ((i % 2 == 1 && x < y) || (i % 2 == 0 && x > y)) out.push_back(m(x, y));
    }
    return out;
}

template <class R>
StokesData<R> monodromy_map(const ComplexOper<R>& op, const StokesSettings& s) {
    using C = Cx<R>;
    op.require_multiple();
    const int n = op.n, k = op.k();
    const auto un = static_cast<std::size_t>(n);
    StokesData<R> out;
    auto gc = gauge_transform(op);
    if (!s.framing.empty()) {
        if (s.framing.size() != un) throw std::invalid_argument("framing rescale needs n entries");
        for (std::size_t a = 0; a < un; ++a) {
            C f(R(s.framing[a].real()), R(s.framing[a].imag()));
            for (std::size_t x = 0; x < un; ++x) {
                gc.f0(x, a) *= f;
                gc.f0_inv(a, x) /= f;
                for (auto& m : gc.Aprime) {
                    m(a, x) /= f;
                    m(x, a) *= f;
                }
            }
        }
    }
    out.formal = formal_solution(gc, s.trunc_order);
    const auto& fs = out.formal;

    // truncation test on the last k+2 retained terms (some vanish by symmetry)
    const int M = fs.M;
    R radius = s.radius > 0 ? R(s.radius) : R(1);
    if (!(s.radius > 0))
        for (int m = std::max(1, M - k - 1); m <= M; ++m) {
            R ym = max_abs(fs.Y[static_cast<std::size_t>(m)]);
            if (ym > 0) radius = std::max<R>(radius, pow(ym / R(s.radius_tol), R(1) / R(m)));
        }
    out.radius = radius;
    for (int m = std::max(1, M - k - 1); m <= M; ++m)
        out.residuals.asymptotic =
            std::max<R>(out.residuals.asymptotic, max_abs(fs.Y[static_cast<std::size_t>(m)]) * pow(radius, -R(m)));

    out.layout = sector_layout(n, k, s.v0);
    const auto& lay = out.layout;
    const int r = lay.r;
    Pipeline<R> pl{op, gc, fs, radius, R(s.ode_tol)};

    // sample directions per sector; Sect_0 uses off-centre samples so that
    // Phi_0 and Phi_r are computed from different rays
    std::vector<SectorPlan<R>> plans(static_cast<std::size_t>(r) + 1);
    std::map<BigRational, std::size_t> flag_index;
    std::vector<BigRational> flag_angles;
    for (long i = 0; i <= r; ++i) {
        auto& plan = plans[static_cast<std::size_t>(i)];
        plan.index = i;
        auto [lo, hi] = lay.supersector(i);
        auto crit = critical_between(n, k, lo, hi);
        BigRational frac = i == 0 ? make_rational(1, 3) : make_rational(1, 2);
        for (std::size_t j = 0; j + 1 < crit.size(); ++j) {
            BigRational th = crit[j] + frac * (crit[j + 1] - crit[j]);
            plan.samples.push_back(th);
            BigRational key = th - BigRational(2) * floor_q(th / 2);
            auto it = flag_index.find(key);
            if (it == flag_index.end()) {
                it = flag_index.emplace(key, flag_angles.size()).first;
                flag_angles.push_back(key);
            }
            plan.flag_ids.push_back(it->second);
        }
    }

    std::vector<typename Pipeline<R>::Flag> flags(flag_angles.size());
    run_jobs<void>(flags.size(), s.exec, [&](std::size_t j) { flags[j] = pl.flag(angle_of<R>(flag_angles[j])); });
    for (const auto& f : flags) out.ode_steps += f.steps;

    // lines: intersection of the recessive subspaces over the supersector
    std::vector<CMatrix<R>> lines(static_cast<std::size_t>(r) + 1, CMatrix<R>(un, un));
    std::vector<R> flag_res(static_cast<std::size_t>(r) + 1, R(0));
    run_jobs<void>(lines.size(), s.exec, [&](std::size_t i) {
        const auto& plan = plans[i];
        for (int b = 0; b < n; ++b) {
            CMatrix<R> h(un, un);
            for (std::size_t sidx = 0; sidx < plan.samples.size(); ++sidx) {
                const auto& f = flags[plan.flag_ids[sidx]];
                std::size_t pos = std::find(f.order.begin(), f.order.end(), b) - f.order.begin();
                for (std::size_t c = pos + 1; c < un; ++c)
                    for (std::size_t x = 0; x < un; ++x)
                        for (std::size_t y = 0; y < un; ++y) h(x, y) += f.q(x, c) * conj(f.q(y, c));
            }
            auto eig = hermitian_eigen(h);
            if (!(eig.values[1] > R(1e-6)))
                throw NumericalError("recessive subspaces do not pin down a unique solution in sector " +
                                     std::to_string(i));
            flag_res[i] = std::max<R>(flag_res[i], sqrt(std::max<R>(eig.values[0], R(0))));
            for (std::size_t x = 0; x < un; ++x) lines[i](x, b) = eig.vectors(x, 0);
        }
    });
    for (auto f : flag_res) out.residuals.flag = std::max(out.residuals.flag, f);

    // scales: seed with the true normalization where b is most recessive,
    // otherwise transport the line outward where b is most dominant
    std::vector<C> scales(static_cast<std::size_t>(r + 1) * un);
    std::vector<long> scale_steps(scales.size(), 0);
    run_jobs<void>(scales.size(), s.exec, [&](std::size_t job) {
        const std::size_t i = job / un;
        const int b = static_cast<int>(job % un);
        const auto& plan = plans[i];
        int best_rec = -1, best_dom = -1;
        R gr = -1, gd = -1;
        for (std::size_t sidx = 0; sidx < plan.samples.size(); ++sidx) {
            R th = angle_of<R>(plan.samples[sidx]);
            auto o = pl.order(th);
            R g = pl.gap(b, th);
            if (o.front() == b && g > gr) {
                gr = g;
                best_rec = static_cast<int>(sidx);
            }
            if (o.back() == b && g > gd) {
                gd = g;
                best_dom = static_cast<int>(sidx);
            }
        }
        CVector<R> line(un);
        for (std::size_t x = 0; x < un; ++x) line[x] = lines[i](x, b);
        long& steps = scale_steps[job];
        if (best_rec >= 0) {
            R th = angle_of<R>(plan.samples[static_cast<std::size_t>(best_rec)]);
            C z = std::polar(radius, th);
            CMatrix<R> f = pl.seed(z);
            CVector<R> col(un);
            for (std::size_t x = 0; x < un; ++x) col[x] = f(x, b);
            auto [u, L] = pl.transport(th, col, pl.log_factor(b, z, th), radius, R(0), steps);
            C coef = LU<R>(lines[i]).solve(u)[b];
            scales[job] = exp(L + log(coef));
        } else if (best_dom >= 0) {
            R th = angle_of<R>(plan.samples[static_cast<std::size_t>(best_dom)]);
            C z = std::polar(radius, th);
            auto [u, L] = pl.transport(th, line, C(0), R(0), radius, steps);
            C beta = LU<R>(pl.seed(z)).solve(u)[b];
            scales[job] = exp(pl.log_factor(b, z, th) - L - log(beta));
        } else {
            throw NumericalError("column " + std::to_string(b) + " is never extremal in supersector " +
                                 std::to_string(i));
        }
    });
    for (auto st : scale_steps) out.ode_steps += st;

    for (std::size_t i = 0; i <= static_cast<std::size_t>(r); ++i) {
        CMatrix<R> c = lines[i];
        for (std::size_t b = 0; b < un; ++b)
            for (std::size_t x = 0; x < un; ++x) c(x, b) *= scales[i * un + b];
        out.canonical.push_back(std::move(c));
    }

    // Phi_{i-1} = Phi_i K_i
    for (int i = 1; i <= r; ++i)
        out.factors.push_back(LU<R>(out.canonical[static_cast<std::size_t>(i)])
                                  .solve(out.canonical[static_cast<std::size_t>(i - 1)]));
    for (int i = 1; i <= r; ++i) {
        const auto& kf = out.factors[static_cast<std::size_t>(i - 1)];
        const auto& pairs = lay.direction(i).pairs;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                bool allowed = std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) != pairs.end();
                R dev = a == b ? abs(kf(a, b) - C(1)) : (allowed ? R(0) : abs(kf(a, b)));
                out.residuals.support = std::max(out.residuals.support, dev);
            }
    }
    const int ell = lay.ell;
    for (int i = 1; i <= 2 * (k + 1); ++i) {
        CMatrix<R> prod = CMatrix<R>::identity(un);
        for (int j = (i - 1) * ell + 1; j <= i * ell; ++j) prod = out.factors[static_cast<std::size_t>(j - 1)] * prod;
        out.matrices.push_back(std::move(prod));
    }

    // permutation from the dominance order midway through the first group
    R th_ref = angle_of<R>((lay.d(1) + lay.d(ell)) / 2);
    out.permutation = pl.order(th_ref);
    std::vector<int> pos(un);
    for (int x = 0; x < n; ++x) pos[out.permutation[x]] = x;
    for (int j = 1; j <= ell; ++j)
        for (auto [a, b] : lay.direction(j).pairs)
            if (pos[a] > pos[b]) throw std::logic_error("dominance order contradicts the Stokes pair graph");

    for (int i = 1; i <= 2 * (k + 1); ++i) {
        CMatrix<R> m = out.permuted(i);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                R dev = 0;
                if (x == y) dev = abs(m(x, y) - C(1));
                else if ((i % 2 == 1 && x > y) || (i % 2 == 0 && x < y)) dev = abs(m(x, y));
                out.residuals.unipotency = std::max(out.residuals.unipotency, dev);
            }
    }

    CMatrix<R> total = CMatrix<R>::identity(un);
    for (const auto& sm : out.matrices) total = sm * total;
    for (int b = 0; b < n; ++b) {
        C tw = exp(C(0, 2 * pi_v<R>()) * (C(gc.kappa) + fs.Lambda[b]));
        for (int x = 0; x < n; ++x) total(x, b) *= tw;
    }
    out.residuals.identity = max_abs(total - CMatrix<R>::identity(un));
    C tr(0);
    for (const auto& l : fs.Lambda) tr += l;
    out.residuals.trace = abs(tr);
    return out;
}

#define OPERSTOKES_INSTANTIATE(R)                                                                        \
    template GaugedConnection<R> gauge_transform<R>(const ComplexOper<R>&);                               \
    template FormalSolution<R> formal_solution<R>(const GaugedConnection<R>&, int);                       \
    template R formal_residual<R>(const GaugedConnection<R>&, const FormalSolution<R>&, Cx<R>);          \
    template struct FormalSolution<R>;                                                                    \
    template struct StokesData<R>;                                                                        \
    template StokesData<R> monodromy_map<R>(const ComplexOper<R>&, const StokesSettings&);

OPERSTOKES_INSTANTIATE(double)
OPERSTOKES_INSTANTIATE(long double)
OPERSTOKES_INSTANTIATE(boost::multiprecision::float128)

}  // namespace operstokes
