#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "operstokes/numeric_linalg.hpp"

namespace operstokes {

struct OdeStats {
    long accepted = 0, rejected = 0;
};

// Dormand-Prince 5(4) for y' = f(t, y) with complex state and real time.
// `after_step` may rescale or rotate y after each accepted step (the system
// is linear, so right-multiplying a solution keeps it a solution); it is
// called with the new state and must leave y a valid state.
template <class R>
class Dopri5 {
public:
    using State = CVector<R>;
    using Rhs = std::function<void(R, const State&, State&)>;
    using Hook = std::function<void(State&)>;

    Dopri5(Rhs f, R rtol, long max_steps = 2000000) : f_(std::move(f)), rtol_(rtol), max_steps_(max_steps) {}

    OdeStats integrate(State& y, R t0, R t1, const Hook& after_step = {}) const {
        OdeStats st;
        const std::size_t n = y.size();
        const R span = t1 - t0;
        if (span == 0) return st;
        const R dir = span > 0 ? R(1) : R(-1);
        State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
        R t = t0;
        R h = dir * std::min<R>(abs(span), R(0.01) * abs(span) + R(1e-3));
        f_(t, y, k1);
        R err_prev = 1;
        while (dir * (t1 - t) > 0) {
            if (st.accepted + st.rejected > max_steps_) throw NumericalError("ODE integration exceeded the step budget");
            if (dir * (t + h - t1) > 0) h = t1 - t;
            auto stage = [&](State& out, R c, std::initializer_list<std::pair<const State*, R>> terms) {
                for (std::size_t i = 0; i < n; ++i) {
                    Cx<R> acc = y[i];
                    for (const auto& [k, a] : terms) acc += h * a * (*k)[i];
                    tmp[i] = acc;
                }
                f_(t + c * h, tmp, out);
            };
            stage(k2, R(1) / 5, {{&k1, R(1) / 5}});
            stage(k3, R(3) / 10, {{&k1, R(3) / 40}, {&k2, R(9) / 40}});
            stage(k4, R(4) / 5, {{&k1, R(44) / 45}, {&k2, R(-56) / 15}, {&k3, R(32) / 9}});
            stage(k5, R(8) / 9,
                  {{&k1, R(19372) / 6561}, {&k2, R(-25360) / 2187}, {&k3, R(64448) / 6561}, {&k4, R(-212) / 729}});
            stage(k6, R(1),
                  {{&k1, R(9017) / 3168}, {&k2, R(-355) / 33}, {&k3, R(46732) / 5247}, {&k4, R(49) / 176},
                   {&k5, R(-5103) / 18656}});
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i] + h * (R(35) / 384 * k1[i] + R(500) / 1113 * k3[i] + R(125) / 192 * k4[i] -
                                      R(2187) / 6784 * k5[i] + R(11) / 84 * k6[i]);
            f_(t + h, ynew, k7);
            R ymax = 0;
            for (std::size_t i = 0; i < n; ++i) ymax = std::max<R>(ymax, std::max<R>(abs(y[i]), abs(ynew[i])));
            const R scale = rtol_ * ymax + std::numeric_limits<R>::min();
            R err = 0;
            for (std::size_t i = 0; i < n; ++i) {
                Cx<R> e = h * (R(71) / 57600 * k1[i] - R(71) / 16695 * k3[i] + R(71) / 1920 * k4[i] -
                               R(17253) / 339200 * k5[i] + R(22) / 525 * k6[i] - R(1) / 40 * k7[i]);
                err = std::max<R>(err, abs(e) / scale);
            }
            if (!isfinite_(err)) {
                h /= 4;
                ++st.rejected;
                continue;
            }
            if (err <= 1) {
                t += h;
                y.swap(ynew);
                ++st.accepted;
                if (after_step) {
                    after_step(y);
                    f_(t, y, k1);
                } else {
                    k1.swap(k7);
                }
                // PI controller
                R fac = R(0.9) * pow(std::max<R>(err, R(1e-10)), R(-0.7) / 5) * pow(err_prev, R(0.4) / 5);
                fac = std::min<R>(R(5), std::max<R>(R(0.2), fac));
                h *= fac;
                err_prev = std::max<R>(err, R(1e-4));
            } else {
                ++st.rejected;
                h *= std::max<R>(R(0.2), R(0.9) * pow(err, R(-1) / 5));
            }
            if (abs(h) < abs(span) * std::numeric_limits<R>::epsilon() * 16)
                throw NumericalError("ODE step size underflow");
        }
        return st;
    }

private:
    static bool isfinite_(R x) { return x == x && x < std::numeric_limits<R>::max(); }

    Rhs f_;
    R rtol_;
    long max_steps_;
};

}  // namespace operstokes
