#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"
#include "gauge.hpp"

namespace gmono {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    unsigned max_depth = 30;
};

struct QuadResult {
    double value = 0;
    double error = 0;
};

// Adaptive Gauss-Kronrod on [lo, hi]; infinite ends are mapped by Boost.
inline QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                            const QuadOptions& o = {}) {
    if (lo == hi) return {};
    if (lo > hi) {
        auto r = integrate(f, hi, lo, o);
        return {-r.value, r.error};
    }
    double err = 0, l1 = 0;
    double tol = std::min(o.rel_tol, 1e-6);
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, o.max_depth, tol, &err, &l1);
    if (!std::isfinite(v)) throw QuadratureError("quadrature produced a non-finite value");
    double target = std::max(o.abs_tol, o.rel_tol * l1);
    if (err > 1e4 * target && err > 1e-7 * (1 + l1))
        throw QuadratureError("quadrature did not converge on [" + fmt_num(lo, 6) + ", " + fmt_num(hi, 6) +
                              "], error estimate " + fmt_num(err, 3));
    return {v, err};
}

namespace detail {

struct Divergent {};

// Triangular system v_l' = w_{l+1} v_{l+1}, l = lo..top-1, with v_top = 1.
// state[i] holds v_{lo+i}.
inline std::vector<double> propagate(const GaugeSpec& g, int lo, int top, std::vector<double> state,
                                     double x0, double x1, const QuadOptions& o) {
    namespace ode = boost::numeric::odeint;
    if (x0 == x1 || state.empty()) return state;
    const int n = top - lo;
    auto rhs = [&](const std::vector<double>& v, std::vector<double>& dv, double x) {
        for (int i = 0; i < n; ++i) {
            double next = i + 1 < n ? v[i + 1] : 1.0;
            double w = g.raw(lo + i + 1, x);
            dv[i] = w * next;
            if (!std::isfinite(dv[i])) throw Divergent{};
        }
    };
    double tol_a = o.abs_tol * 1e-3, tol_r = o.rel_tol * 1e-3;
    auto stepper = ode::make_controlled(tol_a, tol_r, ode::runge_kutta_dopri5<std::vector<double>>());
    double h0 = (x1 - x0) * 1e-3;
    size_t steps = 0;
    auto obs = [&](const std::vector<double>&, double) {
        if (++steps > 2000000) throw QuadratureError("chain integration exceeded the step budget");
    };
    ode::integrate_adaptive(stepper, rhs, state, x0, x1, h0, obs);
    for (double v : state)
        if (!std::isfinite(v)) throw Divergent{};
    return state;
}

inline double reference_point(const Interval& I) {
    if (std::isfinite(I.a) && std::isfinite(I.b)) return 0.5 * (I.a + I.b);
    if (std::isfinite(I.a)) return I.a + 1;
    if (std::isfinite(I.b)) return std::min(0.0, I.b - 1);
    return 0.0;
}

enum class Tail { finite, divergent };

struct LadderResult {
    Tail status = Tail::finite;
    std::vector<double> state;  // v_{lo}..v_{top-1} at x
};

// Integrate the chain from the open end a of the interval to x by moving the
// lower cut-off towards a (doubling windows) and watching the tail increments.
inline LadderResult ladder_from_a(const GaugeSpec& g, int lo, int top, double x, const QuadOptions& o) {
    const Interval& I = g.interval();
    const bool minus_inf = !std::isfinite(I.a);
    const int K = 62;
    const double d0 = std::max(1.0, std::abs(x));
    auto cut = [&](int k) {
        return minus_inf ? x - d0 * std::ldexp(1.0, k) : I.a + (x - I.a) * std::ldexp(1.0, -(k + 1));
    };
    LadderResult out;
    out.state.assign(top - lo, 0.0);
    if (top == lo) return out;
    // classify levels from the top down; once one diverges all lower ones do
    for (int level = top - 1; level >= lo; --level) {
        const int sub = top - level;  // states v_level..v_{top-1}
        std::vector<double> V, T, rho;
        std::vector<double> last_state;
        bool decided = false;
        for (int k = 0; k <= K && !decided; ++k) {
            double L = cut(k);
            if (!(L < x) || !I.contains(L) || (k > 0 && L == cut(k - 1))) break;
            std::vector<double> st(sub, 0.0);
            try {
                st = propagate(g, level, top, st, L, x, o);
            } catch (const Divergent&) {
                out.status = Tail::divergent;
                decided = true;
                break;
            }
            last_state = st;
            V.push_back(st[0]);
            size_t m = V.size();
            if (m >= 2) T.push_back(V[m - 1] - V[m - 2]);
            if (T.size() >= 2 && T[T.size() - 2] > 0) rho.push_back(T.back() / T[T.size() - 2]);
            double Vk = V.back();
            if (T.size() >= 2 && T.back() <= 1e-13 * Vk && T[T.size() - 2] <= 1e-11 * Vk) {
                decided = true;
                break;
            }
            if (rho.size() >= 3) {
                double r1 = rho[rho.size() - 1], r2 = rho[rho.size() - 2], r3 = rho[rho.size() - 3];
                if (r1 >= 0.98 && r2 >= 0.98 && r3 >= 0.98 && T.back() > 1e-9 * Vk) {
                    out.status = Tail::divergent;
                    decided = true;
                    break;
                }
                if (r1 <= 0.9 && r2 <= 0.9 && r3 <= 0.9 && std::abs(r1 - r2) <= 0.05) {
                    double tail = T.back() * r1 / (1 - r1);
                    if (tail <= 1e-12 * Vk || k == K) {
                        last_state[0] += tail;
                        decided = true;
                        break;
                    }
                }
            }
        }
        if (out.status == Tail::divergent) {
            for (int l = level; l >= lo; --l) out.state[l - lo] = inf;
            return out;
        }
        if (!decided) {
            if (!rho.empty() && rho.back() <= 0.9 && !last_state.empty()) {
                last_state[0] += T.back() * rho.back() / (1 - rho.back());
            } else if (last_state.empty() || (!T.empty() && T.back() > 1e-9 * V.back())) {
                throw Inconclusive("divergence probe inconclusive for p_{a;" + std::to_string(level) + "," +
                                   std::to_string(top) + "}");
            }
        }
        out.state[level - lo] = last_state[0];
    }
    return out;
}

}  // namespace detail
}  // namespace gmono
