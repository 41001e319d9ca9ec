#pragma once

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cheb_coeffs.hpp"
#include "dual_cone.hpp"
#include "gderiv.hpp"
#include "measures.hpp"
#include "wpoly.hpp"

namespace gmono {

// ---------------------------------------------------------------------------
// Chebyshev-type ratio r(f1, f2) = mu(f1 f2) / (mu(f1) mu(f2)) for the standard
// Cauchy law mu and f in {rho, tau_t}.

struct ChebFn {
    enum Kind { rho, tau } kind = rho;
    double t = 0;  // only for tau

    static ChebFn make_rho() { return {rho, 0}; }
    static ChebFn make_tau(double t) { return {tau, t}; }
    // theta = (arctan t + pi/2) / pi; rho behaves as tau at t = -inf
    double theta() const { return kind == rho ? 0.0 : std::atan(t) / std::numbers::pi + 0.5; }
    double operator()(double x) const {
        constexpr double pi = std::numbers::pi;
        double u = std::atan(x);
        if (kind == rho) return (pi + u) * (pi / 2 + u);
        double d = u - std::atan(t);
        return d > 0 ? (pi + u) * d : 0.0;
    }
    std::string name() const { return kind == rho ? "rho" : "tau(" + fmt_num(t, 6) + ")"; }
};

namespace detail {

// Polynomials in w with coefficients of type T, lowest degree first.
template <class T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> c(a.size() + b.size() - 1, T(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

template <class T>
T poly_integral(const std::vector<T>& p, T lo, T hi) {
    T s(0), plo(lo), phi(hi);
    for (size_t i = 0; i < p.size(); ++i) {
        s += p[i] * (phi - plo) / T(static_cast<long>(i + 1));
        plo *= lo;
        phi *= hi;
    }
    return s;
}

}  // namespace detail

// r for functions (w + 1/2)(w - theta_i)_+ under dw on (0, 1); exact for rational T.
template <class T>
T cheb_ratio_theta(T th1, T th2) {
    using detail::poly_integral;
    using detail::poly_mul;
    const T half = T(1) / T(2);
    auto fac = [&](T th) { return poly_mul<T>({half, T(1)}, {-th, T(1)}); };
    T lo = th1 > th2 ? th1 : th2;
    T num = poly_integral(poly_mul(fac(th1), fac(th2)), lo, T(1));
    T d1 = poly_integral(fac(th1), th1, T(1)), d2 = poly_integral(fac(th2), th2, T(1));
    if (!(d1 > T(0)) || !(d2 > T(0))) throw DomainError("Chebyshev ratio has a zero denominator");
    return num / (d1 * d2);
}

using Rational = boost::rational<long long>;

inline Rational cheb_ratio_exact_rho_rho() { return cheb_ratio_theta<Rational>(Rational(0), Rational(0)); }

// Substitution route: exact polynomial integrals in w.
inline double cheb_ratio(const ChebFn& f1, const ChebFn& f2) { return cheb_ratio_theta(f1.theta(), f2.theta()); }

// Derived rational functions of theta (see tools/derive_cheb.py).
inline double cheb_ratio_rho_tau_formula(double theta) {
    auto ev = [theta](const auto& c) {
        double v = 0;
        for (size_t i = c.size(); i-- > 0;) v = v * theta + c[i];
        return v;
    };
    return ev(cheb_coeffs::rho_tau_num) / ev(cheb_coeffs::rho_tau_den);
}
inline double cheb_ratio_tau_tau_formula(double theta) {
    auto ev = [theta](const auto& c) {
        double v = 0;
        for (size_t i = c.size(); i-- > 0;) v = v * theta + c[i];
        return v;
    };
    return ev(cheb_coeffs::tau_tau_num) / ev(cheb_coeffs::tau_tau_den);
}

// Direct adaptive quadrature over the real line against any measure.
inline double cheb_ratio_quadrature(const RealFn& f1, const RealFn& f2, const MeasureRep& mu,
                                    const std::vector<double>& breaks = {}) {
    QuadOptions o{1e-12, 1e-12, 30};
    auto m = [&](const RealFn& f) {
        if (auto* c = std::get_if<CauchyLaw>(&mu.cont); c && mu.atoms.empty()) {
            // plain Gauss-Kronrod on (-inf, inf) with the Cauchy density, no substitution
            auto g = [&](double x) {
                double z = (x - c->loc) / c->scale;
                return f(x) / (std::numbers::pi * c->scale * (1 + z * z));
            };
            double s = 0, lo = -inf;
            std::vector<double> br = breaks;
            std::sort(br.begin(), br.end());
            for (double b : br) {
                s += integrate(g, lo, b, o).value;
                lo = b;
            }
            return mu.weight * (s + integrate(g, lo, inf, o).value);
        }
        return gmoment(mu, f, breaks, o);
    };
    double d1 = m(f1), d2 = m(f2);
    if (!(d1 > 0) || !(d2 > 0)) throw DomainError("Chebyshev ratio has a nonpositive denominator");
    return m([&](double x) { return f1(x) * f2(x); }) / (d1 * d2);
}

struct ChebScan {
    double min_value = inf;
    std::string argmin;
    bool attained_left = false;        // at rho or at the leftmost tau
    std::vector<double> rho_tau;       // r(rho, tau_t) along the grid
    bool rho_tau_increasing = true;
};

inline ChebScan cheb_minimum_scan(std::vector<double> t_grid) {
    std::sort(t_grid.begin(), t_grid.end());
    std::vector<ChebFn> fs{ChebFn::make_rho()};
    for (double t : t_grid) fs.push_back(ChebFn::make_tau(t));
    ChebScan out;
    size_t best_i = 0, best_j = 0;
    for (size_t i = 0; i < fs.size(); ++i)
        for (size_t j = i; j < fs.size(); ++j) {
            double r = cheb_ratio(fs[i], fs[j]);
            if (r < out.min_value - 1e-15) {
                out.min_value = r;
                best_i = i;
                best_j = j;
            }
        }
    out.argmin = fs[best_i].name() + "," + fs[best_j].name();
    out.attained_left = best_i <= 1 && best_j <= 1;
    for (size_t i = 1; i < fs.size(); ++i) {
        out.rho_tau.push_back(cheb_ratio(fs[0], fs[i]));
        if (out.rho_tau.size() >= 2 && !(out.rho_tau.back() > out.rho_tau[out.rho_tau.size() - 2]))
            out.rho_tau_increasing = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// (Super)martingales with conditionally bounded two-point differences.

struct TwoPointStep {
    double lo, hi;  // C_{i-1} <= X_i <= D_{i-1}; X_i takes only these values
    double p_hi;    // P(X_i = hi | past)
};

struct MartingaleModel {
    enum Mode { supermartingale, martingale } mode = martingale;
    int n = 0;
    double s0 = 0;
    std::vector<double> s;  // half-widths s_i
    std::function<TwoPointStep(int, const std::vector<double>&)> step;

    static MartingaleModel fair_walk(int n) {
        MartingaleModel m;
        m.n = n;
        m.s.assign(n, 1.0);
        m.step = [](int, const std::vector<double>&) { return TwoPointStep{-1, 1, 0.5}; };
        return m;
    }
    double s_total() const {
        double v = 0;
        for (int i = 0; i < n; ++i) v += s[i] * s[i];
        return std::sqrt(v);
    }
    void check_step(int i, const TwoPointStep& st) const {
        double tol = 1e-12 * (1 + std::abs(st.lo) + std::abs(st.hi));
        if (!(st.lo <= st.hi) || !(st.p_hi >= 0 && st.p_hi <= 1))
            throw InputError("step " + std::to_string(i + 1) + " is not a valid two-point law");
        if (st.hi - st.lo > 2 * s[i] + tol)
            throw InputError("step " + std::to_string(i + 1) + " violates D - C <= 2 s_i");
        double mean = st.p_hi * st.hi + (1 - st.p_hi) * st.lo;
        if (mode == martingale ? std::abs(mean) > tol : mean > tol)
            throw InputError("step " + std::to_string(i + 1) + " violates the (super)martingale property");
    }
};

struct MartingaleRow {
    double t = 0;
    double lhs = 0, lhs_se = 0;  // E(S_n - t)_+^5
    double rhs = 0;              // E(sZ - t)_+^5
    double margin = 0;
    bool ok = true;
};

struct MartingaleReport {
    bool exact = true;
    double s = 0;
    double mean = 0, second = 0, mean_se = 0;
    int unresolved = 0;  // Monte Carlo rows within three standard errors of zero
    bool mean_ok = true, second_ok = true;
    std::vector<MartingaleRow> rows;
    std::optional<MeasureRep> law;  // law of S_n when enumerated
    std::vector<std::pair<int, Verdict>> corollary;  // k -> verdict of the dual-cone check
    bool holds = true;
};

// Law of S_n by enumerating all 2^n paths (merged by value).
inline MeasureRep enumerate_paths(const MartingaleModel& m) {
    std::map<double, double> atoms;
    std::vector<double> past;
    std::function<void(int, double, double)> rec = [&](int i, double S, double p) {
        if (p == 0) return;
        if (i == m.n) {
            atoms[S] += p;
            return;
        }
        TwoPointStep st = m.step(i, past);
        m.check_step(i, st);
        for (int side = 0; side < 2; ++side) {
            double x = side ? st.hi : st.lo, q = side ? st.p_hi : 1 - st.p_hi;
            if (st.hi == st.lo && side) break;
            if (st.hi == st.lo) q = 1;
            past.push_back(x);
            rec(i + 1, S + x, p * q);
            past.pop_back();
        }
    };
    rec(0, m.s0, 1.0);
    std::vector<Atom> a;
    for (auto& [x, w] : atoms) a.push_back({x, w});
    return MeasureRep::from_atoms(a);
}

inline MartingaleReport martingale_dominance(const MartingaleModel& m, const std::vector<double>& t_grid,
                                             unsigned seed = 1, long mc_paths = 200000, int power = 5) {
    require(m.n >= 0 && static_cast<int>(m.s.size()) >= m.n, "martingale model needs n half-widths");
    require(m.s0 <= 0, "S_0 must be <= 0");
    for (int i = 0; i < m.n; ++i) require(m.s[i] > 0, "half-widths must be positive");
    MartingaleReport rep;
    rep.s = m.s_total();
    auto normal_side = [&](double t) {
        if (rep.s == 0) return detail::pos_pow(-t, power);
        return partial_moment(MeasureRep::normal(0, rep.s), t, power);
    };
    if (m.n <= 20) {
        MeasureRep law = enumerate_paths(m);
        rep.law = law;
        for (auto& a : law.atoms) {
            rep.mean += a.w * a.x;
            rep.second += a.w * a.x * a.x;
        }
        for (double t : t_grid) {
            MartingaleRow r;
            r.t = t;
            r.lhs = partial_moment(law, t, power);
            r.rhs = normal_side(t);
            r.margin = r.rhs - r.lhs;
            r.ok = r.margin >= -1e-12 * (1 + std::abs(r.rhs));
            rep.rows.push_back(r);
        }
    } else {
        rep.exact = false;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0, 1);
        std::vector<double> sum(t_grid.size(), 0), sq(t_grid.size(), 0);
        std::vector<double> past;
        for (long p = 0; p < mc_paths; ++p) {
            double S = m.s0;
            past.clear();
            for (int i = 0; i < m.n; ++i) {
                TwoPointStep st = m.step(i, past);
                m.check_step(i, st);
                double x = U(rng) < st.p_hi ? st.hi : st.lo;
                past.push_back(x);
                S += x;
            }
            rep.mean += S;
            rep.second += S * S;
            for (size_t j = 0; j < t_grid.size(); ++j) {
                double v = detail::pos_pow(S - t_grid[j], power);
                sum[j] += v;
                sq[j] += v * v;
            }
        }
        rep.mean /= mc_paths;
        rep.second /= mc_paths;
        rep.mean_se = std::sqrt(std::max(0.0, rep.second - rep.mean * rep.mean) / mc_paths);
        for (size_t j = 0; j < t_grid.size(); ++j) {
            MartingaleRow r;
            r.t = t_grid[j];
            r.lhs = sum[j] / mc_paths;
            double var = std::max(0.0, sq[j] / mc_paths - r.lhs * r.lhs);
            r.lhs_se = std::sqrt(var / mc_paths);
            r.rhs = normal_side(r.t);
            r.margin = r.rhs - r.lhs;
            r.ok = r.margin >= -3 * r.lhs_se;  // sampling can only refute, never certify
            if (std::abs(r.margin) <= 3 * r.lhs_se) ++rep.unresolved;
            rep.rows.push_back(r);
        }
    }
    double tol = rep.exact ? 1e-12 : 4 * rep.mean_se;
    rep.mean_ok = m.mode == MartingaleModel::martingale ? std::abs(rep.mean) <= tol : rep.mean <= tol;
    // E S^2 is bounded by s^2 only in the martingale case
    double tol2 = rep.exact ? 1e-12 * (1 + rep.s * rep.s) : 0.05 * (1 + rep.s * rep.s);
    rep.second_ok = m.mode == MartingaleModel::supermartingale || rep.second <= rep.s * rep.s + tol2;
    rep.holds = rep.mean_ok && rep.second_ok;
    for (auto& r : rep.rows) rep.holds = rep.holds && r.ok;
    if (rep.law && rep.s > 0) {
        std::vector<double> grid = t_grid;
        for (int k : {1, 2}) {
            if (k == 2 && m.mode != MartingaleModel::martingale) continue;
            auto d = check_dominance_unit(MeasureRep::normal(0, rep.s), *rep.law, k, power, Interval::real_line(), 0.0,
                                          0.0, grid);
            rep.corollary.emplace_back(k, d.verdict);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Left-tail chain S_n <= Y_1 + ... + Y_n <= (s/m) Pi_{m^2/s} <= m + Z sqrt(s) on F_-^{1:3}.

struct ChainLink {
    std::string name;  // "A <= B"
    DominanceReport report;
    double min_margin = inf;  // min over t of E(t - B)_+^3 - E(t - A)_+^3
};

struct LeftChainReport {
    double m = 0, s = 0;
    std::optional<MeasureRep> sum_law;
    MeasureRep ysum, poisson, normal;
    std::vector<ChainLink> links;
    double poisson_route_gap = 0;  // closed form vs truncated summation
    bool holds = true;
};

inline MeasureRep binomial_law(int n, double p, double scale) {
    std::vector<Atom> a;
    if (p >= 1) return MeasureRep::from_atoms({{n * scale, 1.0}});
    boost::math::binomial_distribution<double> B(n, p);
    for (int k = 0; k <= n; ++k) a.push_back({k * scale, boost::math::pdf(B, k)});
    return MeasureRep::from_atoms(a);
}

// Independent nonnegative two-point X_i in {0, s_i/m_i} with E X_i = m_i, E X_i^2 = s_i.
inline MeasureRep two_point_sum_law(const std::vector<double>& mi, const std::vector<double>& si) {
    std::map<double, double> cur{{0.0, 1.0}};
    for (size_t i = 0; i < mi.size(); ++i) {
        require(mi[i] > 0 && si[i] >= mi[i] * mi[i] * (1 - 1e-12), "need m_i > 0 and s_i >= m_i^2");
        double p = std::min(1.0, mi[i] * mi[i] / si[i]), x = si[i] / mi[i];
        std::map<double, double> nxt;
        for (auto& [v, w] : cur) {
            if (p < 1) nxt[v] += w * (1 - p);
            nxt[v + x] += w * p;
        }
        cur.swap(nxt);
    }
    std::vector<Atom> a;
    for (auto& [x, w] : cur) a.push_back({x, w});
    return MeasureRep::from_atoms(a);
}

inline LeftChainReport left_tail_chain(int n, double m, double s, const std::vector<double>& t_grid,
                                       std::optional<std::pair<std::vector<double>, std::vector<double>>> parts =
                                           std::nullopt,
                                       double tol = 1e-9) {
    require(n >= 1 && m > 0 && s > 0, "left_tail_chain needs n >= 1, m > 0, s > 0");
    const double p = m * m / (n * s);
    // the Bernoulli probability m^2/(ns) must not exceed one
    require(p <= 1 + 1e-12, "need s >= m^2/n so that P(Y_1 = s/m) = m^2/(ns) <= 1");
    LeftChainReport rep{m, s, std::nullopt, binomial_law(n, std::min(p, 1.0), s / m),
                        MeasureRep::poisson(m * m / s, s / m, 0), MeasureRep::normal(m, std::sqrt(s)), {}, 0, true};
    if (parts) {
        auto& [mi, si] = *parts;
        require(static_cast<int>(mi.size()) == n && static_cast<int>(si.size()) == n, "need n values of m_i, s_i");
        double M = 0, S = 0;
        for (int i = 0; i < n; ++i) {
            M += mi[i];
            S += si[i];
        }
        require(M >= m * (1 - 1e-12) && S <= s * (1 + 1e-12), "need sum m_i >= m and sum s_i <= s");
        rep.sum_law = two_point_sum_law(mi, si);
    }
    auto add = [&](const std::string& name, const MeasureRep& lo, const MeasureRep& hi) {
        UnitDominanceOptions opt;
        opt.tol = tol;
        ChainLink L{name, check_dominance_reflected(hi, lo, 1, 3, std::nullopt, m, t_grid, opt), inf};
        for (auto& c : L.report.cond_iii)
            if (std::find(t_grid.begin(), t_grid.end(), c.t) != t_grid.end()) L.min_margin = std::min(L.min_margin, c.gap);
        if (L.report.verdict != Verdict::dominates) rep.holds = false;
        rep.links.push_back(std::move(L));
    };
    if (rep.sum_law) add("S_n <= Ysum", *rep.sum_law, rep.ysum);
    add("Ysum <= Poisson", rep.ysum, rep.poisson);
    add("Poisson <= Normal", rep.poisson, rep.normal);
    for (double t : t_grid)
        for (int q = 0; q <= 3; ++q) {
            double a = left_partial_moment(rep.poisson, t, q, MomentRoute::closed_form);
            double b = left_partial_moment(rep.poisson, t, q, MomentRoute::summation);
            double c = partial_moment(rep.poisson, t, q, MomentRoute::closed_form);
            double d = partial_moment(rep.poisson, t, q, MomentRoute::summation);
            rep.poisson_route_gap = std::max({rep.poisson_route_gap, std::abs(a - b), std::abs(c - d) / (1 + std::abs(d))});
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Compositional differential inequalities E^i f >= 0, i in [k, n+1].

struct DiffIneqSystem {
    bool symbolic = false;
    std::vector<std::string> inequalities;  // one per i in [k, n+1]
    std::vector<std::string> generators;    // extreme elements
    std::string note;
};

namespace detail {

// Laurent polynomial in u: exponent -> coefficient.
using Laurent = std::map<int, double>;

inline void laurent_add(Laurent& a, int e, double c) {
    a[e] += c;
    if (std::abs(a[e]) < 1e-13) a.erase(e);
}

inline std::string deriv_name(int r) {
    if (r == 0) return "f";
    if (r == 1) return "f'";
    if (r == 2) return "f''";
    return "f^{(" + std::to_string(r) + ")}";
}

inline std::string num_str(double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-10) return fmt_num(r, 12);
    return fmt_num(v, 10);
}

inline std::string laurent_str(const Laurent& p, const std::string& var) {
    std::ostringstream os;
    bool first = true;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        auto [e, c] = *it;
        os << (first ? (c < 0 ? "-" : "") : (c < 0 ? "-" : "+"));
        first = false;
        double a = std::abs(c);
        bool unit = std::abs(a - 1) < 1e-12;
        if (e == 0) os << num_str(a);
        else {
            if (!unit) os << num_str(a) << " ";
            os << var << (e != 1 ? "^" + std::to_string(e) : "");
        }
    }
    return first ? "0" : os.str();
}

}  // namespace detail

// Symbolic for log-polynomial gauges (unit, exponential, normal-type tables)
// and power gauges; any other family gets a numeric description only.
inline DiffIneqSystem diffineq_system(const GaugeSpec& g, int k, int n) {
    ConeSpec{g, k, n}.validate();
    DiffIneqSystem out;
    const int top = n + 1;
    bool power = g.kind() == GaugeKind::power;
    std::vector<detail::Laurent> logs;  // polynomial log-gauges
    std::vector<int> pows;              // exponents for power gauges
    bool ok = true;
    for (int j = 0; j <= top && ok; ++j) {
        if (power) {
            double e = g.lambda(j) - 1;
            if (std::abs(e - std::round(e)) > 1e-12) ok = false;
            else pows.push_back(static_cast<int>(std::round(e)));
        } else {
            auto lp = g.log_poly(j);
            if (!lp) ok = false;
            else {
                detail::Laurent L;
                for (size_t d = 0; d < lp->coeff.size(); ++d)
                    if (lp->coeff[d] != 0) L[static_cast<int>(d)] = lp->coeff[d];
                logs.push_back(L);
            }
        }
    }
    std::string var = "x";
    if (power && g.power_base() != 0) var = "(x-" + fmt_num(g.power_base(), 6) + ")";
    if (ok) {
        out.symbolic = true;
        // E^i f = factor * sum_r c_r(u) f^{(r)}, factor = u^alpha exp(L(u)) > 0
        detail::Laurent L;  // log-polynomial part of the factor
        int alpha = 0;
        std::vector<detail::Laurent> c{{{0, 1.0}}};
        auto divide_by = [&](int j) {
            if (power) alpha -= pows[j];
            else
                for (auto [e, v] : logs[j]) detail::laurent_add(L, e, -v);
        };
        divide_by(0);
        for (int i = 1; i <= top; ++i) {
            std::vector<detail::Laurent> nc(c.size() + 1);
            detail::Laurent dL;  // L'
            for (auto [e, v] : L)
                if (e != 0) detail::laurent_add(dL, e - 1, e * v);
            for (size_t r = 0; r < c.size(); ++r)
                for (auto [e, v] : c[r]) {
                    if (e != 0) detail::laurent_add(nc[r], e - 1, e * v);        // c'
                    if (alpha != 0) detail::laurent_add(nc[r], e - 1, alpha * v);  // alpha/u c
                    for (auto [e2, v2] : dL) detail::laurent_add(nc[r], e + e2, v * v2);
                    detail::laurent_add(nc[r + 1], e, v);  // c f^{(r+1)}
                }
            c = nc;
            divide_by(i);
            if (i < k) continue;
            int lowest = 0;
            for (auto& cr : c)
                for (auto& kv : cr) lowest = std::min(lowest, kv.first);
            std::ostringstream os;
            bool first = true;
            for (size_t r = c.size(); r-- > 0;) {
                if (c[r].empty()) continue;
                detail::Laurent cr;
                for (auto [e, v] : c[r]) cr[e - lowest] = v;  // clear negative powers, u > 0
                std::string cs = detail::laurent_str(cr, var);
                bool is_const = cr.size() == 1 && cr.begin()->first == 0;
                if (is_const) {
                    double v = cr.begin()->second;
                    std::string mag = std::abs(std::abs(v) - 1) < 1e-12 ? "" : detail::num_str(std::abs(v)) + " ";
                    os << (first ? (v < 0 ? "-" : "") : (v < 0 ? "-" : "+")) << mag << detail::deriv_name(r);
                } else if (cr.size() == 1) {
                    os << (first ? "" : (cr.begin()->second < 0 ? "" : "+")) << cs << " " << detail::deriv_name(r);
                } else {
                    os << (first ? "" : "+") << "(" << cs << ") " << detail::deriv_name(r);
                }
                first = false;
            }
            out.inequalities.push_back((first ? "0" : os.str()) + "\\ge0");
        }
    } else {
        out.note = "no closed-form coefficients for gauges " + g.describe() + "; evaluate E^i f numerically";
        for (int i = k; i <= top; ++i)
            out.inequalities.push_back("E^" + std::to_string(i) + " f\\ge0 (numeric)");
    }
    // extreme elements
    const Interval& I = g.interval();
    double s = default_center(I);
    for (int i = 0; i < k; ++i) {
        auto p = WPoly::chain_t(g, s, 0, i);
        out.generators.push_back(p.describe() + " = " + p.closed_form_string().value_or("(numeric)") +
                                 "  [any real coefficient]");
    }
    auto fin = finiteness_set(g, n);
    for (int j : fin.row(k, n)) {
        auto p = WPoly::chain_az(g, s, 0, k, j);
        out.generators.push_back(p.describe() + " = " + p.closed_form_string().value_or("(numeric)") +
                                 "  [nonnegative coefficient]");
    }
    if (g.kind() == GaugeKind::exponential || g.kind() == GaugeKind::unit) {
        // p_{t;0,n}(x) = e^{c t} p_{0;0,n}(x - t) with c = lambda_0 + ... + lambda_n
        double c = 0;
        for (int j = 0; j <= n; ++j) c += g.lambda(j);
        auto p = WPoly::chain_t(GaugeSpec::exponential(g.kind() == GaugeKind::unit ? std::vector<double>{}
                                                                                     : g.params()),
                                0.0, 0, n);
        std::string body = p.closed_form_string("(x-t)").value_or("(numeric)");
        std::string fac = c == 0 ? "" : "exp(" + detail::num_str(c) + "*t)*";
        out.generators.push_back("p+_{t;0," + std::to_string(n) + "} = " + fac + "[" + body +
                                 "] 1{x>=t}  [nonnegative mixtures over t]");
    } else {
        out.generators.push_back("p+_{t;0," + std::to_string(n) + "}, t in I  [nonnegative mixtures over t]");
    }
    return out;
}

// Values of E^i f(x) for i in [k, n+1]; works for any gauges.
inline std::vector<double> evaluate_system(const FunctionRep& f, const GaugeSpec& g, int k, int n, double x) {
    std::vector<double> v;
    for (int i = k; i <= n + 1; ++i) v.push_back(gauged_derivative(f, g, i, x));
    return v;
}

}  // namespace gmono
