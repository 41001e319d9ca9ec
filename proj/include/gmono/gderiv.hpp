#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "gauge.hpp"
#include "jet.hpp"
#include "measures.hpp"
#include "wpoly.hpp"

namespace gmono {

using RealFn = std::function<double(double)>;

// A function on an interval plus whatever derivative information is known.
// `ordinary[r]` is the r-th ordinary derivative; `gauged[r]` the r-th gauged
// derivative with respect to the gauges it will be used with.
struct FunctionRep {
    std::string name;
    Interval interval = Interval::real_line();
    SmoothFn f;
    std::vector<RealFn> ordinary;
    std::vector<RealFn> gauged;
    std::vector<double> kinks;
    std::optional<MeasureRep> dfn;  // Stieltjes measure d f^{(n)}
    RealFn fn_at;                   // f^{(n)} itself, when known

    double operator()(double x) const { return f(x); }

    static FunctionRep smooth(std::string name, SmoothFn fn, Interval I = Interval::real_line()) {
        FunctionRep r;
        r.name = std::move(name);
        r.interval = I;
        r.f = std::move(fn);
        return r;
    }
    template <class F>
    static FunctionRep generic(std::string name, F fn, Interval I = Interval::real_line()) {
        return smooth(name, SmoothFn::generic(name, fn), I);
    }
    // gauged derivatives past the top order vanish; `upto` pads the list with zeros
    static FunctionRep from_wpoly(const WPoly& p, int upto = -1) {
        FunctionRep r;
        r.name = p.describe();
        r.interval = p.gauge().interval();
        r.f = SmoothFn(r.name, [p](double x) { return p(x); });
        int top = p.top_index() - p.base_index();
        for (int q = 0; q <= top + 1; ++q) r.gauged.push_back([p, q](double x) { return p.gauged(q, x); });
        while (static_cast<int>(r.gauged.size()) <= upto) r.gauged.push_back([](double) { return 0.0; });
        if (auto* c = std::get_if<ChainT>(&p.family()))
            if (p.part() != Part::full) r.kinks.push_back(c->t);
        return r;
    }
};

struct ConeSpec {
    GaugeSpec g;
    int k = 1;
    int n = 1;
    void validate() const {
        require(k >= 1 && k <= n + 1, "cone needs 1 <= k <= n+1");
        require(n >= 0, "cone needs n >= 0");
    }
};

enum class Strategy { automatic, supplied, analytic, fd };

struct FdOptions {
    double h = 0;  // 0: chosen from the derivative order
    bool richardson = true;
};

namespace detail {

inline Jet function_jet(const FunctionRep& f, double x, int order) {
    if (f.f.has_jet()) return f.f(Jet::variable(x, order));
    if (static_cast<int>(f.ordinary.size()) > order) {
        Jet j(0, order);
        double fact = 1;
        for (int r = 0; r <= order; ++r) {
            if (r > 0) fact *= r;
            j.c[r] = f.ordinary[r](x) / fact;
        }
        return j;
    }
    throw DomainError("no derivative information of order " + std::to_string(order) + " for " + f.name);
}

inline double analytic_chain(const FunctionRep& f, const GaugeSpec& g, int j, double x) {
    if (!g.has_jets()) throw DomainError("gauges " + g.describe() + " carry no derivative information");
    Jet X = Jet::variable(x, j);
    Jet G = function_jet(f, x, j) / g.jet(0, X);
    for (int i = 1; i <= j; ++i) G = G.differentiate() / g.jet(i, Jet::variable(x, j - i));
    return G.value();
}

inline double fd_chain(const FunctionRep& f, const GaugeSpec& g, int j, double x, const FdOptions& o) {
    const Interval& I = g.interval();
    double h = o.h > 0 ? o.h : (1 + std::abs(x)) * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (j + 4));
    if (j > 0) {
        double room = std::min(x - I.a, I.b - x);
        if (j * h >= room) h = room / (j + 1);
        if (!(h > 1e-9 * (1 + std::abs(x)))) throw DomainError("finite-difference step underflow near an endpoint");
    }
    std::function<double(int, double)> level = [&](int l, double y) -> double {
        if (l == 0) return f(y) / g(0, y);
        auto central = [&](double hh) { return (level(l - 1, y + hh) - level(l - 1, y - hh)) / (2 * hh); };
        double d = o.richardson ? (4 * central(h / 2) - central(h)) / 3 : central(h);
        return d / g(l, y);
    };
    return level(j, x);
}

}  // namespace detail

// j-th gauged derivative f^{(j)}(x) = (R_{w_j} D ... R_{w_1} D R_{w_0} f)(x).
inline double gauged_derivative(const FunctionRep& f, const GaugeSpec& g, int j, double x,
                                Strategy s = Strategy::automatic, const FdOptions& fd = {}) {
    require(j >= 0, "derivative order must be nonnegative");
    if (!g.interval().contains(x)) throw DomainError("gauged derivative requested outside the interval");
    bool supplied = static_cast<int>(f.gauged.size()) > j;
    bool analytic = (f.f.has_jet() || static_cast<int>(f.ordinary.size()) > j) && g.has_jets();
    if (s == Strategy::automatic) s = supplied ? Strategy::supplied : analytic ? Strategy::analytic : Strategy::fd;
    switch (s) {
    case Strategy::supplied:
        if (!supplied) throw DomainError("no supplied gauged derivative of order " + std::to_string(j));
        return f.gauged[j](x);
    case Strategy::analytic: return detail::analytic_chain(f, g, j, x);
    default: return detail::fd_chain(f, g, j, x, fd);
    }
}

// Max scaled disagreement between the supplied gauged data and the chain built
// from ordinary derivatives (or finite differences) on a grid.
inline double consistency_gap(const FunctionRep& f, const GaugeSpec& g, int order, const std::vector<double>& grid) {
    double gap = 0;
    for (int j = 0; j <= order && j < static_cast<int>(f.gauged.size()); ++j)
        for (double x : grid) {
            double a = f.gauged[j](x);
            double b = gauged_derivative(f, g, j, x, (f.f.has_jet() || static_cast<int>(f.ordinary.size()) > j) &&
                                                              g.has_jets()
                                                          ? Strategy::analytic
                                                          : Strategy::fd);
            gap = std::max(gap, std::abs(a - b) / (1 + std::abs(a)));
        }
    return gap;
}

// Sanity check that f^{(n)} is right-continuous: compares the value with a
// one-sided limit taken from the right at 16 probe points.
inline bool right_continuous(const RealFn& fn, const Interval& I, double tol = 1e-6) {
    if (!fn) return true;
    double lo = std::isfinite(I.a) ? I.a : -8, hi = std::isfinite(I.b) ? I.b : 8;
    for (int i = 0; i < 16; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / 16;
        if (!I.contains(x)) continue;
        double v = fn(x), e = 1e-9 * (1 + std::abs(x));
        double r1 = fn(x + e), r2 = fn(x + 2 * e);
        double lim = 2 * r1 - r2;
        if (std::abs(lim - v) > tol * (1 + std::abs(v))) return false;
    }
    return true;
}

// N points spread by an arctan-type map over the interior of I (closed ends included).
inline std::vector<double> default_grid(const Interval& I, int N = 512) {
    constexpr double pi = std::numbers::pi;
    std::vector<double> xs;
    for (int i = 0; i < N; ++i) {
        double u = (i + 0.5) / N;
        double x;
        if (std::isfinite(I.a) && std::isfinite(I.b)) x = I.a + (I.b - I.a) * u;
        else if (std::isfinite(I.a)) x = I.a + std::tan(pi * u / 2);
        else if (std::isfinite(I.b)) x = I.b - std::tan(pi * (1 - u) / 2);
        else x = std::tan(pi * (u - 0.5));
        if (I.contains(x)) xs.push_back(x);
    }
    if (I.left_closed) xs.insert(xs.begin(), I.a);
    if (I.right_closed) xs.push_back(I.b);
    return xs;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

struct MonotoneViolation {
    int j;
    double x0, x1;
    double drop;
};

struct MembershipReport {
    bool member = true;
    std::vector<MonotoneViolation> violations;
    std::vector<double> worst_increment;  // per j in [k-1, n], most negative scaled step
    size_t grid_points = 0;
};

// Checks that f^{(j)} is nondecreasing on the grid for j in [k-1, n].
inline MembershipReport cone_membership(const FunctionRep& f, const ConeSpec& cone, std::vector<double> grid = {},
                                        double tol = 1e-9, Strategy s = Strategy::automatic,
                                        const FdOptions& fd = {}) {
    cone.validate();
    if (grid.empty()) grid = default_grid(cone.g.interval());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    MembershipReport rep;
    rep.grid_points = grid.size();
    for (int j = cone.k - 1; j <= cone.n; ++j) {
        std::vector<double> v(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) v[i] = gauged_derivative(f, cone.g, j, grid[i], s, fd);
        double worst = inf;
        for (size_t i = 0; i + 1 < grid.size(); ++i) {
            double step = v[i + 1] - v[i];
            double slack = tol * (1 + std::max(std::abs(v[i]), std::abs(v[i + 1])));
            worst = std::min(worst, step / (1 + std::max(std::abs(v[i]), std::abs(v[i + 1]))));
            if (step < -slack && (rep.violations.empty() || rep.violations.back().j != j)) {
                rep.member = false;
                rep.violations.push_back({j, grid[i], grid[i + 1], -step});
            }
        }
        rep.worst_increment.push_back(worst);
    }
    return rep;
}

// h_{i;mu}(x) = int mu(dt) p+_{t;i,n}(x), optionally restricted to t >= y.
// Gauged derivatives (relative to S^i w) are h_{i+r;mu} / w_{i+r}.
inline FunctionRep mixture_function(const MeasureRep& mu, const GaugeSpec& g, int i, int n, double y = -inf,
                                    Route route = Route::automatic, const QuadOptions& o = {}) {
    require(0 <= i && i <= n, "mixture needs 0 <= i <= n");
    const Interval& I = g.interval();
    for (auto& a : mu.atoms)
        require(!(I.right_closed && a.x == I.b && a.w > 0), "mixing measure may not charge the right endpoint");
    struct Data {
        std::vector<std::pair<WPoly, double>> atoms;
        MeasureRep mu;
        GaugeSpec g;
        int i, n;
        double y;
        Route route;
        QuadOptions o;
    };
    auto d = std::make_shared<Data>(Data{{}, mu, g, i, n, y, route, o});
    for (auto& a : mu.atoms)
        if (a.w > 0 && a.x >= y) d->atoms.emplace_back(WPoly::chain_t(g, a.x, i, n, Part::positive, route, o), a.w);
    auto eval = [d](int r, double x, bool value) {
        double s = 0;
        for (auto& [p, w] : d->atoms) s += w * (value ? p(x) : p.gauged(r, x));
        if (d->mu.has_continuous() && d->mu.weight > 0) {
            auto h = [&](double t) {
                if (t > x || t < d->y || !d->g.interval().valid_base(t)) return 0.0;
                auto p = WPoly::chain_t(d->g, t, d->i, d->n, Part::positive, d->route, d->o);
                double v = value ? p(x) : p.gauged(r, x);
                return v > 0 ? v : 0.0;
            };
            std::vector<double> br{x};
            if (std::isfinite(d->y)) br.push_back(d->y);
            Continuous c = d->mu.cont;
            if (auto* dl = std::get_if<DensityLaw>(&c)) {
                // the integrand vanishes outside [y, x]; clip so no tail hint is needed there
                dl->lo = std::max(dl->lo, d->y);
                dl->hi = std::min(dl->hi, x);
                if (!(dl->lo < dl->hi)) return s;
            }
            s += d->mu.weight * detail::continuous_integral_nonneg(c, h, br, d->o);
        }
        return s;
    };
    FunctionRep r;
    r.name = "mixture_h" + std::to_string(i);
    r.interval = I;
    r.f = SmoothFn(r.name, [eval](double x) { return eval(0, x, true); });
    for (int q = 0; q <= n - i + 1; ++q) r.gauged.push_back([eval, q](double x) { return eval(q, x, false); });
    return r;
}

struct ComparisonReport {
    bool preconditions = true;
    double interpolation_gap = 0;  // max_{j<k} |f^{(j)}(z) - g^{(j)}(z)|
    double min_kth_difference = inf;  // min over grid of f^{(k)} - g^{(k)}
    double right_margin = inf;        // min over grid right of z of f - g
    double left_margin = inf;         // min over grid left of z of (-1)^k (f - g)
    bool holds = true;
};

// Comparison from a point: equal gauged derivatives below order k at z and
// f^{(k)} >= g^{(k)} give f >= g right of z and (-1)^k (f - g) >= 0 left of z.
inline ComparisonReport compare_from_point(const FunctionRep& f, const FunctionRep& h, const GaugeSpec& g, int k,
                                           double z, const std::vector<double>& grid, double tol = 1e-8,
                                           Strategy s = Strategy::automatic) {
    ComparisonReport rep;
    for (int j = 0; j < k; ++j) {
        double a = gauged_derivative(f, g, j, z, s), b = gauged_derivative(h, g, j, z, s);
        rep.interpolation_gap = std::max(rep.interpolation_gap, std::abs(a - b) / (1 + std::abs(a)));
    }
    for (double x : grid) {
        double d = gauged_derivative(f, g, k, x, s) - gauged_derivative(h, g, k, x, s);
        rep.min_kth_difference = std::min(rep.min_kth_difference, d);
        double diff = f(x) - h(x);
        double scale = 1 + std::abs(f(x));
        if (x >= z) rep.right_margin = std::min(rep.right_margin, diff / scale);
        if (x <= z) rep.left_margin = std::min(rep.left_margin, (k % 2 ? -diff : diff) / scale);
    }
    rep.preconditions = rep.interpolation_gap <= tol && rep.min_kth_difference >= -tol;
    rep.holds = rep.right_margin >= -tol && rep.left_margin >= -tol;
    return rep;
}

struct InvarianceReport {
    double max_abs = 0;
    double max_rel = 0;  // |lhs - rhs| / (1 + |rhs|)
};

// (f o psi)^{(j)} under transported gauges against f^{(j)} o psi.
inline InvarianceReport invariance_check(const FunctionRep& f, const GaugeSpec& g, const ScaleMap& m, int j,
                                         const std::vector<double>& xs, Strategy s = Strategy::automatic) {
    GaugeSpec gt = g.transported(m);
    FunctionRep comp;
    comp.name = f.name + " o " + m.name;
    comp.interval = m.domain;
    auto ff = f.f;
    auto psi = m.psi;
    if (ff.has_jet())
        comp.f = SmoothFn(comp.name, [ff, psi](double x) { return ff(psi(x)); },
                          [ff, psi](const Jet& x) { return ff(psi(x)); });
    else
        comp.f = SmoothFn(comp.name, [ff, psi](double x) { return ff(psi(x)); });
    InvarianceReport rep;
    for (double x : xs) {
        double lhs = gauged_derivative(comp, gt, j, x, s);
        double rhs = gauged_derivative(f, g, j, m.psi(x), s);
        double e = std::abs(lhs - rhs);
        rep.max_abs = std::max(rep.max_abs, e);
        rep.max_rel = std::max(rep.max_rel, e / (1 + std::abs(rhs)));
    }
    return rep;
}

}  // namespace gmono
