#pragma once

#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "gderiv.hpp"
#include "measures.hpp"
#include "wpoly.hpp"

namespace gmono {

// f in F_+^{k:n} together with f^{(i)}(a+) for i in [k, n] and the measure d f^{(n)}.
struct TaylorData {
    ConeSpec cone;
    FunctionRep f;
    std::vector<double> limits_at_a;  // indexed by i, entries below k unused
    MeasureRep dfn;
    FinitenessSet fin;

    double limit(int i) const { return limits_at_a.at(i); }
};

// f^{(i)}(a+) by walking towards a until successive values settle.
inline double limit_at_a(const FunctionRep& f, const GaugeSpec& g, int i, double tol = 1e-8) {
    const Interval& I = g.interval();
    if (I.a_in()) return gauged_derivative(f, g, i, I.a);
    double x0 = detail::reference_point(I);
    double prev = gauged_derivative(f, g, i, x0);
    int quiet = 0;
    for (int m = 0; m < 60; ++m) {
        double x = std::isfinite(I.a) ? I.a + (x0 - I.a) * std::ldexp(1.0, -(m + 1)) : x0 - std::ldexp(1.0, m);
        double v;
        try {
            v = gauged_derivative(f, g, i, x);
        } catch (const DomainError&) {
            break;
        }
        if (!std::isfinite(v)) break;
        if (std::abs(v - prev) < tol * (1 + std::abs(v))) {
            if (++quiet == 2) return v;
        } else {
            quiet = 0;
        }
        prev = v;
    }
    throw InputError("no limit of f^(" + std::to_string(i) + ") at the left endpoint could be established");
}

inline TaylorData make_taylor_data(const ConeSpec& cone, FunctionRep f, MeasureRep dfn,
                                   std::optional<std::vector<double>> limits = std::nullopt) {
    cone.validate();
    TaylorData td{cone, std::move(f), {}, std::move(dfn), finiteness_set(cone.g, cone.n)};
    const int k = cone.k, n = cone.n;
    if (limits) {
        td.limits_at_a = *limits;
        td.limits_at_a.resize(n + 1, 0.0);
    } else {
        td.limits_at_a.assign(n + 1, 0.0);
        for (int i = k; i <= n; ++i) td.limits_at_a[i] = limit_at_a(td.f, cone.g, i);
    }
    for (int i = k; i <= n; ++i) {
        double& v = td.limits_at_a[i];
        if (v < 0 && v > -1e-8) v = 0;
        if (!(v >= 0) || !std::isfinite(v))
            throw InputError("f^(" + std::to_string(i) + ")(a+) must be finite and nonnegative");
        if (!td.fin.contains(i, n) && v > 1e-8)
            throw InputError("f^(" + std::to_string(i) + ")(a+) must vanish since p_{a;" + std::to_string(i) + "," +
                             std::to_string(n) + "} diverges");
    }
    return td;
}

struct TaylorTerms {
    double p = 0;  // w-polynomial part pinned at a+
    double h = 0;  // mixture remainder
};

// f^{(j)} w_j = p_j + h_j
inline TaylorTerms taylor_expand(const TaylorData& td, int j, double x) {
    const int k = td.cone.k, n = td.cone.n;
    if (j < k || j > n + 1) throw InputError("taylor_expand needs k <= j <= n+1");
    const GaugeSpec& g = td.cone.g;
    TaylorTerms r;
    if (j == n + 1) return r;
    for (int i : td.fin.row(j, n)) {
        double c = td.limit(i);
        if (c != 0) r.p += c * WPoly::chain_t(g, g.a(), j, i)(x);
    }
    r.h = mixture_function(td.dfn, g, j, n)(x);
    if (!std::isfinite(r.h)) throw InputError("mixture remainder diverges; TaylorData is inconsistent");
    return r;
}

struct ApproxHandle {
    double z = 0, y = 0;
    std::vector<double> c;                  // gauged derivatives of q at z
    std::vector<std::pair<int, double>> b;  // (j, f^{(j)}(a+)) over F_{k,n}
    FunctionRep P, R, g_y;
};

// g_y = P_{z,y} + R_{z,y}: R is the mixture h_{0,y} over d f^{(n)} restricted to
// [y, inf) and P = q + sum_j f^{(j)}(a+) p_{a,z;0:k:j} with q fixing the gauged
// derivatives below order k at z.
inline ApproxHandle build_approx(const TaylorData& td, double z, double y) {
    const GaugeSpec& g = td.cone.g;
    const Interval& I = g.interval();
    const int k = td.cone.k, n = td.cone.n;
    if (!(y > I.a) || !(y <= z) || !I.contains(z) || !I.contains(y) || (I.right_closed && z == I.b))
        throw InputError("build_approx needs a < y <= z < b");
    ApproxHandle ap;
    ap.z = z;
    ap.y = y;
    ap.R = mixture_function(td.dfn, g, 0, n, y);
    ap.R.name = "R_{z,y}";
    std::vector<WPoly> base;
    for (int j : td.fin.row(k, n)) {
        double c = td.limit(j);
        if (c == 0) continue;
        ap.b.emplace_back(j, c);
        base.push_back(WPoly::chain_az(g, z, 0, k, j));
    }
    ap.c.resize(k);
    for (int i = 0; i < k; ++i) {
        double hz = ap.R.gauged[i](z);
        if (!std::isfinite(hz)) throw InputError("h_{i,y} is infinite at z; inputs are inconsistent");
        ap.c[i] = gauged_derivative(td.f, g, i, z) - hz;
    }
    WPoly q = interpolate(g, z, ap.c);
    auto coef = ap.b;
    auto Pfn = [q, base, coef](int r, double x) {
        double s = r == 0 ? q(x) : q.gauged(r, x);
        for (size_t i = 0; i < base.size(); ++i)
            s += coef[i].second * (r == 0 ? base[i](x) : base[i].gauged(r, x));
        return s;
    };
    ap.P.name = "P_{z,y}";
    ap.P.interval = I;
    ap.P.f = SmoothFn(ap.P.name, [Pfn](double x) { return Pfn(0, x); });
    for (int r = 0; r <= n; ++r) ap.P.gauged.push_back([Pfn, r](double x) { return Pfn(r, x); });
    auto P = ap.P;
    auto R = ap.R;
    ap.g_y.name = "g_y";
    ap.g_y.interval = I;
    ap.g_y.f = SmoothFn("g_y", [P, R](double x) { return P(x) + R(x); });
    for (int r = 0; r <= n; ++r)
        ap.g_y.gauged.push_back([P, R, r](double x) { return P.gauged[r](x) + R.gauged[r](x); });
    ap.g_y.kinks.push_back(y);
    return ap;
}

struct ProfileRow {
    double y = 0;
    double gap_right = 0;  // sup over grid right of z of f - g_y
    double gap_left = 0;   // sup over grid left of z of (-1)^k (f - g_y)
    double min_right = 0;  // should stay >= -tol
    double min_left = 0;
};

struct ConvergenceProfile {
    std::vector<ProfileRow> rows;
    bool nonnegative = true;
    bool nonincreasing = true;
};

inline ConvergenceProfile convergence_profile(const TaylorData& td, double z, const std::vector<double>& ys,
                                              const std::vector<double>& grid, double tol = 1e-9) {
    for (size_t i = 1; i < ys.size(); ++i) require(ys[i] < ys[i - 1], "ys must be strictly decreasing");
    const int k = td.cone.k;
    auto one = [&](double y) {
        ApproxHandle ap = build_approx(td, z, y);
        ProfileRow r{y, -inf, -inf, inf, inf};
        for (double x : grid) {
            double d = td.f(x) - ap.g_y(x);
            if (x >= z) {
                r.gap_right = std::max(r.gap_right, d);
                r.min_right = std::min(r.min_right, d);
            }
            if (x <= z) {
                double e = k % 2 ? -d : d;
                r.gap_left = std::max(r.gap_left, e);
                r.min_left = std::min(r.min_left, e);
            }
        }
        if (r.gap_right == -inf) r.gap_right = r.min_right = 0;
        if (r.gap_left == -inf) r.gap_left = r.min_left = 0;
        return r;
    };
    std::vector<std::future<ProfileRow>> jobs;
    for (double y : ys) jobs.push_back(std::async(std::launch::async, one, y));
    ConvergenceProfile out;
    for (auto& j : jobs) out.rows.push_back(j.get());
    for (size_t i = 0; i < out.rows.size(); ++i) {
        auto& r = out.rows[i];
        double sr = tol * (1 + std::abs(r.gap_right)), sl = tol * (1 + std::abs(r.gap_left));
        if (r.min_right < -sr || r.min_left < -sl) out.nonnegative = false;
        if (i > 0) {
            auto& p = out.rows[i - 1];
            if (r.gap_right > p.gap_right + sr || r.gap_left > p.gap_left + sl) out.nonincreasing = false;
        }
    }
    return out;
}

// The unit-gauge function f = g 1{x<=0} + p 1{x>0} with g(x) = (-1)^k (1-x)^(k-1/2)
// and p the Taylor polynomial of g at 0 of degree n+1. It lies in F_+^{k:n} but
// grows like |x|^(k-1/2) at -inf, so it is not a polynomial plus a mixture.
inline FunctionRep rem_left_example(int k, int n) {
    require(1 <= k && k <= n + 1, "rem_left_example needs 1 <= k <= n+1");
    const double s = k % 2 ? -1.0 : 1.0, e = k - 0.5;
    // g^{(i)}(x) = s (-1)^i e(e-1)...(e-i+1) (1-x)^(e-i)
    auto gder = [=](int i, double x) {
        double c = s;
        for (int r = 0; r < i; ++r) c *= -(e - r);
        return c * std::pow(1 - x, e - i);
    };
    auto der = [=](int j, double x) {
        if (x <= 0) return gder(j, x);
        double v = 0, fact = 1;
        for (int i = j; i <= n + 1; ++i) {
            if (i > j) fact *= (i - j);
            v += gder(i, 0) * std::pow(x, i - j) / fact;
        }
        return v;
    };
    FunctionRep f;
    f.name = "rem_left(" + std::to_string(k) + "," + std::to_string(n) + ")";
    f.f = SmoothFn(f.name, [der](double x) { return der(0, x); });
    for (int j = 0; j <= n + 1; ++j) f.ordinary.push_back([der, j](double x) { return der(j, x); });
    f.kinks.push_back(0);
    return f;
}

// Empirical exponent alpha with |f(x)| ~ |x|^alpha as x -> dir*inf, fitted on [R, 2R].
inline double growth_exponent(const RealFn& f, double dir = -1, double R = 1e3) {
    double a = std::abs(f(dir * R)), b = std::abs(f(dir * 2 * R));
    if (a == 0 || b == 0) return -inf;
    return std::log2(b / a);
}

}  // namespace gmono
