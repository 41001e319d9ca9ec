#pragma once

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "admissibility.hpp"
#include "gderiv.hpp"
#include "measures.hpp"
#include "wpoly.hpp"

namespace gmono {

enum class Verdict { dominates, fails, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::dominates: return "dominates";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
    }
}

inline double tol_eq(double v, double tol = 1e-9) { return tol * (1 + (std::isfinite(v) ? std::abs(v) : 0.0)); }

struct MomentCheck {
    int index = 0;   // i for (i'), j for (ii')
    double t = 0;    // base point for (iii)
    double v1 = 0, v2 = 0;
    double gap = 0;  // v1 - v2 (nan when undefined)
    bool ok = true;
    bool decided = true;
};

struct DominanceReport {
    Verdict verdict = Verdict::dominates;
    std::vector<MomentCheck> cond_i, cond_ii, cond_iii;
    std::optional<FunctionRep> witness;
    std::string witness_desc;
    double witness_gap = 0;  // nu1(w) - nu2(w) < 0
    std::vector<double> t_grid;
    std::string certification;
    double s = 0, z = 0;
};

namespace detail {

// Compares two extended reals; +inf on the left counts as satisfying >=.
inline MomentCheck compare_ge(double v1, double v2, double tol) {
    MomentCheck c;
    c.v1 = v1;
    c.v2 = v2;
    if (std::isnan(v1) || std::isnan(v2) || (std::isinf(v1) && std::isinf(v2) && v1 == v2)) {
        c.gap = std::nan("");
        c.decided = false;
        c.ok = false;
        return c;
    }
    c.gap = v1 - v2;
    c.ok = c.gap >= -tol_eq(std::max(std::abs(v1), std::abs(v2)), tol);
    return c;
}

inline MomentCheck compare_eq(double v1, double v2, double tol) {
    MomentCheck c;
    c.v1 = v1;
    c.v2 = v2;
    if (!std::isfinite(v1) || !std::isfinite(v2)) {
        c.gap = std::isnan(v1 - v2) ? std::nan("") : v1 - v2;
        c.ok = false;
        return c;
    }
    c.gap = v1 - v2;
    c.ok = std::abs(c.gap) <= tol_eq(std::max(std::abs(v1), std::abs(v2)), tol);
    return c;
}

inline double moment_value(const MeasureRep& nu, const WPoly& p) {
    try {
        auto m = wpoly_moment(nu, p);
        if (!m.defined()) return std::nan("");
        return m.pos - m.neg;
    } catch (const UndefinedMoment&) {
        return std::nan("");
    }
}

inline double pooled_median(const MeasureRep& a, const MeasureRep& b, const Interval& I) {
    std::vector<double> xs;
    for (auto* m : {&a, &b})
        for (auto& at : m->atoms) xs.push_back(at.x);
    if (xs.empty()) return default_center(I);
    std::sort(xs.begin(), xs.end());
    double med = xs[xs.size() / 2];
    return I.contains(med) ? med : default_center(I);
}

inline FunctionRep scaled(const FunctionRep& f, double c) {
    FunctionRep r = f;
    auto ff = f.f;
    r.name = (c < 0 ? "-" : "") + f.name;
    r.f = SmoothFn(r.name, [ff, c](double x) { return c * ff(x); });
    r.gauged.clear();
    for (auto& gd : f.gauged) r.gauged.push_back([gd, c](double x) { return c * gd(x); });
    return r;
}

}  // namespace detail

// Atoms, quantiles and arctan-spread points; all inside the base range of I.
inline std::vector<double> default_t_grid(const MeasureRep& nu1, const MeasureRep& nu2, const Interval& I,
                                          int arctan_points = 64) {
    std::vector<double> t;
    for (auto* m : {&nu1, &nu2}) {
        for (auto& a : m->atoms) t.push_back(a.x);
        for (double q : quantile_points(*m, 15)) t.push_back(q);
    }
    for (double x : default_grid(I, arctan_points)) t.push_back(x);
    if (std::isfinite(I.a)) t.push_back(I.a);
    std::vector<double> out;
    for (double x : t)
        if (I.valid_base(x)) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct DominanceOptions {
    double tol = 1e-9;
    bool refine = true;  // Brent search between grid points around local minima of the (iii) margin
    bool check_admissibility = true;
};

// Conditions (i'), (ii'), (iii) for (nu1, nu2) against the cone (k, n) with gauges g.
inline DominanceReport check_dominance(const MeasureRep& nu1, const MeasureRep& nu2, const ConeSpec& c,
                                       std::optional<double> s_opt = std::nullopt,
                                       std::optional<double> z_opt = std::nullopt, std::vector<double> t_grid = {},
                                       const DominanceOptions& opt = {}) {
    c.validate();
    const GaugeSpec& g = c.g;
    const Interval& I = g.interval();
    const int k = c.k, n = c.n;
    if (opt.check_admissibility)
        for (auto* m : {&nu1, &nu2}) {
            auto a = admissibility(*m, c);
            if (!a.admissible)
                throw InputError("measure is not admissible (" + to_string(a.branch) + "): " +
                                 a.failing_poly.value_or(a.note));
        }
    DominanceReport rep;
    rep.s = s_opt.value_or(detail::pooled_median(nu1, nu2, I));
    rep.z = z_opt.value_or(rep.s);
    require(I.contains(rep.s) && I.contains(rep.z), "s and z must lie in the interval");
    if (t_grid.empty()) t_grid = default_t_grid(nu1, nu2, I);
    std::sort(t_grid.begin(), t_grid.end());

    struct Cand {
        double gap;
        FunctionRep f;
        std::string desc;
        double where;
    };
    std::optional<Cand> wit_i, wit_ii, wit_iii;
    // most violated first; near-ties go to the point closest to z
    auto keep = [&](std::optional<Cand>& slot, double gap, const FunctionRep& f, const std::string& d,
                    double where = 0) {
        double slack = tol_eq(gap, opt.tol);
        bool better = !slot || gap < slot->gap - slack ||
                      (gap <= slot->gap + slack && std::abs(where - rep.z) < std::abs(slot->where - rep.z));
        if (better) slot = Cand{gap, f, d, where};
    };

    for (int i = 0; i < k; ++i) {
        WPoly p = WPoly::chain_t(g, rep.s, 0, i);
        auto chk = detail::compare_eq(detail::moment_value(nu1, p), detail::moment_value(nu2, p), opt.tol);
        chk.index = i;
        rep.cond_i.push_back(chk);
        if (!chk.ok && std::isfinite(chk.gap)) {
            // nu1(w) < nu2(w) for w = p or w = -p
            double sgn = chk.gap < 0 ? 1 : -1;
            keep(wit_i, -std::abs(chk.gap), detail::scaled(FunctionRep::from_wpoly(p, n + 1), sgn),
                 (sgn < 0 ? "-" : "") + p.describe());
        }
    }
    auto fin = finiteness_set(g, n);
    for (int j : fin.row(k, n)) {
        WPoly p = WPoly::chain_az(g, rep.z, 0, k, j);
        auto chk = detail::compare_ge(detail::moment_value(nu1, p), detail::moment_value(nu2, p), opt.tol);
        chk.index = j;
        rep.cond_ii.push_back(chk);
        if (!chk.ok && chk.decided) keep(wit_ii, chk.gap, FunctionRep::from_wpoly(p, n + 1), p.describe());
    }
    const bool unit = g.kind() == GaugeKind::unit;
    const double nf = std::tgamma(n + 1.0);
    auto margin_at = [&](double t) {
        double v1, v2;
        if (unit) {
            v1 = partial_moment(nu1, t, n) / nf;
            v2 = partial_moment(nu2, t, n) / nf;
        } else {
            WPoly p = WPoly::chain_t(g, t, 0, n, Part::positive);
            v1 = detail::moment_value(nu1, p);
            v2 = detail::moment_value(nu2, p);
        }
        auto chk = detail::compare_ge(v1, v2, opt.tol);
        chk.t = t;
        return chk;
    };
    for (double t : t_grid) rep.cond_iii.push_back(margin_at(t));
    if (opt.refine && rep.cond_iii.size() >= 3) {
        std::vector<double> extra;
        auto& C = rep.cond_iii;
        for (size_t i = 1; i + 1 < C.size(); ++i) {
            if (!std::isfinite(C[i].gap) || !std::isfinite(C[i - 1].gap) || !std::isfinite(C[i + 1].gap)) continue;
            if (C[i].gap <= C[i - 1].gap && C[i].gap <= C[i + 1].gap) {
                auto f = [&](double t) { double v = margin_at(t).gap; return std::isfinite(v) ? v : 1e300; };
                auto r = boost::math::tools::brent_find_minima(f, C[i - 1].t, C[i + 1].t, 40);
                if (r.second < C[i].gap) extra.push_back(r.first);
            }
            if (extra.size() >= 32) break;
        }
        for (double t : extra) rep.cond_iii.push_back(margin_at(t));
        std::sort(rep.cond_iii.begin(), rep.cond_iii.end(), [](auto& a, auto& b) { return a.t < b.t; });
        t_grid.insert(t_grid.end(), extra.begin(), extra.end());
        std::sort(t_grid.begin(), t_grid.end());
    }
    for (auto& chk : rep.cond_iii)
        if (!chk.ok && chk.decided) {
            WPoly p = WPoly::chain_t(g, chk.t, 0, n, Part::positive);
            keep(wit_iii, chk.gap, FunctionRep::from_wpoly(p, n + 1), p.describe(), chk.t);
        }
    rep.t_grid = t_grid;
    rep.certification = "grid-certified for (iii) on " + std::to_string(t_grid.size()) + " points";

    bool any_fail = false, any_undecided = false;
    for (auto* v : {&rep.cond_i, &rep.cond_ii, &rep.cond_iii})
        for (auto& chk : *v) {
            if (!chk.decided) any_undecided = true;
            else if (!chk.ok) any_fail = true;
        }
    // undefined moments in (i') cannot satisfy the equality
    for (auto& chk : rep.cond_i)
        if (!chk.ok) any_fail = true;
    if (any_fail) rep.verdict = Verdict::fails;
    else if (any_undecided) rep.verdict = Verdict::inconclusive;
    // prefer a positive-part witness, then (ii'), then (i')
    for (auto* w : {&wit_iii, &wit_ii, &wit_i})
        if (*w) {
            rep.witness = (*w)->f;
            rep.witness_desc = (*w)->desc;
            rep.witness_gap = (*w)->gap;
            break;
        }
    return rep;
}

struct UnitDominanceOptions {
    double tol = 1e-9;
    bool include_redundant = false;  // keep j = n in (ii) when a > -inf
    bool refine = true;
};

// Unit gauges via power and partial moments. With a = -inf, (ii) is
// int (x-z)^k; with finite a it is int (x-a)^j for j in [k, n-1].
inline DominanceReport check_dominance_unit(const MeasureRep& nu1, const MeasureRep& nu2, int k, int n,
                                            Interval I = Interval::real_line(),
                                            std::optional<double> s_opt = std::nullopt,
                                            std::optional<double> z_opt = std::nullopt,
                                            std::vector<double> t_grid = {}, const UnitDominanceOptions& opt = {}) {
    ConeSpec c{GaugeSpec::unit(I), k, n};
    c.validate();
    DominanceReport rep;
    rep.s = s_opt.value_or(detail::pooled_median(nu1, nu2, I));
    rep.z = z_opt.value_or(rep.s);
    auto moment = [&](const MeasureRep& nu, double center, int i) {
        try {
            auto m = moment_parts(nu, [&](double x) { return std::pow(x - center, i); }, {center});
            return m.defined() ? m.pos - m.neg : std::nan("");
        } catch (const UndefinedMoment&) {
            return std::nan("");
        }
    };
    for (int i = 0; i < k; ++i) {
        auto chk = detail::compare_eq(moment(nu1, rep.s, i), moment(nu2, rep.s, i), opt.tol);
        chk.index = i;
        rep.cond_i.push_back(chk);
    }
    if (!std::isfinite(I.a)) {
        if (k <= n) {
            auto chk = detail::compare_ge(moment(nu1, rep.z, k), moment(nu2, rep.z, k), opt.tol);
            chk.index = k;
            rep.cond_ii.push_back(chk);
        }
    } else {
        int top = opt.include_redundant ? n : n - 1;
        for (int j = k; j <= top; ++j) {
            auto chk = detail::compare_ge(moment(nu1, I.a, j), moment(nu2, I.a, j), opt.tol);
            chk.index = j;
            rep.cond_ii.push_back(chk);
        }
    }
    if (t_grid.empty()) t_grid = default_t_grid(nu1, nu2, I);
    std::sort(t_grid.begin(), t_grid.end());
    auto margin_at = [&](double t) {
        auto chk = detail::compare_ge(partial_moment(nu1, t, n), partial_moment(nu2, t, n), opt.tol);
        chk.t = t;
        return chk;
    };
    for (double t : t_grid) rep.cond_iii.push_back(margin_at(t));
    if (opt.refine && rep.cond_iii.size() >= 3) {
        std::vector<double> extra;
        auto& C = rep.cond_iii;
        for (size_t i = 1; i + 1 < C.size() && extra.size() < 32; ++i)
            if (std::isfinite(C[i].gap) && C[i].gap <= C[i - 1].gap && C[i].gap <= C[i + 1].gap) {
                auto f = [&](double t) { double v = margin_at(t).gap; return std::isfinite(v) ? v : 1e300; };
                auto r = boost::math::tools::brent_find_minima(f, C[i - 1].t, C[i + 1].t, 40);
                if (r.second < C[i].gap) extra.push_back(r.first);
            }
        for (double t : extra) rep.cond_iii.push_back(margin_at(t));
        std::sort(rep.cond_iii.begin(), rep.cond_iii.end(), [](auto& a, auto& b) { return a.t < b.t; });
        t_grid.insert(t_grid.end(), extra.begin(), extra.end());
        std::sort(t_grid.begin(), t_grid.end());
    }
    rep.t_grid = t_grid;
    rep.certification = "grid-certified for (iii) on " + std::to_string(t_grid.size()) + " points";
    bool fail = false, undecided = false;
    for (auto* v : {&rep.cond_i, &rep.cond_ii, &rep.cond_iii})
        for (auto& chk : *v) {
            if (!chk.decided) undecided = true;
            else if (!chk.ok) fail = true;
        }
    for (auto& chk : rep.cond_i)
        if (!chk.ok) fail = true;
    rep.verdict = fail ? Verdict::fails : undecided ? Verdict::inconclusive : Verdict::dominates;
    // witness: worst (iii) margin, else the failing moment polynomial
    const MomentCheck* worst = nullptr;
    for (auto& chk : rep.cond_iii)
        if (!chk.ok && chk.decided) {
            double slack = tol_eq(chk.gap, opt.tol);
            if (!worst || chk.gap < worst->gap - slack ||
                (chk.gap <= worst->gap + slack && std::abs(chk.t - rep.z) < std::abs(worst->t - rep.z)))
                worst = &chk;
        }
    double nf = std::tgamma(n + 1.0);
    if (worst) {
        WPoly p = WPoly::chain_t(c.g, worst->t, 0, n, Part::positive);
        rep.witness = FunctionRep::from_wpoly(p, n + 1);
        rep.witness_desc = p.describe();
        rep.witness_gap = worst->gap / nf;
    } else {
        for (auto& chk : rep.cond_ii)
            if (!chk.ok && chk.decided) {
                double center = std::isfinite(I.a) ? I.a : rep.z;
                int j = chk.index;
                rep.witness = FunctionRep::generic("(x-" + fmt_num(center, 6) + ")^" + std::to_string(j),
                                                   [center, j](auto x) { using std::pow; return pow(x - center, j); }, I);
                rep.witness_desc = rep.witness->name;
                rep.witness_gap = chk.gap;
                break;
            }
        if (!rep.witness)
            for (auto& chk : rep.cond_i)
                if (!chk.ok && std::isfinite(chk.gap)) {
                    double sgn = chk.gap < 0 ? 1 : -1, center = rep.s;
                    int i = chk.index;
                    rep.witness = FunctionRep::generic(
                        std::string(sgn < 0 ? "-" : "") + "(x-" + fmt_num(center, 6) + ")^" + std::to_string(i),
                        [center, i, sgn](auto x) { using std::pow; return pow(x - center, i) * sgn; }, I);
                    rep.witness_desc = rep.witness->name;
                    rep.witness_gap = -std::abs(chk.gap);
                    break;
                }
    }
    return rep;
}

// The reflected class F_-^{k:n}: E(z-X)^k and E(t-X)_+^n conditions, checked by
// reflecting both measures and the points.
inline DominanceReport check_dominance_reflected(const MeasureRep& nu1, const MeasureRep& nu2, int k, int n,
                                                 std::optional<double> s = std::nullopt,
                                                 std::optional<double> z = std::nullopt,
                                                 std::vector<double> t_grid = {},
                                                 const UnitDominanceOptions& opt = {}) {
    require(k <= n, "the reflected criteria assume k <= n");
    auto neg = [](std::optional<double> v) { return v ? std::optional<double>(-*v) : std::nullopt; };
    for (double& t : t_grid) t = -t;
    auto rep = check_dominance_unit(reflected(nu1), reflected(nu2), k, n, Interval::real_line(), neg(s), neg(z),
                                    t_grid, opt);
    rep.s = -rep.s;
    rep.z = -rep.z;
    for (double& t : rep.t_grid) t = -t;
    std::reverse(rep.t_grid.begin(), rep.t_grid.end());
    for (auto& chk : rep.cond_iii) chk.t = -chk.t;
    std::reverse(rep.cond_iii.begin(), rep.cond_iii.end());
    if (rep.witness) {
        auto w = *rep.witness;
        auto ff = w.f;
        rep.witness->name = w.name + " o (-x)";
        rep.witness->f = SmoothFn(rep.witness->name, [ff](double x) { return ff(-x); });
        rep.witness->gauged.clear();
        rep.witness_desc = rep.witness->name;
    }
    return rep;
}

// Functional sum_i c_i f(x_i) that vanishes on P^{<=m-1} and is positive on
// p_{s;0,m}. With m in [k, n+1] it is nonnegative on F_+^{k:n}.
inline std::vector<double> divided_difference(const GaugeSpec& g, const std::vector<double>& xs, int m, double s) {
    require(static_cast<int>(xs.size()) == m + 1, "divided difference needs m+1 nodes");
    std::vector<WPoly> basis;
    for (int i = 0; i <= m; ++i) basis.push_back(WPoly::chain_t(g, s, 0, i));
    std::vector<double> c(m + 1, 0.0);
    c[m] = 1;
    if (m > 0) {
        Eigen::MatrixXd A(m, m);
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) {
            for (int l = 0; l < m; ++l) A(i, l) = basis[i](xs[l]);
            rhs(i) = -basis[i](xs[m]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) throw DomainError("divided-difference nodes are degenerate");
        Eigen::VectorXd sol = lu.solve(rhs);
        for (int l = 0; l < m; ++l) c[l] = sol(l);
    }
    double lead = 0;
    for (int l = 0; l <= m; ++l) lead += c[l] * basis[m](xs[l]);
    if (lead < 0)
        for (auto& v : c) v = -v;
    return c;
}

struct OracleReport {
    int trials = 0;
    int soundness_violations = 0;
    double worst_gap = inf;  // min over sampled f of nu1(f) - nu2(f), scaled
    Verdict verdict = Verdict::dominates;
    bool witness_valid = true;  // for "fails": nu1(w) < nu2(w) - tol and w in the cone
    double witness_gap = 0;
};

// Samples cone members f = sum c_i p_{s;0,i} (any sign) + sum d_j p_{a,z;0:k:j}
// + sum e_r p+_{t_r;0,n} (d, e >= 0) and tests nu1(f) >= nu2(f) whenever the
// checker says "dominates".
inline OracleReport oracle_equivalence(const MeasureRep& nu1, const MeasureRep& nu2, const ConeSpec& c, int trials,
                                       unsigned seed, const DominanceOptions& dopt = {}) {
    require(nu1.finite_atoms_only() && nu2.finite_atoms_only(), "oracle_equivalence needs finite-atom measures");
    const GaugeSpec& g = c.g;
    const Interval& I = g.interval();
    const int k = c.k, n = c.n;
    auto rep = check_dominance(nu1, nu2, c, std::nullopt, std::nullopt, {}, dopt);
    OracleReport out;
    out.trials = trials;
    out.verdict = rep.verdict;
    auto integral = [](const MeasureRep& nu, const std::function<double(double)>& f) {
        double s = 0;
        for (auto& a : nu.atoms) s += a.w * f(a.x);
        return s;
    };
    if (rep.verdict == Verdict::fails) {
        out.witness_valid = false;
        if (rep.witness) {
            auto& w = *rep.witness;
            auto wf = [&w](double x) { return w(x); };
            double v1 = integral(nu1, wf), v2 = integral(nu2, wf);
            out.witness_gap = v1 - v2;
            bool strict = v1 - v2 < -tol_eq(std::max(std::abs(v1), std::abs(v2)), dopt.tol);
            std::vector<double> grid = default_grid(I, 96);
            bool member = cone_membership(w, c, grid, 1e-8, Strategy::supplied).member;
            out.witness_valid = strict && member;
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> pts;
    for (auto* m : {&nu1, &nu2})
        for (auto& a : m->atoms) pts.push_back(a.x);
    double lo = pts.empty() ? -1 : *std::min_element(pts.begin(), pts.end());
    double hi = pts.empty() ? 1 : *std::max_element(pts.begin(), pts.end());
    auto fin = finiteness_set(g, n);
    std::vector<WPoly> lower, az;
    for (int i = 0; i < k; ++i) lower.push_back(WPoly::chain_t(g, rep.s, 0, i));
    for (int j : fin.row(k, n)) az.push_back(WPoly::chain_az(g, rep.z, 0, k, j));
    for (int tr = 0; tr < trials; ++tr) {
        std::vector<std::pair<double, WPoly>> terms;
        for (auto& p : lower) terms.emplace_back(4 * U(rng) - 2, p);
        for (auto& p : az)
            if (U(rng) < 0.7) terms.emplace_back(U(rng), p);
        int r = 1 + static_cast<int>(U(rng) * 4);
        for (int q = 0; q < r; ++q) {
            double t = lo - 1 + (hi - lo + 2) * U(rng);
            if (U(rng) < 0.3 && !pts.empty()) t = pts[static_cast<size_t>(U(rng) * pts.size()) % pts.size()];
            if (!I.valid_base(t)) t = I.clamp_inside(t, 1e-6);
            if (!I.valid_base(t)) continue;
            terms.emplace_back(U(rng), WPoly::chain_t(g, t, 0, n, Part::positive));
        }
        double v1 = 0, v2 = 0, scale = 0;
        for (auto& [w, p] : terms) {
            double a = integral(nu1, p), b = integral(nu2, p);
            v1 += w * a;
            v2 += w * b;
            scale += std::abs(w) * (std::abs(a) + std::abs(b));
        }
        double gap = (v1 - v2) / (1 + scale);
        out.worst_gap = std::min(out.worst_gap, gap);
        if (rep.verdict == Verdict::dominates && gap < -dopt.tol * 10) ++out.soundness_violations;
    }
    return out;
}

}  // namespace gmono
