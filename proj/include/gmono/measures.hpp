#pragma once

#include <algorithm>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace gmono {

struct Atom {
    double x;
    double w;
};
struct NormalLaw {
    double mean = 0, sd = 1;
};
// law of shift + scale * Poisson(lambda); scale may be negative
struct PoissonLaw {
    double lambda = 1, scale = 1, shift = 0;
};
struct CauchyLaw {
    double loc = 0, scale = 1;
};
// Tail behaviour of a density on one side, used to decide integrability.
struct TailHint {
    enum Kind { none, gaussian, exponential, polynomial } kind = none;
    double rate = 0;  // exponential rate or polynomial decay exponent
};
struct DensityLaw {
    std::string name;
    std::function<double(double)> pdf;
    double lo = -inf, hi = inf;
    TailHint left, right;
};

using Continuous = std::variant<std::monostate, NormalLaw, PoissonLaw, CauchyLaw, DensityLaw>;

// Nonnegative measure: finitely many atoms plus at most one continuous part
// (scaled by `weight`).
struct MeasureRep {
    Interval interval = Interval::real_line();
    std::vector<Atom> atoms;
    Continuous cont;
    double weight = 1;

    static MeasureRep from_atoms(std::vector<Atom> a, Interval I = Interval::real_line()) {
        MeasureRep m;
        m.interval = I;
        m.atoms = std::move(a);
        m.validate();
        return m;
    }
    static MeasureRep normal(double mean, double sd, double weight = 1) {
        MeasureRep m;
        m.cont = NormalLaw{mean, sd};
        m.weight = weight;
        m.validate();
        return m;
    }
    static MeasureRep poisson(double lambda, double scale = 1, double shift = 0) {
        MeasureRep m;
        m.cont = PoissonLaw{lambda, scale, shift};
        m.validate();
        return m;
    }
    static MeasureRep cauchy(double loc = 0, double scale = 1) {
        MeasureRep m;
        m.cont = CauchyLaw{loc, scale};
        m.validate();
        return m;
    }
    static MeasureRep density(DensityLaw d, Interval I = Interval::real_line(), double weight = 1) {
        MeasureRep m;
        m.interval = I;
        m.cont = std::move(d);
        m.weight = weight;
        m.validate();
        return m;
    }

    bool has_continuous() const { return !std::holds_alternative<std::monostate>(cont); }
    bool finite_atoms_only() const { return !has_continuous(); }

    void validate() const {
        interval.validate();
        for (auto& a : atoms) {
            require(a.w >= 0 && std::isfinite(a.w), "atom weights must be nonnegative and finite");
            require(interval.contains(a.x), "atom at " + fmt_num(a.x, 17) + " lies outside the interval");
        }
        require(weight >= 0 && std::isfinite(weight), "continuous weight must be nonnegative");
        if (auto* n = std::get_if<NormalLaw>(&cont)) require(n->sd > 0, "normal sd must be positive");
        if (auto* p = std::get_if<PoissonLaw>(&cont)) require(p->lambda > 0 && p->scale != 0, "bad poisson law");
        if (auto* c = std::get_if<CauchyLaw>(&cont)) require(c->scale > 0, "cauchy scale must be positive");
        if (auto* d = std::get_if<DensityLaw>(&cont)) {
            require(static_cast<bool>(d->pdf), "density needs a pdf");
            require(d->lo < d->hi, "density support needs lo < hi");
        }
        if (has_continuous() && !std::holds_alternative<PoissonLaw>(cont)) {
            double lo = support_lo(), hi = support_hi();
            require(lo >= interval.a && hi <= interval.b, "continuous part must live inside the interval");
        }
    }

    double total_mass() const {
        double m = 0;
        for (auto& a : atoms) m += a.w;
        if (has_continuous()) {
            if (auto* d = std::get_if<DensityLaw>(&cont)) m += weight * integrate(d->pdf, d->lo, d->hi).value;
            else m += weight;
        }
        return m;
    }

    // infimum of the support
    double support_lo() const {
        double lo = inf;
        for (auto& a : atoms)
            if (a.w > 0) lo = std::min(lo, a.x);
        if (weight > 0) {
            if (std::holds_alternative<NormalLaw>(cont) || std::holds_alternative<CauchyLaw>(cont)) lo = -inf;
            if (auto* p = std::get_if<PoissonLaw>(&cont)) lo = std::min(lo, p->scale > 0 ? p->shift : -inf);
            if (auto* d = std::get_if<DensityLaw>(&cont)) lo = std::min(lo, d->lo);
        }
        return lo;
    }
    double support_hi() const {
        double hi = -inf;
        for (auto& a : atoms)
            if (a.w > 0) hi = std::max(hi, a.x);
        if (weight > 0) {
            if (std::holds_alternative<NormalLaw>(cont) || std::holds_alternative<CauchyLaw>(cont)) hi = inf;
            if (auto* p = std::get_if<PoissonLaw>(&cont)) hi = std::max(hi, p->scale < 0 ? p->shift : inf);
            if (auto* d = std::get_if<DensityLaw>(&cont)) hi = std::max(hi, d->hi);
        }
        return hi;
    }
};

// Push-forward under x -> -x.
inline MeasureRep reflected(const MeasureRep& m) {
    MeasureRep r;
    r.interval = {-m.interval.b, -m.interval.a, m.interval.right_closed, m.interval.left_closed};
    for (auto& a : m.atoms) r.atoms.push_back({-a.x, a.w});
    r.weight = m.weight;
    if (auto* n = std::get_if<NormalLaw>(&m.cont)) r.cont = NormalLaw{-n->mean, n->sd};
    if (auto* p = std::get_if<PoissonLaw>(&m.cont)) r.cont = PoissonLaw{p->lambda, -p->scale, -p->shift};
    if (auto* c = std::get_if<CauchyLaw>(&m.cont)) r.cont = CauchyLaw{-c->loc, c->scale};
    if (auto* d = std::get_if<DensityLaw>(&m.cont)) {
        auto pdf = d->pdf;
        r.cont = DensityLaw{d->name + "(reflected)", [pdf](double x) { return pdf(-x); }, -d->hi, -d->lo, d->right,
                            d->left};
    }
    return r;
}

namespace detail {

inline double poisson_log_pmf(double lambda, long k) {
    return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
}

// Sum over the Poisson lattice of f(shift + scale k); stops once the remaining
// terms are negligible.
inline double poisson_sum(const PoissonLaw& p, const std::function<double(double)>& f) {
    double s = 0;
    long mode = static_cast<long>(p.lambda);
    long kmax = mode + 40 + static_cast<long>(40 * std::sqrt(p.lambda));
    int quiet = 0;
    for (long k = 0;; ++k) {
        double pk = std::exp(poisson_log_pmf(p.lambda, k));
        double v = f(p.shift + p.scale * k);
        double term = v == 0 ? 0 : pk * v;
        if (!std::isfinite(term)) return term;
        s += term;
        if (k > mode && k >= kmax) {
            if (std::abs(term) <= 1e-17 * (1 + std::abs(s))) ++quiet;
            else quiet = 0;
            if (quiet >= 20) break;
        }
        if (k > 100000) throw QuadratureError("poisson summation did not settle");
    }
    return s;
}

// Growth exponent of |f| along x -> dir * inf, from samples at doubling radii.
inline std::optional<double> growth_exponent(const std::function<double(double)>& f, double dir, double R = 1e4) {
    double a = std::abs(f(dir * R)), b = std::abs(f(dir * 2 * R)), c = std::abs(f(dir * 4 * R));
    if (a == 0 && b == 0 && c == 0) return std::nullopt;  // vanishes in the tail
    if (!std::isfinite(c) || !std::isfinite(b)) return inf;
    if (b == 0 || a == 0) return inf;
    return std::log2(c / b);
}

// Whether the tail of |part| against a polynomially decaying density of exponent beta is integrable.
inline bool poly_tail_finite(const std::function<double(double)>& part, double dir, double beta,
                             const std::string& what) {
    auto alpha = growth_exponent(part, dir);
    if (!alpha) return true;
    double crit = beta - 1;
    if (*alpha <= crit - 0.1) return true;
    if (*alpha >= crit - 0.01) return false;
    throw Inconclusive("cannot decide integrability of " + what + " (growth exponent " + fmt_num(*alpha, 4) + ")");
}

inline double integrate_pieces(const std::function<double(double)>& g, double lo, double hi,
                               std::vector<double> breaks, const QuadOptions& o) {
    std::vector<double> pts{lo};
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks)
        if (b > lo && b < hi && b != pts.back()) pts.push_back(b);
    pts.push_back(hi);
    double s = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) s += integrate(g, pts[i], pts[i + 1], o).value;
    return s;
}

// Integral of a nonnegative function against the continuous part (weight excluded).
inline double continuous_integral_nonneg(const Continuous& c, const std::function<double(double)>& h,
                                         const std::vector<double>& breaks, const QuadOptions& o) {
    constexpr double pi = std::numbers::pi;
    if (auto* n = std::get_if<NormalLaw>(&c)) {
        auto g = [&](double z) {
            if (std::abs(z) > 40) return 0.0;
            double v = h(n->mean + n->sd * z);
            return v == 0 ? 0.0 : v * std::exp(-0.5 * z * z) / std::sqrt(2 * pi);
        };
        std::vector<double> zb;
        for (double b : breaks) zb.push_back((b - n->mean) / n->sd);
        zb.push_back(0);
        return integrate_pieces(g, -40, 40, zb, o);
    }
    if (auto* p = std::get_if<PoissonLaw>(&c)) return poisson_sum(*p, h);
    if (auto* cy = std::get_if<CauchyLaw>(&c)) {
        for (double dir : {-1.0, 1.0})
            if (!poly_tail_finite([&](double x) { return h(cy->loc + cy->scale * x); }, dir, 2.0, "integrand"))
                return inf;
        // x = loc + scale tan(u), density becomes du / pi
        auto g = [&](double u) { return h(cy->loc + cy->scale * std::tan(u)) / pi; };
        std::vector<double> ub;
        for (double b : breaks) ub.push_back(std::atan((b - cy->loc) / cy->scale));
        double e = 1e-300;
        return integrate_pieces(g, -pi / 2 + e, pi / 2 - e, ub, o);
    }
    auto& d = std::get<DensityLaw>(c);
    auto side_ok = [&](const TailHint& t, double dir, double end) {
        if (std::isfinite(end)) return true;
        switch (t.kind) {
        case TailHint::gaussian: return true;
        case TailHint::exponential: {
            double R = 50, a = h(dir * R), b = h(dir * 2 * R);
            if (a == 0 || b == 0) return true;
            return std::log(b / a) / R < t.rate - 0.05;
        }
        case TailHint::polynomial: return poly_tail_finite(h, dir, t.rate, "integrand");
        default: throw UndefinedMoment("density '" + d.name + "' has no tail hint; moment refused");
        }
    };
    if (!side_ok(d.left, -1, d.lo) || !side_ok(d.right, 1, d.hi)) return inf;
    return integrate_pieces([&](double x) { double v = h(x); return v == 0 ? 0.0 : v * d.pdf(x); }, d.lo, d.hi,
                            breaks, o);
}

}  // namespace detail

struct MomentParts {
    double pos = 0;  // nu(f_+)
    double neg = 0;  // nu(f_-)
    bool defined() const { return !(std::isinf(pos) && std::isinf(neg)); }
    double value() const {
        if (!defined()) throw UndefinedMoment("moment of the form inf - inf");
        return pos - neg;
    }
};

// nu(f_+) and nu(f_-) separately; `breaks` lists kinks of f to split quadrature.
inline MomentParts moment_parts(const MeasureRep& nu, const std::function<double(double)>& f,
                                const std::vector<double>& breaks = {}, const QuadOptions& o = {}) {
    MomentParts r;
    for (auto& a : nu.atoms) {
        if (a.w == 0) continue;
        double v = f(a.x);
        if (std::isnan(v)) throw UndefinedMoment("function is NaN at an atom");
        if (v > 0) r.pos += a.w * v;
        else r.neg -= a.w * v;
    }
    if (nu.has_continuous() && nu.weight > 0) {
        auto fp = [&](double x) { double v = f(x); return v > 0 ? v : 0.0; };
        auto fm = [&](double x) { double v = f(x); return v < 0 ? -v : 0.0; };
        r.pos += nu.weight * detail::continuous_integral_nonneg(nu.cont, fp, breaks, o);
        r.neg += nu.weight * detail::continuous_integral_nonneg(nu.cont, fm, breaks, o);
    }
    return r;
}

inline double gmoment(const MeasureRep& nu, const std::function<double(double)>& f,
                      const std::vector<double>& breaks = {}, const QuadOptions& o = {}) {
    return moment_parts(nu, f, breaks, o).value();
}

namespace detail {

// E (Z - c)_+^n for standard normal Z, n >= 1: n! Hh_n(c).
inline double normal_partial(double c, int n) {
    constexpr double pi = std::numbers::pi;
    double phi = std::exp(-0.5 * c * c) / std::sqrt(2 * pi);
    double Q = 0.5 * boost::math::erfc(c / std::sqrt(2.0));
    if (n == 0) return Q;
    double nf = std::tgamma(n + 1.0);
    // forward recurrence is stable for c <= 0 and loses at most ~e^{2c sqrt(n)} for small c > 0
    if (c <= 1) {
        double hm1 = phi, h0 = Q;
        for (int m = 1; m <= n; ++m) {
            double h = (hm1 - c * h0) / m;
            hm1 = h0;
            h0 = h;
        }
        return nf * h0;
    }
    // backward recurrence Hh_{m-2} = m Hh_m + c Hh_{m-1}, normalised by Hh_{-1} = phi
    const int N = n + 50 + static_cast<int>(400 / (c * c));
    double hm = 0, hm1 = 1, hn = 0;  // Hh_{N+1}, Hh_N (unnormalised)
    for (int m = N + 1; m >= 1; --m) {
        double h2 = m * hm + c * hm1;  // Hh_{m-2}
        hm = hm1;
        hm1 = h2;
        if (m - 2 == n) hn = h2;
        if (std::abs(hm1) > 1e250) {
            hm *= 1e-250;
            hm1 *= 1e-250;
            hn *= 1e-250;
        }
    }
    return nf * hn * (phi / hm1);
}

inline double stirling2(int n, int k) {
    std::vector<std::vector<double>> S(n + 1, std::vector<double>(n + 1, 0.0));
    S[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= i; ++j) S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1];
    return S[n][k];
}

inline double poisson_raw_moment(double lambda, int i) {
    double s = 0;
    for (int k = 0; k <= i; ++k) s += stirling2(i, k) * std::pow(lambda, k);
    return s;
}

inline double pos_pow(double y, int n) {
    if (n == 0) return y >= 0 ? 1.0 : 0.0;
    return y > 0 ? std::pow(y, n) : 0.0;
}

}  // namespace detail

enum class MomentRoute { automatic, closed_form, summation };

// int (x - t)_+^n nu(dx), with (x - t)_+^0 read as 1{x >= t}.
inline double partial_moment(const MeasureRep& nu, double t, int n, MomentRoute route = MomentRoute::automatic,
                             const QuadOptions& o = {}) {
    require(n >= 0, "partial moment order must be nonnegative");
    double s = 0;
    for (auto& a : nu.atoms) s += a.w * detail::pos_pow(a.x - t, n);
    if (!nu.has_continuous() || nu.weight == 0) return s;
    double w = nu.weight;
    auto h = [&](double x) { return detail::pos_pow(x - t, n); };
    if (auto* nl = std::get_if<NormalLaw>(&nu.cont)) {
        if (route == MomentRoute::summation) return s + w * detail::continuous_integral_nonneg(nu.cont, h, {t}, o);
        return s + w * std::pow(nl->sd, n) * detail::normal_partial((t - nl->mean) / nl->sd, n);
    }
    if (auto* p = std::get_if<PoissonLaw>(&nu.cont)) {
        if (route == MomentRoute::summation) return s + w * detail::poisson_sum(*p, h);
        if (p->scale < 0) {
            // only the finitely many lattice points above t contribute
            double fin = 0;
            for (long k = 0; p->shift + p->scale * k >= t; ++k)
                fin += std::exp(detail::poisson_log_pmf(p->lambda, k)) * h(p->shift + p->scale * k);
            return s + w * fin;
        }
        // full moment minus the finite part below t
        double d = p->shift - t, full = 0;
        if (n == 0) full = 1;
        for (int i = 0; i <= n && n > 0; ++i)
            full += boost::math::binomial_coefficient<double>(n, i) * std::pow(d, n - i) * std::pow(p->scale, i) *
                    detail::poisson_raw_moment(p->lambda, i);
        double below = 0;
        for (long k = 0; d + p->scale * k < 0; ++k)
            below += std::exp(detail::poisson_log_pmf(p->lambda, k)) * (n == 0 ? 1.0 : std::pow(d + p->scale * k, n));
        return s + w * (full - below);
    }
    if (auto* c = std::get_if<CauchyLaw>(&nu.cont)) {
        if (n >= 1) return inf;
        return s + w * (0.5 - std::atan((t - c->loc) / c->scale) / std::numbers::pi);
    }
    return s + w * detail::continuous_integral_nonneg(nu.cont, h, {t}, o);
}

// int (t - x)_+^n nu(dx)
inline double left_partial_moment(const MeasureRep& nu, double t, int n, MomentRoute route = MomentRoute::automatic,
                                  const QuadOptions& o = {}) {
    return partial_moment(reflected(nu), -t, n, route, o);
}

// Quantile-like points of the continuous part, used to seed t-grids.
inline std::vector<double> quantile_points(const MeasureRep& nu, int count = 9) {
    std::vector<double> q;
    if (!nu.has_continuous()) return q;
    for (int i = 1; i <= count; ++i) {
        double p = static_cast<double>(i) / (count + 1);
        if (auto* n = std::get_if<NormalLaw>(&nu.cont))
            q.push_back(boost::math::quantile(boost::math::normal(n->mean, n->sd), p));
        if (auto* c = std::get_if<CauchyLaw>(&nu.cont))
            q.push_back(boost::math::quantile(boost::math::cauchy(c->loc, c->scale), p));
        if (auto* po = std::get_if<PoissonLaw>(&nu.cont))
            q.push_back(po->shift + po->scale * boost::math::quantile(boost::math::poisson(po->lambda), p));
        if (auto* d = std::get_if<DensityLaw>(&nu.cont))
            if (std::isfinite(d->lo) && std::isfinite(d->hi)) q.push_back(d->lo + p * (d->hi - d->lo));
    }
    return q;
}

}  // namespace gmono
