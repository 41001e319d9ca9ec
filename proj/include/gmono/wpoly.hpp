#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"
#include "exp_poly.hpp"
#include "gauge.hpp"
#include "quadrature.hpp"

namespace gmono {

enum class Part { full, positive, negative };
enum class Route { automatic, closed_form, recursion };

struct ChainT {
    double t;
    int j, m;
};
struct ChainAZ {
    double z;
    int i, k, j;
};
struct Interp {
    double z;
    std::vector<double> c;
};

// Which pairs (j, m), j <= m <= n, give a finite p_{a;j,m}.
class FinitenessSet {
public:
    FinitenessSet() = default;
    explicit FinitenessSet(int n) : n_(n), f_(n + 1, std::vector<bool>(n + 1, false)) {}

    int n() const { return n_; }
    bool contains(int j, int m) const { return j >= 0 && j <= m && m <= n_ && f_[j][m]; }
    void set(int j, int m, bool v) { f_[j][m] = v; }
    // smallest j with (j, m) finite; columns are ranges [j_m, m]
    int j_min(int m) const {
        int j = m;
        while (j > 0 && f_[j - 1][m]) --j;
        return j;
    }
    bool columns_contiguous() const {
        for (int m = 0; m <= n_; ++m) {
            bool seen_finite = false;
            for (int j = 0; j <= m; ++j) {
                if (f_[j][m]) seen_finite = true;
                else if (seen_finite) return false;
            }
            if (!f_[m][m]) return false;
        }
        return true;
    }
    // F_{i,n}: m in [i, n] with (i, m) finite (row form).
    std::vector<int> row(int i, int upto = -1) const {
        if (upto < 0) upto = n_;
        std::vector<int> r;
        for (int m = i; m <= upto; ++m)
            if (contains(i, m)) r.push_back(m);
        return r;
    }
    std::string str() const {
        std::ostringstream os;
        for (int j = 0; j <= n_; ++j) {
            for (int m = 0; m <= n_; ++m) os << (m < j ? ' ' : (f_[j][m] ? 'F' : '.'));
            os << '\n';
        }
        return os.str();
    }
    bool operator==(const FinitenessSet&) const = default;

private:
    int n_ = -1;
    std::vector<std::vector<bool>> f_;
};

namespace detail {

inline bool has_closed_form(const GaugeSpec& g) { return ExpFamily::of(g).has_value(); }

// lambda_m + min_{i in [j, m-1]} sum_{s=i+1}^{m-1} lambda_s > 0
inline bool exp_criterion(const ExpFamily& fam, int j, int m) {
    if (j == m) return true;
    double best = inf;
    for (int i = j; i <= m - 1; ++i) {
        double s = 0;
        for (int q = i + 1; q <= m - 1; ++q) s += fam.rate(q);
        best = std::min(best, s);
    }
    return fam.rate(m) + best > 0;
}

inline bool a_is_regular(const GaugeSpec& g) {
    // chains from a need no limit when a belongs to the interval
    return g.interval().a_in();
}

}  // namespace detail

inline FinitenessSet finiteness_set(const GaugeSpec& g, int n, Route route = Route::automatic,
                                    const QuadOptions& o = {}) {
    require(n >= 0, "finiteness_set needs n >= 0");
    FinitenessSet F(n);
    auto fam = detail::ExpFamily::of(g);
    bool analytic = route == Route::closed_form || (route == Route::automatic && fam);
    if (route == Route::closed_form && !fam) throw InputError("no analytic finiteness criterion for " + g.describe());
    if (detail::a_is_regular(g)) {
        for (int m = 0; m <= n; ++m)
            for (int j = 0; j <= m; ++j) F.set(j, m, true);
        return F;
    }
    if (analytic) {
        bool singular_end = !std::isfinite(g.a()) || (fam->log_var && g.a() == fam->base);
        for (int m = 0; m <= n; ++m)
            for (int j = 0; j <= m; ++j) F.set(j, m, !singular_end || detail::exp_criterion(*fam, j, m));
        return F;
    }
    double x = detail::reference_point(g.interval());
    for (int m = 0; m <= n; ++m) {
        auto r = detail::ladder_from_a(g, 0, m, x, o);
        F.set(m, m, true);
        for (int j = 0; j < m; ++j) F.set(j, m, std::isfinite(r.state[j]));
    }
    if (!F.columns_contiguous()) throw Inconclusive("divergence probe produced a non-contiguous finiteness column");
    return F;
}

class WPoly {
public:
    using Family = std::variant<ChainT, ChainAZ, Interp>;

    static WPoly chain_t(const GaugeSpec& g, double t, int j, int m, Part part = Part::full,
                         Route route = Route::automatic, const QuadOptions& o = {}) {
        require(j >= 0 && j <= m, "chain_t needs 0 <= j <= m");
        require(g.interval().valid_base(t), "chain_t base point t must lie in [a, b)");
        return WPoly(g, ChainT{t, j, m}, part, route, o);
    }
    static WPoly chain_az(const GaugeSpec& g, double z, int i, int k, int j, Route route = Route::automatic,
                          const QuadOptions& o = {}) {
        require(0 <= i && i <= k && k <= j, "chain_az needs i <= k <= j");
        require(g.interval().contains(z), "chain_az needs z in the interval");
        return WPoly(g, ChainAZ{z, i, k, j}, Part::full, route, o);
    }
    static WPoly interp(const GaugeSpec& g, double z, std::vector<double> c, Route route = Route::automatic,
                        const QuadOptions& o = {}) {
        require(!c.empty(), "interpolation needs at least one coefficient");
        require(g.interval().contains(z), "interpolation point must lie in the interval");
        return WPoly(g, Interp{z, std::move(c)}, Part::full, route, o);
    }

    const GaugeSpec& gauge() const { return s_->g; }
    const Family& family() const { return s_->fam; }
    Part part() const { return s_->part; }
    Route route_used() const { return s_->closed ? Route::closed_form : Route::recursion; }

    // index of the gauge the polynomial is built on (j, i or 0)
    int base_index() const {
        if (auto* c = std::get_if<ChainT>(&s_->fam)) return c->j;
        if (auto* c = std::get_if<ChainAZ>(&s_->fam)) return c->i;
        return 0;
    }
    int top_index() const {
        if (auto* c = std::get_if<ChainT>(&s_->fam)) return c->m;
        if (auto* c = std::get_if<ChainAZ>(&s_->fam)) return c->j;
        return static_cast<int>(std::get<Interp>(s_->fam).c.size()) - 1;
    }

    // False when the polynomial is identically +inf (chain from a outside F).
    bool finite() const {
        if (std::holds_alternative<Interp>(s_->fam)) return true;
        double x = detail::reference_point(s_->g.interval());
        return std::isfinite(levels(x)[0]);
    }

    double operator()(double x) const { return gauged_raw(0, x, true); }

    // r-th gauged derivative relative to the shifted gauges S^{base} w.
    double gauged(int r, double x) const { return gauged_raw(r, x, false); }

    WPoly with_part(Part p) const {
        require(std::holds_alternative<ChainT>(s_->fam) || p == Part::full,
                "positive/negative parts are defined for chain_t polynomials");
        WPoly w = *this;
        auto s = std::make_shared<State>(*s_);
        s->part = p;
        s->cache = s_->cache;  // levels do not depend on the part
        w.s_ = s;
        return w;
    }

    std::string describe() const {
        std::ostringstream os;
        if (auto* c = std::get_if<ChainT>(&s_->fam)) {
            os << "p" << (s_->part == Part::positive ? "+" : s_->part == Part::negative ? "-" : "") << "_{"
               << fmt_num(c->t, 6) << ";" << c->j << "," << c->m << "}";
        } else if (auto* c = std::get_if<ChainAZ>(&s_->fam)) {
            os << "p_{a," << fmt_num(c->z, 6) << ";" << c->i << ":" << c->k << ":" << c->j << "}";
        } else {
            auto& ip = std::get<Interp>(s_->fam);
            os << "interp(z=" << fmt_num(ip.z, 6) << ";";
            for (size_t i = 0; i < ip.c.size(); ++i) os << (i ? "," : "") << fmt_num(ip.c[i], 6);
            os << ")";
        }
        return os.str();
    }

    // Closed-form text of w_base * V_base when the exponential family applies.
    std::optional<std::string> closed_form_string(const std::string& var = "x") const {
        if (!s_->closed || s_->closed_levels.empty() || !s_->closed_levels[0].finite) return std::nullopt;
        auto fam = detail::ExpFamily::of(s_->g);
        if (fam->log_var) return std::nullopt;
        double lam = fam->rate(base_index());
        auto ep = s_->closed_levels[0].ep.times_exp(lam);
        return ep.str(var);
    }

private:
    struct Cache {
        std::mutex mu;
        std::map<double, std::vector<double>> levels;
        std::map<double, std::vector<double>> anchors;  // recursion anchors from a
    };
    struct State {
        GaugeSpec g;
        Family fam;
        Part part;
        QuadOptions opts;
        bool closed = false;
        std::vector<detail::ClosedLevel> closed_levels;
        std::optional<detail::ExpFamily> ef;
        std::vector<WPoly> parts;  // interpolation components
        std::shared_ptr<Cache> cache;
    };
    std::shared_ptr<State> s_;

    WPoly(const GaugeSpec& g, Family fam, Part part, Route route, const QuadOptions& o) {
        s_ = std::make_shared<State>();
        s_->g = g;
        s_->fam = std::move(fam);
        s_->part = part;
        s_->opts = o;
        s_->cache = std::make_shared<Cache>();
        s_->ef = detail::ExpFamily::of(g);
        if (route == Route::closed_form && !s_->ef)
            throw InputError("no closed form available for gauges " + g.describe());
        if (auto* ip = std::get_if<Interp>(&s_->fam)) {
            for (size_t i = 0; i < ip->c.size(); ++i)
                s_->parts.push_back(chain_t(g, ip->z, 0, static_cast<int>(i), Part::full, route, o));
            s_->closed = !s_->parts.empty() && s_->parts[0].route_used() == Route::closed_form;
            return;
        }
        s_->closed = s_->ef && route != Route::recursion;
        if (s_->closed) {
            if (auto* c = std::get_if<ChainT>(&s_->fam)) {
                s_->closed_levels = detail::closed_chain_t(*s_->ef, c->t, c->j, c->m);
            } else {
                auto& az = std::get<ChainAZ>(s_->fam);
                auto F = finiteness_set(g.shifted(0), az.j, Route::automatic, o);
                require(F.contains(az.k, az.j), "chain_az needs (k, j) in the finiteness set");
                s_->closed_levels = detail::closed_chain_az(*s_->ef, g.a(), az.z, az.i, az.k, az.j);
            }
        } else if (auto* az = std::get_if<ChainAZ>(&s_->fam)) {
            auto F = finiteness_set(g, az->j, Route::automatic, o);
            require(F.contains(az->k, az->j), "chain_az needs (k, j) in the finiteness set");
        }
    }

    double indicator(double x) const {
        auto* c = std::get_if<ChainT>(&s_->fam);
        if (!c || s_->part == Part::full) return 1.0;
        bool right = x >= c->t;
        return (s_->part == Part::positive) == right ? 1.0 : 0.0;
    }

    double gauged_raw(int r, double x, bool value) const {
        const GaugeSpec& g = s_->g;
        if (!g.interval().contains(x)) throw DomainError("w-polynomial evaluated outside the interval");
        if (std::holds_alternative<Interp>(s_->fam)) {
            auto& ip = std::get<Interp>(s_->fam);
            double s = 0;
            for (size_t i = 0; i < ip.c.size(); ++i) {
                if (ip.c[i] == 0) continue;
                s += ip.c[i] * (value ? s_->parts[i](x) : s_->parts[i].gauged(r, x));
            }
            return s;
        }
        double ind = indicator(x);
        if (ind == 0) return 0.0;  // inf * 0 = 0
        int lo = base_index(), top = top_index();
        if (lo + r > top) return 0.0;
        auto lv = levels(x);
        double v = lv[r];
        if (value) v = std::isfinite(v) ? v * g(lo, x) : v;
        return v;
    }

    // V_lo..V_top at x.
    std::vector<double> levels(double x) const {
        {
            std::lock_guard<std::mutex> lk(s_->cache->mu);
            auto it = s_->cache->levels.find(x);
            if (it != s_->cache->levels.end()) return it->second;
        }
        std::vector<double> out;
        if (s_->closed) {
            double u = s_->ef->u(x);
            for (auto& l : s_->closed_levels) out.push_back(l.eval(u));
        } else {
            out = recursion_levels(x);
        }
        std::lock_guard<std::mutex> lk(s_->cache->mu);
        s_->cache->levels.emplace(x, out);
        return out;
    }

    std::vector<double> chain_from_a(int lo, int top, double x) const {
        const GaugeSpec& g = s_->g;
        if (detail::a_is_regular(g)) {
            std::vector<double> st(top - lo, 0.0);
            return detail::propagate(g, lo, top, st, g.a(), x, s_->opts);
        }
        // forward propagation from the nearest anchor at or below x avoids cancellation
        std::vector<double> anchor;
        double xa = 0;
        {
            std::lock_guard<std::mutex> lk(s_->cache->mu);
            auto& A = s_->cache->anchors;
            auto it = A.upper_bound(x);
            if (it != A.begin()) {
                --it;
                xa = it->first;
                anchor = it->second;
            }
        }
        if (anchor.empty()) {
            auto r = detail::ladder_from_a(g, lo, top, x, s_->opts);
            std::lock_guard<std::mutex> lk(s_->cache->mu);
            s_->cache->anchors.emplace(x, r.state);
            return r.state;
        }
        // levels that are infinite stay infinite; propagate the finite tail only
        int first_finite = 0;
        while (first_finite < top - lo && !std::isfinite(anchor[first_finite])) ++first_finite;
        std::vector<double> sub(anchor.begin() + first_finite, anchor.end());
        sub = detail::propagate(g, lo + first_finite, top, sub, xa, x, s_->opts);
        std::vector<double> out(anchor.begin(), anchor.begin() + first_finite);
        out.insert(out.end(), sub.begin(), sub.end());
        return out;
    }

    std::vector<double> recursion_levels(double x) const {
        const GaugeSpec& g = s_->g;
        std::vector<double> st;
        if (auto* c = std::get_if<ChainT>(&s_->fam)) {
            if (g.interval().contains(c->t)) {
                st.assign(c->m - c->j, 0.0);
                st = detail::propagate(g, c->j, c->m, st, c->t, x, s_->opts);
            } else {
                st = chain_from_a(c->j, c->m, x);
            }
        } else {
            auto& az = std::get<ChainAZ>(s_->fam);
            // levels k..j-1 from a at z, levels i..k-1 start at zero at z
            std::vector<double> base = chain_from_a(az.k, az.j, az.z);
            st.assign(az.k - az.i, 0.0);
            st.insert(st.end(), base.begin(), base.end());
            st = detail::propagate(g, az.i, az.j, st, az.z, x, s_->opts);
        }
        st.push_back(1.0);
        return st;
    }
};

// The w-polynomial in P^{<=k} (k = c.size()-1) whose gauged derivatives at z are c.
inline WPoly interpolate(const GaugeSpec& g, double z, std::vector<double> c, Route route = Route::automatic,
                         const QuadOptions& o = {}) {
    return WPoly::interp(g, z, std::move(c), route, o);
}

}  // namespace gmono
