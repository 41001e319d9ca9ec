#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "gauge.hpp"

namespace gmono::detail {

// Sum of coef * s^p * exp(r s) with s = u - center.
struct ExpPoly {
    struct Term {
        double coef;
        int p;
        double r;
    };
    double center = 0;
    std::vector<Term> terms;

    static double snap(double r, double scale) { return std::abs(r) <= 1e-12 * (1 + scale) ? 0.0 : r; }

    double eval(double u) const {
        double s = u - center, v = 0;
        for (auto& t : terms) v += t.coef * std::pow(s, t.p) * std::exp(t.r * s);
        return v;
    }
    double max_rate() const {
        double m = 0;
        for (auto& t : terms) m = std::max(m, std::abs(t.r));
        return m;
    }
    void add(Term t) {
        if (t.coef == 0) return;
        for (auto& e : terms)
            if (e.p == t.p && e.r == t.r) {
                e.coef += t.coef;
                return;
            }
        terms.push_back(t);
    }
    // multiply by exp(lambda u)
    ExpPoly times_exp(double lambda) const {
        ExpPoly o{center, {}};
        double f = std::exp(lambda * center);
        for (auto& t : terms) o.add({t.coef * f, t.p, snap(t.r + lambda, std::abs(t.r) + std::abs(lambda))});
        return o;
    }
    // integral from center to u
    ExpPoly integrate_from_center() const {
        ExpPoly o{center, {}};
        for (auto& t : terms) {
            if (t.r == 0) {
                o.add({t.coef / (t.p + 1), t.p + 1, 0});
                continue;
            }
            // int_0^s x^p e^{rx} dx = sum_i (-1)^{p-i} p!/(i! r^{p-i+1}) s^i e^{rs} - (-1)^p p!/r^{p+1}
            double pf = std::tgamma(t.p + 1.0);
            for (int i = 0; i <= t.p; ++i) {
                double c = ((t.p - i) % 2 ? -1 : 1) * pf / (std::tgamma(i + 1.0) * std::pow(t.r, t.p - i + 1));
                o.add({t.coef * c, i, t.r});
            }
            o.add({-t.coef * (t.p % 2 ? -1 : 1) * pf / std::pow(t.r, t.p + 1), 0, 0});
        }
        return o;
    }
    // integral from -inf to u; nullopt when divergent
    std::optional<ExpPoly> integrate_from_minus_inf() const {
        ExpPoly o{center, {}};
        for (auto& t : terms) {
            if (t.coef == 0) continue;
            if (!(t.r > 0)) return std::nullopt;
            double pf = std::tgamma(t.p + 1.0);
            for (int i = 0; i <= t.p; ++i) {
                double c = ((t.p - i) % 2 ? -1 : 1) * pf / (std::tgamma(i + 1.0) * std::pow(t.r, t.p - i + 1));
                o.add({t.coef * c, i, t.r});
            }
        }
        return o;
    }
    // Taylor coefficients about u0, orders 0..N
    std::vector<double> taylor_at(double u0, int N) const {
        std::vector<double> c(N + 1, 0.0);
        double s0 = u0 - center;
        for (auto& t : terms) {
            double e = t.coef * std::exp(t.r * s0);
            for (int n = 0; n <= N; ++n) {
                double acc = 0;
                for (int i = 0; i <= std::min(t.p, n); ++i) {
                    double binom = std::tgamma(t.p + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(t.p - i + 1.0));
                    acc += binom * std::pow(s0, t.p - i) * std::pow(t.r, n - i) / std::tgamma(n - i + 1.0);
                }
                c[n] += e * acc;
            }
        }
        return c;
    }

    std::string str(const std::string& var = "x") const {
        std::ostringstream os;
        bool first = true;
        std::string s = center == 0 ? var : "(" + var + (center > 0 ? "-" : "+") + fmt_num(std::abs(center), 6) + ")";
        for (auto& t : terms) {
            if (std::abs(t.coef) < 1e-15) continue;
            double c = t.coef;
            os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
            first = false;
            bool bare = t.p > 0 || t.r != 0;
            if (!(bare && std::abs(std::abs(c) - 1) < 1e-14)) os << fmt_num(std::abs(c), 6) << (bare ? "*" : "");
            if (t.p > 0) os << s << (t.p > 1 ? "^" + std::to_string(t.p) : "") << (t.r != 0 ? "*" : "");
            if (t.r != 0) os << "exp(" << (t.r == 1 ? "" : fmt_num(t.r, 6) + "*") << s << ")";
        }
        return first ? "0" : os.str();
    }
};

// Local power series in s = u - center.
struct Series {
    double center = 0;
    std::vector<double> c;
    double eval(double u) const {
        double s = u - center, v = 0;
        for (size_t n = c.size(); n-- > 0;) v = v * s + c[n];
        return v;
    }
};

inline constexpr int kSeriesTerms = 40;

// One level V_l = p_l / w_l of a closed-form chain.
struct ClosedLevel {
    bool finite = true;
    ExpPoly ep;
    std::optional<Series> local;
    double rate_bound = 0;

    double eval(double u) const {
        if (!finite) return inf;
        if (local && std::abs(u - local->center) * (rate_bound + 1e-300) <= 0.5) return local->eval(u);
        return ep.eval(u);
    }
};

inline Series series_times_exp(const Series& s, double lambda) {
    int N = static_cast<int>(s.c.size()) - 1;
    double f = std::exp(lambda * s.center);
    std::vector<double> e(N + 1);
    e[0] = f;
    for (int n = 1; n <= N; ++n) e[n] = e[n - 1] * lambda / n;
    Series o{s.center, std::vector<double>(N + 1, 0.0)};
    for (int n = 0; n <= N; ++n)
        for (int k = 0; k <= n; ++k) o.c[n] += e[k] * s.c[n - k];
    return o;
}
inline Series series_integrate(const Series& s) {
    Series o{s.center, std::vector<double>(s.c.size(), 0.0)};
    for (size_t n = 0; n + 1 < s.c.size(); ++n) o.c[n + 1] = s.c[n] / (n + 1);
    return o;
}

// Exponential-family view of a gauge: u-variable and rates per index.
struct ExpFamily {
    bool log_var = false;  // u = ln(x - base) for power gauges
    double base = 0;
    GaugeSpec g;

    static std::optional<ExpFamily> of(const GaugeSpec& g) {
        switch (g.kind()) {
        case GaugeKind::unit:
        case GaugeKind::exponential: return ExpFamily{false, 0, g};
        case GaugeKind::power: return ExpFamily{true, g.power_base(), g};
        default: return std::nullopt;
        }
    }
    double rate(int j) const {
        if (!log_var) return g.lambda(j);
        return j == 0 ? g.lambda(0) - 1 : g.lambda(j);
    }
    double u(double x) const {
        if (!log_var) return x;
        return x == base ? -inf : std::log(x - base);
    }
};

// Levels V_lo..V_top (index l - lo) for p_{t;l,top}.
inline std::vector<ClosedLevel> closed_chain_t(const ExpFamily& fam, double t, int lo, int top) {
    std::vector<ClosedLevel> lv(top - lo + 1);
    double ut = fam.u(t);
    ClosedLevel cur;
    cur.ep = ExpPoly{std::isfinite(ut) ? ut : 0.0, {{1.0, 0, 0.0}}};
    if (std::isfinite(ut)) {
        Series s{ut, std::vector<double>(kSeriesTerms + 1, 0.0)};
        s.c[0] = 1;
        cur.local = s;
    }
    lv[top - lo] = cur;
    for (int l = top - 1; l >= lo; --l) {
        ClosedLevel nx;
        const ClosedLevel& up = lv[l + 1 - lo];
        double lam = fam.rate(l + 1);
        nx.rate_bound = std::max(up.rate_bound, up.ep.max_rate()) + std::abs(lam);
        if (!up.finite) {
            nx.finite = false;
        } else if (std::isfinite(ut)) {
            nx.ep = up.ep.times_exp(lam).integrate_from_center();
            nx.local = series_integrate(series_times_exp(*up.local, lam));
        } else {
            auto r = up.ep.times_exp(lam).integrate_from_minus_inf();
            if (r) nx.ep = *r; else nx.finite = false;
        }
        nx.rate_bound = std::max(nx.rate_bound, nx.ep.max_rate());
        lv[l - lo] = nx;
    }
    return lv;
}

// Levels V_i..V_j for p_{a,z;l:k:j}: l >= k from a, l < k integrated from z.
inline std::vector<ClosedLevel> closed_chain_az(const ExpFamily& fam, double a, double z, int i, int k, int j) {
    auto base = closed_chain_t(fam, a, k, j);
    std::vector<ClosedLevel> lv(j - i + 1);
    for (int l = k; l <= j; ++l) lv[l - i] = base[l - k];
    double uz = fam.u(z);
    for (int l = k - 1; l >= i; --l) {
        const ClosedLevel& up = lv[l + 1 - i];
        ClosedLevel nx;
        double lam = fam.rate(l + 1);
        if (!up.finite) throw DomainError("chain_az needs (k,j) in the finiteness set");
        // integrand as a series about z: base levels are expanded, later levels already live there
        Series s = l == k - 1 ? Series{uz, up.ep.taylor_at(uz, kSeriesTerms)} : *up.local;
        ExpPoly shifted{uz, {}};
        for (auto& t : up.ep.terms) {
            // rewrite coef*(u-c)^p e^{r(u-c)} around uz
            double d = uz - up.ep.center;
            double e = std::exp(t.r * d);
            for (int q = 0; q <= t.p; ++q) {
                double binom = std::tgamma(t.p + 1.0) / (std::tgamma(q + 1.0) * std::tgamma(t.p - q + 1.0));
                shifted.add({t.coef * e * binom * std::pow(d, t.p - q), q, t.r});
            }
        }
        nx.ep = shifted.times_exp(lam).integrate_from_center();
        nx.local = series_integrate(series_times_exp(s, lam));
        nx.rate_bound = std::max(up.rate_bound, nx.ep.max_rate()) + std::abs(lam);
        lv[l - i] = nx;
    }
    return lv;
}

}  // namespace gmono::detail
