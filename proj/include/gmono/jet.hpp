#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace gmono {

// Truncated Taylor series at a point: c[r] = f^{(r)}(x0) / r!.
class Jet {
public:
    std::vector<double> c;

    Jet() : c(1, 0.0) {}
    Jet(double v, int order) : c(static_cast<size_t>(order) + 1, 0.0) { c[0] = v; }

    static Jet variable(double x, int order) {
        Jet j(x, order);
        if (order >= 1) j.c[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c.size()) - 1; }
    double value() const { return c[0]; }
    double deriv(int r) const {
        if (r > order()) throw DomainError("jet order too small");
        double f = 1;
        for (int i = 2; i <= r; ++i) f *= i;
        return c[r] * f;
    }
    Jet truncated(int n) const {
        Jet j;
        j.c.assign(c.begin(), c.begin() + std::min<size_t>(c.size(), n + 1));
        return j;
    }
    Jet differentiate() const {
        if (order() < 1) throw DomainError("cannot differentiate an order-0 jet");
        Jet j(0, order() - 1);
        for (int n = 0; n < order(); ++n) j.c[n] = (n + 1) * c[n + 1];
        return j;
    }
    Jet integrate(double c0) const {
        Jet j(c0, order() + 1);
        for (int n = 0; n <= order(); ++n) j.c[n + 1] = c[n] / (n + 1);
        return j;
    }

    Jet operator-() const {
        Jet j = *this;
        for (auto& v : j.c) v = -v;
        return j;
    }
    Jet& operator+=(const Jet& o) {
        shrink(o);
        for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        shrink(o);
        for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        int n = std::min(a.order(), b.order());
        Jet r(0, n);
        for (int i = 0; i <= n; ++i) {
            double s = 0;
            for (int k = 0; k <= i; ++k) s += a.c[k] * b.c[i - k];
            r.c[i] = s;
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        int n = std::min(a.order(), b.order());
        if (b.c[0] == 0) throw DomainError("jet division by zero");
        Jet r(0, n);
        for (int i = 0; i <= n; ++i) {
            double s = a.c[i];
            for (int k = 1; k <= i; ++k) s -= b.c[k] * r.c[i - k];
            r.c[i] = s / b.c[0];
        }
        return r;
    }
    friend Jet operator/(double s, const Jet& b) { return Jet(s, b.order()) / b; }

    friend Jet exp(const Jet& a) {
        Jet r(std::exp(a.c[0]), a.order());
        for (int n = 1; n <= a.order(); ++n) {
            double s = 0;
            for (int k = 1; k <= n; ++k) s += k * a.c[k] * r.c[n - k];
            r.c[n] = s / n;
        }
        return r;
    }
    friend Jet log(const Jet& a) {
        if (!(a.c[0] > 0)) throw DomainError("jet log of nonpositive value");
        Jet r(std::log(a.c[0]), a.order());
        for (int n = 1; n <= a.order(); ++n) {
            double s = 0;
            for (int k = 1; k < n; ++k) s += k * r.c[k] * a.c[n - k];
            r.c[n] = (a.c[n] - s / n) / a.c[0];
        }
        return r;
    }
    friend Jet pow(const Jet& a, double p) {
        if (p == 0) return Jet(1.0, a.order());
        if (p == std::round(p) && p > 0 && p <= 16) {
            Jet r(1.0, a.order());
            for (int i = 0; i < static_cast<int>(p); ++i) r = r * a;
            return r;
        }
        return exp(p * log(a));
    }
    friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }
    friend std::pair<Jet, Jet> sincos(const Jet& a) {
        Jet s(std::sin(a.c[0]), a.order()), co(std::cos(a.c[0]), a.order());
        for (int n = 1; n <= a.order(); ++n) {
            double ss = 0, cc = 0;
            for (int k = 1; k <= n; ++k) {
                ss += k * a.c[k] * co.c[n - k];
                cc -= k * a.c[k] * s.c[n - k];
            }
            s.c[n] = ss / n;
            co.c[n] = cc / n;
        }
        return {s, co};
    }
    friend Jet sin(const Jet& a) { return sincos(a).first; }
    friend Jet cos(const Jet& a) { return sincos(a).second; }
    friend Jet tan(const Jet& a) {
        auto [s, co] = sincos(a);
        return s / co;
    }
    friend Jet atan(const Jet& a) {
        if (a.order() == 0) return Jet(std::atan(a.c[0]), 0);
        Jet d = a.differentiate();
        Jet g = d / (1.0 + a.truncated(a.order() - 1) * a.truncated(a.order() - 1));
        return g.integrate(std::atan(a.c[0]));
    }

private:
    void shrink(const Jet& o) {
        if (o.c.size() < c.size()) c.resize(o.c.size());
    }
};

// A real function that can also be evaluated on jets (so its ordinary
// derivatives are available to any order). Plain functions have no jet.
class SmoothFn {
public:
    using Plain = std::function<double(double)>;
    using Lifted = std::function<Jet(const Jet&)>;

    SmoothFn() = default;
    SmoothFn(std::string name, Plain f, Lifted jf = {})
        : name_(std::move(name)), f_(std::move(f)), jf_(std::move(jf)) {}

    // Build from a generic callable usable with both double and Jet.
    template <class F>
    static SmoothFn generic(std::string name, F f) {
        return SmoothFn(std::move(name), [f](double x) { return f(x); },
                        [f](const Jet& x) { return f(x); });
    }

    double operator()(double x) const { return f_(x); }
    Jet operator()(const Jet& x) const {
        if (!jf_) throw DomainError("function '" + name_ + "' has no derivative information");
        return jf_(x);
    }
    bool has_jet() const { return static_cast<bool>(jf_); }
    explicit operator bool() const { return static_cast<bool>(f_); }
    const std::string& name() const { return name_; }

    // Ordinary derivatives f(x), f'(x), ..., f^{(order)}(x).
    std::vector<double> derivatives(double x, int order) const {
        Jet j = (*this)(Jet::variable(x, order));
        std::vector<double> out(order + 1);
        for (int r = 0; r <= order; ++r) out[r] = j.deriv(r);
        return out;
    }

private:
    std::string name_;
    Plain f_;
    Lifted jf_;
};

}  // namespace gmono
