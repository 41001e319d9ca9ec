#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace gmono {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Error taxonomy shared by every module. The CLI maps InputError to exit 2
// and Inconclusive to exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct DomainError : InputError {
    using InputError::InputError;
};
struct UndefinedMoment : Error {
    using Error::Error;
};
struct Inconclusive : Error {
    using Error::Error;
};
struct QuadratureError : Inconclusive {
    using Inconclusive::Inconclusive;
};

// Interval with possibly infinite endpoints and explicit closedness.
struct Interval {
    double a = -inf;
    double b = inf;
    bool left_closed = false;
    bool right_closed = false;

    static Interval real_line() { return {}; }
    static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
    static Interval half_open(double lo, double hi) { return {lo, hi, true, false}; }
    static Interval open(double lo, double hi) { return {lo, hi, false, false}; }

    void validate() const {
        if (std::isnan(a) || std::isnan(b) || !(a < b))
            throw InputError("interval needs a < b");
        if (left_closed && !std::isfinite(a)) throw InputError("closed infinite endpoint");
        if (right_closed && !std::isfinite(b)) throw InputError("closed infinite endpoint");
    }
    bool contains(double x) const {
        if (std::isnan(x)) return false;
        bool lo = left_closed ? x >= a : x > a;
        bool hi = right_closed ? x <= b : x < b;
        return lo && hi;
    }
    bool a_in() const { return left_closed && std::isfinite(a); }
    // admissible base points t for chains: [a, b) with a allowed even when open
    bool valid_base(double t) const {
        if (t == a) return true;
        return contains(t) && t < b;
    }
    double clamp_inside(double x, double margin = 1e-9) const {
        double lo = std::isfinite(a) ? a + margin * (1 + std::abs(a)) : -inf;
        double hi = std::isfinite(b) ? b - margin * (1 + std::abs(b)) : inf;
        if (left_closed) lo = a;
        if (right_closed) hi = b;
        return std::min(std::max(x, lo), hi);
    }
    bool operator==(const Interval&) const = default;
};

inline std::string fmt_num(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw InputError(what);
}

}  // namespace gmono
