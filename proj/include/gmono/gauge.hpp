#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "jet.hpp"

namespace gmono {

// Strictly increasing smooth bijection psi from `domain` onto the gauge interval.
struct ScaleMap {
    std::string name;
    Interval domain;
    SmoothFn psi;
    SmoothFn psi_inv;

    static ScaleMap tan_map() {
        return {"tan", Interval::open(-std::numbers::pi / 2, std::numbers::pi / 2),
                SmoothFn::generic("tan", [](auto x) { using std::tan; return tan(x); }),
                SmoothFn::generic("atan", [](auto x) { using std::atan; return atan(x); })};
    }
    static ScaleMap affine(double scale, double shift, Interval target) {
        require(scale > 0, "affine scale map needs a positive slope");
        auto lo = (target.a - shift) / scale, hi = (target.b - shift) / scale;
        return {"affine", {lo, hi, target.left_closed, target.right_closed},
                SmoothFn::generic("affine", [=](auto x) { return scale * x + shift; }),
                SmoothFn::generic("affine_inv", [=](auto x) { return (x - shift) / scale; })};
    }
};

// w = exp(log_const + sum_i coeff[i] x^i); lets the inequality emitter work
// symbolically with exponential and Gaussian-type gauges.
struct LogPoly {
    double log_const = 0;
    std::vector<double> coeff;
};

struct TableEntry {
    SmoothFn fn;
    std::optional<LogPoly> log_poly;
};

inline TableEntry table_entry(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    const double ls2p = 0.5 * std::log(2 * pi);
    if (name == "one")
        return {SmoothFn::generic("one", [](auto x) { return 0.0 * x + 1.0; }), LogPoly{0, {0}}};
    if (name == "pi_plus_atan")
        return {SmoothFn::generic(name, [](auto x) { using std::atan; return atan(x) + pi; }), {}};
    if (name == "inv_one_plus_sq")
        return {SmoothFn::generic(name, [](auto x) { return 1.0 / (x * x + 1.0); }), {}};
    if (name == "normal_pdf")
        return {SmoothFn::generic(name, [=](auto x) { using std::exp; return exp(x * x * -0.5 - ls2p); }),
                LogPoly{-ls2p, {0, 0, -0.5}}};
    if (name == "inv_normal_pdf")
        return {SmoothFn::generic(name, [=](auto x) { using std::exp; return exp(x * x * 0.5 + ls2p); }),
                LogPoly{ls2p, {0, 0, 0.5}}};
    if (name.rfind("exp:", 0) == 0) {
        double c = std::stod(name.substr(4));
        return {SmoothFn::generic(name, [=](auto x) { using std::exp; return exp(x * c); }), LogPoly{0, {0, c}}};
    }
    throw InputError("unknown table gauge entry '" + name + "'");
}

enum class GaugeKind { unit, exponential, power, table, transported };

class GaugeSpec {
public:
    GaugeSpec() = default;

    static GaugeSpec unit(Interval I = Interval::real_line()) {
        GaugeSpec g;
        g.interval_ = I;
        g.kind_ = GaugeKind::unit;
        g.interval_.validate();
        return g;
    }
    static GaugeSpec exponential(std::vector<double> lambdas, Interval I = Interval::real_line()) {
        GaugeSpec g;
        g.interval_ = I;
        g.kind_ = GaugeKind::exponential;
        g.params_ = std::move(lambdas);
        g.interval_.validate();
        return g;
    }
    // w_j(x) = (x - base)^(lambda_j - 1) on an interval inside (base, inf).
    static GaugeSpec power(double base, std::vector<double> lambdas, Interval I) {
        GaugeSpec g;
        g.interval_ = I;
        g.kind_ = GaugeKind::power;
        g.base_ = base;
        g.params_ = std::move(lambdas);
        g.interval_.validate();
        require(std::isfinite(base) && I.a >= base && !I.contains(base),
                "power gauges need the interval inside (base, inf)");
        return g;
    }
    static GaugeSpec table(std::vector<TableEntry> entries, Interval I = Interval::real_line()) {
        GaugeSpec g;
        g.interval_ = I;
        g.kind_ = GaugeKind::table;
        g.table_ = std::move(entries);
        g.interval_.validate();
        return g;
    }
    static GaugeSpec table(const std::vector<std::string>& names, Interval I = Interval::real_line()) {
        std::vector<TableEntry> e;
        for (auto& n : names) e.push_back(table_entry(n));
        return table(std::move(e), I);
    }
    static GaugeSpec stein() { return table(std::vector<std::string>{"one", "inv_normal_pdf", "normal_pdf"}); }
    static GaugeSpec arctan() { return table(std::vector<std::string>{"pi_plus_atan", "inv_one_plus_sq"}); }

    const Interval& interval() const { return interval_; }
    GaugeKind kind() const { return kind_; }
    double a() const { return interval_.a; }
    double power_base() const { return base_; }
    const std::vector<double>& params() const { return params_; }

    double lambda(int j) const {
        if (kind_ == GaugeKind::unit) return 0;
        if (kind_ == GaugeKind::exponential) return j < static_cast<int>(params_.size()) ? params_[j] : 0;
        if (kind_ == GaugeKind::power) return j < static_cast<int>(params_.size()) ? params_[j] : 1;
        throw InputError("lambda() only exists for unit, exponential and power gauges");
    }

    // Evaluation without domain checks; used in inner loops.
    double raw(int j, double x) const {
        switch (kind_) {
        case GaugeKind::unit: return 1.0;
        case GaugeKind::exponential: return std::exp(lambda(j) * x);
        case GaugeKind::power: return std::pow(x - base_, lambda(j) - 1);
        case GaugeKind::table: return j < static_cast<int>(table_.size()) ? table_[j].fn(x) : 1.0;
        case GaugeKind::transported: {
            int jj = start_ + j;
            double y = map_->psi(x);
            double v = base_spec_->raw(jj, y);
            if (jj >= 1) v *= map_->psi(Jet::variable(x, 1)).c[1];
            return v;
        }
        }
        return 1.0;
    }

    double operator()(int j, double x) const {
        if (j < 0) throw InputError("negative gauge index");
        if (!interval_.contains(x))
            throw DomainError("gauge evaluated outside its interval at x=" + fmt_num(x, 17));
        double v = raw(j, x);
        if (!(v > 0) || !std::isfinite(v))
            throw DomainError("gauge w_" + std::to_string(j) + " is not positive and finite at x=" + fmt_num(x, 17));
        return v;
    }

    bool has_jets() const {
        switch (kind_) {
        case GaugeKind::unit:
        case GaugeKind::exponential:
        case GaugeKind::power: return true;
        case GaugeKind::table:
            for (auto& e : table_)
                if (!e.fn.has_jet()) return false;
            return true;
        case GaugeKind::transported: return base_spec_->has_jets() && map_->psi.has_jet();
        }
        return false;
    }

    Jet jet(int j, const Jet& x) const {
        using std::exp;
        switch (kind_) {
        case GaugeKind::unit: return Jet(1.0, x.order());
        case GaugeKind::exponential: return exp(x * lambda(j));
        case GaugeKind::power: return pow(x - base_, lambda(j) - 1);
        case GaugeKind::table:
            return j < static_cast<int>(table_.size()) ? table_[j].fn(x) : Jet(1.0, x.order());
        case GaugeKind::transported: {
            int jj = start_ + j;
            // psi' needs one more order; only the identity jet can be extended
            for (int r = 2; r <= x.order(); ++r)
                if (x.c[r] != 0) throw DomainError("transported gauge jets need the identity jet");
            if (x.order() >= 1 && x.c[1] != 1) throw DomainError("transported gauge jets need the identity jet");
            Jet ext = Jet::variable(x.value(), x.order() + 1);
            Jet y = map_->psi(ext);
            Jet v = base_spec_->jet(jj, y.truncated(x.order()));
            if (jj >= 1) v = v * y.differentiate();
            return v;
        }
        }
        return Jet(1.0, x.order());
    }

    std::optional<LogPoly> log_poly(int j) const {
        switch (kind_) {
        case GaugeKind::unit: return LogPoly{0, {0}};
        case GaugeKind::exponential: return LogPoly{0, {0, lambda(j)}};
        case GaugeKind::table:
            if (j >= static_cast<int>(table_.size())) return LogPoly{0, {0}};
            return table_[j].log_poly;
        default: return std::nullopt;
        }
    }

    // Drop the first i gauges: (w_i, w_{i+1}, ...).
    GaugeSpec shifted(int i) const {
        require(i >= 0, "negative shift");
        GaugeSpec g = *this;
        auto drop = [i](auto& v) { v.erase(v.begin(), v.begin() + std::min<size_t>(i, v.size())); };
        switch (kind_) {
        case GaugeKind::unit: break;
        case GaugeKind::exponential:
        case GaugeKind::power: drop(g.params_); break;
        case GaugeKind::table: drop(g.table_); break;
        case GaugeKind::transported: g.start_ += i; break;
        }
        return g;
    }

    // Gauges on map.domain: w~_0 = w_0 o psi, w~_j = (w_j o psi) psi'.
    GaugeSpec transported(const ScaleMap& m) const {
        require(m.psi.has_jet(), "transport needs a differentiable scale map");
        GaugeSpec g;
        g.kind_ = GaugeKind::transported;
        g.interval_ = m.domain;
        g.base_spec_ = std::make_shared<GaugeSpec>(*this);
        g.map_ = std::make_shared<ScaleMap>(m);
        g.interval_.validate();
        return g;
    }

    std::string describe() const {
        std::ostringstream os;
        auto list = [&](const std::vector<double>& v) {
            for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt_num(v[i], 6);
        };
        switch (kind_) {
        case GaugeKind::unit: os << "unit"; break;
        case GaugeKind::exponential: os << "exponential("; list(params_); os << ")"; break;
        case GaugeKind::power: os << "power(a=" << fmt_num(base_, 6) << ";"; list(params_); os << ")"; break;
        case GaugeKind::table:
            os << "table(";
            for (size_t i = 0; i < table_.size(); ++i) os << (i ? "," : "") << table_[i].fn.name();
            os << ")";
            break;
        case GaugeKind::transported:
            os << "transported(" << base_spec_->describe() << " by " << map_->name;
            if (start_) os << ", shift " << start_;
            os << ")";
            break;
        }
        return os.str();
    }

private:
    Interval interval_;
    GaugeKind kind_ = GaugeKind::unit;
    std::vector<double> params_;
    double base_ = 0;
    std::vector<TableEntry> table_;
    std::shared_ptr<const GaugeSpec> base_spec_;
    std::shared_ptr<const ScaleMap> map_;
    int start_ = 0;
};

}  // namespace gmono
