#pragma once

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "applications.hpp"
#include "dual_cone.hpp"
#include "gderiv.hpp"
#include "measures.hpp"
#include "taylor.hpp"

namespace gmono {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "gmono/1";

enum class Format { text, json, csv };

inline Format parse_format(const std::string& s) {
    if (s == "text") return Format::text;
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    throw InputError("unknown format '" + s + "' (text, json, csv)");
}

struct RunConfig {
    double tol_eq = 1e-9;
    double quad_abs = 1e-10;
    double quad_rel = 1e-10;
    int grid = 512;
    int t_grid = 64;
    unsigned seed = 20240601;
    Format format = Format::text;
    int threads = 0;  // 0: hardware default

    void validate() const {
        require(tol_eq > 0 && quad_abs > 0 && quad_rel > 0, "tolerances must be positive");
        require(grid >= 2 && t_grid >= 2, "grid sizes must be at least 2");
        require(threads >= 0, "parallelism degree must be nonnegative");
    }
};

// Parse errors carry a JSON-pointer-like location.
struct ParseError : InputError {
    ParseError(const std::string& where, const std::string& what) : InputError(where + ": " + what) {}
};

namespace io_detail {

inline std::string at(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string at(const std::string& base, size_t i) { return base + "/" + std::to_string(i); }

inline double num(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return inf;
        if (s == "-inf") return -inf;
    }
    throw ParseError(where, "expected a number or \"inf\"/\"-inf\"");
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where, "missing field '" + key + "'");
    return *it;
}

inline double num_or(const json& j, const std::string& key, double dflt, const std::string& where) {
    auto it = j.find(key);
    return it == j.end() ? dflt : num(*it, at(where, key));
}

inline int int_field(const json& j, const std::string& key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer()) throw ParseError(at(where, key), "expected an integer");
    return v.get<int>();
}

inline void check_schema(const json& j, const std::string& where) {
    if (j.is_object() && j.contains("schema") && j["schema"] != kSchema)
        throw ParseError(at(where, "schema"), "unsupported schema (expected gmono/1)");
}

}  // namespace io_detail

// Numbers in reports: finite values as JSON numbers (shortest round-trip form),
// non-finite ones as strings.
inline json jnum(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// RunConfig

inline RunConfig parse_config(const json& j, RunConfig c = {}, const std::string& where = "") {
    using namespace io_detail;
    check_schema(j, where);
    c.tol_eq = num_or(j, "tol_eq", c.tol_eq, where);
    c.quad_abs = num_or(j, "quad_abs", c.quad_abs, where);
    c.quad_rel = num_or(j, "quad_rel", c.quad_rel, where);
    if (j.contains("grid")) c.grid = int_field(j, "grid", where);
    if (j.contains("t_grid")) c.t_grid = int_field(j, "t_grid", where);
    if (j.contains("seed")) c.seed = static_cast<unsigned>(int_field(j, "seed", where));
    if (j.contains("threads")) c.threads = int_field(j, "threads", where);
    if (j.contains("format")) c.format = parse_format(field(j, "format", where).get<std::string>());
    c.validate();
    return c;
}

// Defaults, overridden by the file named in GMONO_CONFIG when set.
inline RunConfig default_config() {
    RunConfig c;
    if (const char* p = std::getenv("GMONO_CONFIG"); p && *p) c = parse_config(read_json_file(p), c, p);
    return c;
}

// ---------------------------------------------------------------------------
// Gauges

inline Interval parse_interval(const json& j, const std::string& where = "/interval") {
    using namespace io_detail;
    Interval I;
    I.a = num_or(j, "a", -inf, where);
    I.b = num_or(j, "b", inf, where);
    if (j.contains("left_closed")) I.left_closed = field(j, "left_closed", where).get<bool>();
    if (j.contains("right_closed")) I.right_closed = field(j, "right_closed", where).get<bool>();
    try {
        I.validate();
    } catch (const InputError& e) {
        throw ParseError(where, e.what());
    }
    return I;
}

inline json interval_json(const Interval& I) {
    return {{"a", jnum(I.a)}, {"b", jnum(I.b)}, {"left_closed", I.left_closed}, {"right_closed", I.right_closed}};
}

inline GaugeSpec parse_gauge(const json& j, const std::string& where = "") {
    using namespace io_detail;
    check_schema(j, where);
    Interval I = j.contains("interval") ? parse_interval(j["interval"], at(where, "interval")) : Interval::real_line();
    const std::string kind = field(j, "kind", where).get<std::string>();
    std::vector<double> params;
    if (j.contains("params")) {
        const json& p = j["params"];
        if (!p.is_array()) throw ParseError(at(where, "params"), "expected an array");
        if (kind != "table")
            for (size_t i = 0; i < p.size(); ++i) params.push_back(num(p[i], at(at(where, "params"), i)));
    }
    try {
        if (kind == "unit") return GaugeSpec::unit(I);
        if (kind == "exponential") return GaugeSpec::exponential(params, I);
        if (kind == "power") {
            double base = j.contains("base") ? num(j["base"], at(where, "base")) : I.a;
            return GaugeSpec::power(base, params, I);
        }
        if (kind == "table") {
            std::vector<std::string> names;
            for (auto& e : field(j, "params", where)) names.push_back(e.get<std::string>());
            return GaugeSpec::table(names, I);
        }
        if (kind == "stein") return GaugeSpec::stein();
        if (kind == "arctan") return GaugeSpec::arctan();
    } catch (const ParseError&) {
        throw;
    } catch (const InputError& e) {
        throw ParseError(where, e.what());
    }
    throw ParseError(at(where, "kind"), "unknown gauge kind '" + kind + "'");
}

inline json gauge_json(const GaugeSpec& g) {
    json j{{"schema", kSchema}, {"interval", interval_json(g.interval())}};
    switch (g.kind()) {
    case GaugeKind::unit: j["kind"] = "unit"; break;
    case GaugeKind::exponential: j["kind"] = "exponential"; j["params"] = g.params(); break;
    case GaugeKind::power:
        j["kind"] = "power";
        j["base"] = jnum(g.power_base());
        j["params"] = g.params();
        break;
    default: j["kind"] = "other"; j["describe"] = g.describe(); break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Measures

inline MeasureRep parse_measure(const json& j, const std::string& where = "") {
    using namespace io_detail;
    check_schema(j, where);
    if (!j.is_object()) throw ParseError(where, "expected an object");
    MeasureRep m;
    if (j.contains("interval")) m.interval = parse_interval(j["interval"], at(where, "interval"));
    if (j.contains("atoms")) {
        const json& a = j["atoms"];
        if (!a.is_array()) throw ParseError(at(where, "atoms"), "expected an array of [x, w]");
        for (size_t i = 0; i < a.size(); ++i) {
            std::string w = at(at(where, "atoms"), i);
            if (!a[i].is_array() || a[i].size() != 2) throw ParseError(w, "expected [x, w]");
            m.atoms.push_back({num(a[i][0], at(w, 0)), num(a[i][1], at(w, 1))});
        }
    }
    if (j.contains("continuous") && !j["continuous"].is_null()) {
        const json& c = j["continuous"];
        std::string w = at(where, "continuous");
        const std::string fam = field(c, "family", w).get<std::string>();
        m.weight = num_or(c, "weight", 1.0, w);
        if (fam == "normal") m.cont = NormalLaw{num_or(c, "mean", 0, w), num_or(c, "sd", 1, w)};
        else if (fam == "poisson")
            m.cont = PoissonLaw{num(field(c, "lambda", w), at(w, "lambda")), num_or(c, "scale", 1, w),
                                num_or(c, "shift", 0, w)};
        else if (fam == "cauchy") m.cont = CauchyLaw{num_or(c, "loc", 0, w), num_or(c, "scale", 1, w)};
        else if (fam == "uniform") {
            double lo = num_or(c, "lo", 0, w), hi = num_or(c, "hi", 1, w);
            if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ParseError(w, "uniform needs lo < hi");
            m.cont = DensityLaw{"uniform", [lo, hi](double x) { return x >= lo && x <= hi ? 1 / (hi - lo) : 0.0; },
                                lo, hi, {}, {}};
        } else if (fam == "exponential") {
            double rate = num_or(c, "rate", 1, w), lo = num_or(c, "lo", 0, w);
            if (!(rate > 0)) throw ParseError(w, "exponential needs rate > 0");
            m.cont = DensityLaw{"exponential", [rate, lo](double x) { return x >= lo ? rate * std::exp(-rate * (x - lo)) : 0.0; },
                                lo, inf, {}, {TailHint::exponential, rate}};
        } else if (fam == "exp_tilt") {
            // e^{rate x} dx on (lo, hi); infinite mass, useful as d f^{(n)} for f = exp
            double rate = num_or(c, "rate", 1, w), lo = num_or(c, "lo", -inf, w), hi = num_or(c, "hi", inf, w);
            if (!(rate > 0)) throw ParseError(w, "exp_tilt needs rate > 0");
            m.cont = DensityLaw{"exp_tilt", [rate](double x) { return std::exp(rate * x); }, lo, hi,
                                {TailHint::exponential, rate}, {}};
        } else
            throw ParseError(at(w, "family"), "unknown family '" + fam + "'");
    }
    try {
        m.validate();
    } catch (const InputError& e) {
        throw ParseError(where, e.what());
    }
    return m;
}

inline json measure_json(const MeasureRep& m) {
    json j{{"schema", kSchema}};
    json atoms = json::array();
    for (auto& a : m.atoms) atoms.push_back({jnum(a.x), jnum(a.w)});
    j["atoms"] = atoms;
    json c = nullptr;
    if (auto* p = std::get_if<NormalLaw>(&m.cont)) c = {{"family", "normal"}, {"mean", p->mean}, {"sd", p->sd}};
    else if (auto* p = std::get_if<PoissonLaw>(&m.cont))
        c = {{"family", "poisson"}, {"lambda", p->lambda}, {"scale", p->scale}, {"shift", p->shift}};
    else if (auto* p = std::get_if<CauchyLaw>(&m.cont)) c = {{"family", "cauchy"}, {"loc", p->loc}, {"scale", p->scale}};
    else if (auto* p = std::get_if<DensityLaw>(&m.cont))
        c = {{"family", p->name}, {"lo", jnum(p->lo)}, {"hi", jnum(p->hi)}};
    if (!c.is_null()) c["weight"] = jnum(m.weight);
    j["continuous"] = c;
    return j;
}

// ---------------------------------------------------------------------------
// Functions

struct FunctionSpec {
    FunctionRep f;
    std::optional<std::vector<double>> limits_at_a;  // f^{(i)}(a+), i = 0..n
    std::optional<MeasureRep> dfn;
};

namespace io_detail {

// c x^p exp(l x); p a nonnegative integer so jets see plain products
struct ExpTerm {
    double c = 0;
    int p = 0;
    double l = 0;
};

template <class T>
T eval_terms(const std::vector<ExpTerm>& ts, const T& x) {
    using std::exp;
    T s = x * 0.0;
    for (auto& t : ts) {
        T v = exp(x * t.l) * t.c;
        for (int i = 0; i < t.p; ++i) v = v * x;
        s = s + v;
    }
    return s;
}

}  // namespace io_detail

inline FunctionSpec parse_function(const json& j, const Interval& I, const std::string& where = "") {
    using namespace io_detail;
    check_schema(j, where);
    FunctionSpec out;
    const std::string b = field(j, "builtin", where).get<std::string>();
    if (b == "exp") {
        double l = num_or(j, "rate", 1, where);
        out.f = FunctionRep::generic("exp", [l](auto x) { using std::exp; return exp(x * l); }, I);
    } else if (b == "power") {
        double p = num(field(j, "p", where), at(where, "p"));
        out.f = FunctionRep::generic("power", [p](auto x) { using std::pow; return pow(x, p); }, I);
    } else if (b == "rem_left_example") {
        out.f = rem_left_example(int_field(j, "k", where), int_field(j, "n", where));
        out.f.interval = I;
    } else if (b == "custom") {
        // pieces: [{"from": x0, "terms": [[c, p, l], ...]}, ...] sorted by "from"
        const json& ps = field(j, "pieces", where);
        if (!ps.is_array() || ps.empty()) throw ParseError(at(where, "pieces"), "expected a nonempty array");
        std::vector<std::pair<double, std::vector<ExpTerm>>> pieces;
        for (size_t i = 0; i < ps.size(); ++i) {
            std::string w = at(at(where, "pieces"), i);
            double from = num_or(ps[i], "from", -inf, w);
            std::vector<ExpTerm> ts;
            const json& tj = field(ps[i], "terms", w);
            for (size_t r = 0; r < tj.size(); ++r) {
                std::string wr = at(at(w, "terms"), r);
                if (!tj[r].is_array() || tj[r].size() < 2) throw ParseError(wr, "expected [c, p] or [c, p, l]");
                ExpTerm t{num(tj[r][0], at(wr, 0)), tj[r][1].get<int>(), tj[r].size() > 2 ? num(tj[r][2], at(wr, 2)) : 0};
                if (t.p < 0) throw ParseError(at(wr, 1), "power must be a nonnegative integer");
                ts.push_back(t);
            }
            if (!pieces.empty() && !(from > pieces.back().first)) throw ParseError(w, "pieces must be sorted by 'from'");
            pieces.emplace_back(from, std::move(ts));
        }
        auto pick = [pieces](double x) -> const std::vector<ExpTerm>& {
            size_t i = 0;
            while (i + 1 < pieces.size() && x >= pieces[i + 1].first) ++i;
            return pieces[i].second;
        };
        out.f.name = j.value("name", std::string("custom"));
        out.f.interval = I;
        out.f.f = SmoothFn::generic(out.f.name, [pick](auto x) {
            double x0;
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) x0 = x;
            else x0 = x.value();
            return eval_terms(pick(x0), x);
        });
        for (size_t i = 1; i < pieces.size(); ++i) out.f.kinks.push_back(pieces[i].first);
    } else {
        throw ParseError(at(where, "builtin"), "unknown builtin '" + b + "'");
    }
    if (j.contains("limits_at_a")) {
        std::vector<double> v;
        for (size_t i = 0; i < j["limits_at_a"].size(); ++i) v.push_back(num(j["limits_at_a"][i], at(at(where, "limits_at_a"), i)));
        out.limits_at_a = v;
    }
    if (j.contains("dfn")) out.dfn = parse_measure(j["dfn"], at(where, "dfn"));
    // explicit gauged data tables: {"gauged": [[[x, v], ...], ...]} interpolated linearly
    if (j.contains("gauged")) {
        const json& gt = j["gauged"];
        for (size_t r = 0; r < gt.size(); ++r) {
            std::vector<std::pair<double, double>> pts;
            for (size_t i = 0; i < gt[r].size(); ++i) {
                std::string w = at(at(at(where, "gauged"), r), i);
                pts.emplace_back(num(gt[r][i][0], at(w, 0)), num(gt[r][i][1], at(w, 1)));
            }
            if (pts.size() < 2) throw ParseError(at(at(where, "gauged"), r), "need at least two points");
            out.f.gauged.push_back([pts](double x) {
                auto it = std::lower_bound(pts.begin(), pts.end(), x, [](auto& p, double v) { return p.first < v; });
                if (it == pts.begin()) return pts.front().second;
                if (it == pts.end()) return pts.back().second;
                auto lo = *(it - 1), hi = *it;
                return lo.second + (hi.second - lo.second) * (x - lo.first) / (hi.first - lo.first);
            });
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports

inline json moment_check_json(const MomentCheck& c, bool with_t) {
    json j;
    if (with_t) j["t"] = jnum(c.t);
    else j["index"] = c.index;
    j["v1"] = jnum(c.v1);
    j["v2"] = jnum(c.v2);
    j["gap"] = jnum(c.gap);
    j["ok"] = c.ok;
    j["decided"] = c.decided;
    return j;
}

inline json dominance_json(const DominanceReport& r) {
    json j{{"schema", kSchema}, {"report", "dominance"}, {"verdict", to_string(r.verdict)}};
    j["s"] = jnum(r.s);
    j["z"] = jnum(r.z);
    for (auto [name, v] : {std::pair{"cond_i", &r.cond_i}, {"cond_ii", &r.cond_ii}, {"cond_iii", &r.cond_iii}}) {
        json a = json::array();
        for (auto& c : *v) a.push_back(moment_check_json(c, v == &r.cond_iii));
        j[name] = a;
    }
    double mean_gap = 0;
    for (auto& c : r.cond_i)
        if (std::isfinite(c.gap)) mean_gap = std::max(mean_gap, std::abs(c.gap));
    j["max_equality_gap"] = jnum(mean_gap);
    j["witness"] = r.verdict == Verdict::fails ? json(r.witness_desc) : json(nullptr);
    j["witness_gap"] = jnum(r.witness_gap);
    j["certification"] = r.certification;
    return j;
}

// Validates a report against the published layout; used by the round-trip tests.
inline void validate_report(const json& j) {
    using namespace io_detail;
    require(j.is_object(), "report must be an object");
    require(j.value("schema", "") == kSchema, "report schema must be gmono/1");
    require(j.contains("report") && j["report"].is_string(), "report kind missing");
    auto isnum = [](const json& v) {
        return v.is_number() || (v.is_string() && (v == "inf" || v == "-inf" || v == "nan"));
    };
    const std::string kind = j["report"];
    if (kind == "dominance") {
        require(j.contains("verdict") && (j["verdict"] == "dominates" || j["verdict"] == "fails" ||
                                          j["verdict"] == "inconclusive"),
                "dominance report needs a verdict");
        for (const char* c : {"cond_i", "cond_ii", "cond_iii"}) {
            require(j.contains(c) && j[c].is_array(), std::string("dominance report needs ") + c);
            for (auto& e : j[c]) require(isnum(e["v1"]) && isnum(e["v2"]) && isnum(e["gap"]), "bad moment entry");
        }
    }
}

// Text helpers: 6 significant digits.
inline std::string t6(double v) { return fmt_num(v, 6); }

inline std::string dominance_text(const DominanceReport& r) {
    std::ostringstream os;
    os << "verdict: " << to_string(r.verdict) << "\n";
    os << "s = " << t6(r.s) << ", z = " << t6(r.z) << "\n";
    auto worst = [](const std::vector<MomentCheck>& v) {
        double m = inf;
        for (auto& c : v)
            if (!std::isnan(c.gap)) m = std::min(m, c.gap);
        return m;
    };
    os << "(i')   equalities: " << r.cond_i.size() << ", all ok: "
       << (std::all_of(r.cond_i.begin(), r.cond_i.end(), [](auto& c) { return c.ok; }) ? "yes" : "no") << "\n";
    os << "(ii')  inequalities: " << r.cond_ii.size() << ", min gap: " << t6(worst(r.cond_ii)) << "\n";
    os << "(iii)  positive parts: " << r.cond_iii.size() << ", min gap: " << t6(worst(r.cond_iii)) << "\n";
    if (r.verdict == Verdict::fails) os << "witness: " << r.witness_desc << " (gap " << t6(r.witness_gap) << ")\n";
    os << r.certification << "\n";
    return os.str();
}

// Simple table rendering shared by all subcommands.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string render(Format f) const {
        std::ostringstream os;
        if (f == Format::csv) {
            for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
            os << "\n";
            for (auto& r : rows) {
                for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt_num(r[i], 17);
                os << "\n";
            }
        } else {
            // gnuplot-friendly: header as a comment, whitespace-separated columns
            os << "#";
            for (auto& h : header) os << " " << h;
            os << "\n";
            for (auto& r : rows) {
                for (size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << t6(r[i]);
                os << "\n";
            }
        }
        return os.str();
    }
    json to_json() const {
        json a = json::array();
        for (auto& r : rows) {
            json o;
            for (size_t i = 0; i < r.size(); ++i) o[header[i]] = jnum(r[i]);
            a.push_back(o);
        }
        return a;
    }
};

}  // namespace gmono
