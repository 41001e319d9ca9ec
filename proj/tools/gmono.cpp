// gmono: command-line front end.
// Exit codes: 0 holds/dominates/member, 1 fails, 2 input error, 3 inconclusive.

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <numbers>
#include <sstream>

#include "gmono/admissibility.hpp"
#include "gmono/applications.hpp"
#include "gmono/dual_cone.hpp"
#include "gmono/io.hpp"
#include "gmono/selftest.hpp"
#include "gmono/taylor.hpp"

using namespace gmono;

namespace {

enum Exit { ok = 0, fails = 1, input_error = 2, inconclusive = 3 };

struct Globals {
    RunConfig cfg;
    std::optional<unsigned> seed;
    std::optional<double> tol;
    std::optional<int> grid;
    std::optional<std::string> format;
    std::string json_out;

    void apply() {
        if (seed) cfg.seed = *seed;
        if (tol) cfg.tol_eq = *tol;
        if (grid) cfg.grid = *grid;
        if (format) cfg.format = parse_format(*format);
        cfg.validate();
    }
};

void emit_json(const Globals& G, const json& j) {
    std::string s = j.dump(2) + "\n";
    if (!G.json_out.empty()) {
        std::ofstream out(G.json_out);
        if (!out) throw InputError(G.json_out + ": cannot write");
        out << s;
    }
    if (G.cfg.format == Format::json) std::cout << s;
}

Exit verdict_exit(Verdict v) {
    switch (v) {
    case Verdict::dominates: return ok;
    case Verdict::fails: return fails;
    default: return inconclusive;
    }
}

// "auto", a count, or lo:hi:count
std::vector<double> parse_grid_spec(const std::string& s, std::vector<double> fallback, int n_default) {
    if (s.empty() || s == "auto") return fallback;
    if (s.find(':') == std::string::npos) {
        int n = std::stoi(s);
        require(n >= 2, "grid sizes must be at least 2");
        if (fallback.empty()) return fallback;
        return linspace(fallback.front(), fallback.back(), n);
    }
    std::istringstream is(s);
    std::string a, b, c;
    std::getline(is, a, ':');
    std::getline(is, b, ':');
    std::getline(is, c, ':');
    int n = c.empty() ? n_default : std::stoi(c);
    require(n >= 2, "grid sizes must be at least 2");
    return linspace(std::stod(a), std::stod(b), n);
}

ChebFn parse_cheb(const std::string& s) {
    if (s == "rho") return ChebFn::make_rho();
    if (s.rfind("tau:", 0) == 0) return ChebFn::make_tau(std::stod(s.substr(4)));
    throw InputError("cheb functions are 'rho' or 'tau:<t>', got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gauged multiply monotone functions: cones, Taylor expansions and dual-cone dominance"};
    app.require_subcommand(1);
    Globals G;
    app.add_option("--seed", G.seed, "random seed");
    app.add_option("--tol", G.tol, "equality tolerance tol_eq");
    app.add_option("--grid", G.grid, "grid size");
    app.add_option("--format", G.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--json-out", G.json_out, "also write the JSON report to this file");

    // wpoly
    auto* wp = app.add_subcommand("wpoly", "evaluate w-polynomials and finiteness sets");
    std::string wp_gauges, wp_kind = "t", wp_part = "full";
    double wp_t = 0, wp_z = 0;
    int wp_j = 0, wp_m = 1, wp_k = 1, wp_fin = -1;
    std::vector<double> wp_x;
    wp->add_option("--gauges", wp_gauges, "gauge JSON file")->required();
    wp->add_option("--chain", wp_kind, "t (p_{t;j,m}) or az (p_{a,z;j:k:m})")->check(CLI::IsMember({"t", "az"}));
    wp->add_option("--part", wp_part)->check(CLI::IsMember({"full", "positive", "negative"}));
    wp->add_option("--t", wp_t);
    wp->add_option("--z", wp_z);
    wp->add_option("--j", wp_j);
    wp->add_option("--m", wp_m);
    wp->add_option("--k", wp_k);
    wp->add_option("--x", wp_x, "evaluation points");
    wp->add_option("--finiteness", wp_fin, "print the finiteness set for this n");

    // cone-check
    auto* cc = app.add_subcommand("cone-check", "grid-certified membership in F_+^{k:n}");
    std::string cc_fn, cc_gauges;
    int cc_k = 1, cc_n = 1;
    cc->add_option("--function", cc_fn)->required();
    cc->add_option("--gauges", cc_gauges)->required();
    cc->add_option("--k", cc_k)->required();
    cc->add_option("--n", cc_n)->required();

    // taylor
    auto* ty = app.add_subcommand("taylor", "convergence table of the truncated liftings g_y");
    std::string ty_fn, ty_gauges;
    int ty_k = 1, ty_n = 1;
    double ty_z = 0;
    std::vector<double> ty_ys;
    std::string ty_window = "-10:3:131";
    ty->add_option("--function", ty_fn, "function JSON with a 'dfn' measure")->required();
    ty->add_option("--gauges", ty_gauges)->required();
    ty->add_option("--k", ty_k)->required();
    ty->add_option("--n", ty_n)->required();
    ty->add_option("--z", ty_z);
    ty->add_option("--ys", ty_ys, "decreasing values of y")->required();
    ty->add_option("--window", ty_window, "lo:hi:count evaluation grid");

    // dominate
    auto* dm = app.add_subcommand("dominate", "check nu1(f) >= nu2(f) for all f in F_+^{k:n}");
    std::string dm_nu1, dm_nu2, dm_gauges, dm_tgrid = "auto";
    int dm_k = 1, dm_n = 1;
    std::optional<double> dm_s, dm_z;
    bool dm_reflect = false;
    dm->add_option("--nu1", dm_nu1)->required();
    dm->add_option("--nu2", dm_nu2)->required();
    dm->add_option("--gauges", dm_gauges, "gauge JSON (default: unit gauges on R)");
    dm->add_option("--k", dm_k)->required();
    dm->add_option("--n", dm_n)->required();
    dm->add_option("--s", dm_s);
    dm->add_option("--z", dm_z);
    dm->add_option("--t-grid", dm_tgrid, "auto, a count, or lo:hi:count");
    dm->add_flag("--reflected", dm_reflect, "use the reflected class F_- (unit gauges)");

    // cheb
    auto* ch = app.add_subcommand("cheb", "Chebyshev-type ratio under the standard Cauchy law");
    std::vector<std::string> ch_pair;
    int ch_scan = 0;
    ch->add_option("--pair", ch_pair, "two of rho, tau:<t>")->expected(2);
    ch->add_option("--scan", ch_scan, "scan r over {rho} and tau_t on this many points of arctan t");

    // martingale
    auto* mg = app.add_subcommand("martingale", "E(S_n - t)_+^5 against the normal bound");
    int mg_n = 5;
    std::vector<double> mg_s;
    std::string mg_t = "-8:8:41", mg_mode = "martingale";
    long mg_paths = 200000;
    mg->add_option("--n", mg_n);
    mg->add_option("--s", mg_s, "half-widths s_i of fair +-s_i steps (default all 1)");
    mg->add_option("--t-grid", mg_t);
    mg->add_option("--mode", mg_mode)->check(CLI::IsMember({"martingale", "supermartingale"}));
    mg->add_option("--paths", mg_paths, "Monte Carlo paths when n > 20");

    // left-chain
    auto* lc = app.add_subcommand("left-chain", "left-tail comparison chain for nonnegative summands");
    int lc_n = 10;
    double lc_m = 2, lc_s = 0.4;
    std::string lc_t = "-2:8:41";
    lc->add_option("--n", lc_n);
    lc->add_option("--m", lc_m);
    lc->add_option("--s", lc_s);
    lc->add_option("--t-grid", lc_t);

    // diffineq
    auto* di = app.add_subcommand("diffineq", "differential inequalities describing F_+^{k:n}");
    std::string di_gauges;
    std::vector<double> di_lambda;
    bool di_stein = false;
    int di_k = 1, di_n = 1;
    di->add_option("--gauges", di_gauges);
    di->add_option("--lambda", di_lambda, "exponential gauge rates");
    di->add_flag("--stein", di_stein, "Stein gauges (1, 1/phi, phi)");
    di->add_option("--k", di_k)->required();
    di->add_option("--n", di_n)->required();

    // selftest
    auto* st = app.add_subcommand("selftest", "run the acceptance criteria");
    bool st_strict = false;
    st->add_flag("--strict", st_strict, "exit 1 on any FAIL, including documented deviations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : input_error;
    }

    try {
        G.cfg = default_config();
        G.apply();
        auto& cfg = G.cfg;

        if (*wp) {
            GaugeSpec g = parse_gauge(read_json_file(wp_gauges), wp_gauges);
            json j{{"schema", kSchema}, {"report", "wpoly"}, {"gauges", g.describe()}};
            if (wp_fin >= 0) {
                auto F = finiteness_set(g, wp_fin);
                j["finiteness"] = F.str();
                if (cfg.format == Format::text) std::cout << F.str() << "\n";
            }
            if (!wp_x.empty()) {
                Part part = wp_part == "full" ? Part::full : wp_part == "positive" ? Part::positive : Part::negative;
                WPoly p = wp_kind == "t" ? WPoly::chain_t(g, wp_t, wp_j, wp_m, part)
                                         : WPoly::chain_az(g, wp_z, wp_j, wp_k, wp_m);
                Table t{{"x", "value"}, {}};
                for (double x : wp_x) t.rows.push_back({x, p(x)});
                j["poly"] = p.describe();
                if (auto cf = p.closed_form_string()) j["closed_form"] = *cf;
                j["values"] = t.to_json();
                if (cfg.format == Format::text) std::cout << p.describe() << "\n";
                if (cfg.format != Format::json) std::cout << t.render(cfg.format);
            }
            emit_json(G, j);
            return ok;
        }

        if (*cc) {
            GaugeSpec g = parse_gauge(read_json_file(cc_gauges), cc_gauges);
            auto fs = parse_function(read_json_file(cc_fn), g.interval(), cc_fn);
            ConeSpec cone{g, cc_k, cc_n};
            auto rep = cone_membership(fs.f, cone, default_grid(g.interval(), cfg.grid), cfg.tol_eq);
            json j{{"schema", kSchema}, {"report", "membership"}, {"member", rep.member},
                   {"grid_points", rep.grid_points}};
            json wi = json::array();
            for (double v : rep.worst_increment) wi.push_back(jnum(v));
            j["worst_increment"] = wi;
            json v = json::array();
            for (auto& m : rep.violations)
                v.push_back({{"j", m.j}, {"x0", jnum(m.x0)}, {"x1", jnum(m.x1)}, {"drop", jnum(m.drop)}});
            j["violations"] = v;
            if (cfg.format == Format::text) {
                std::cout << (rep.member ? "member" : "not a member") << " (grid-certified on " << rep.grid_points
                          << " points)\n";
                for (auto& m : rep.violations)
                    std::cout << "  f^(" << m.j << ") drops by " << t6(m.drop) << " on [" << t6(m.x0) << ", "
                              << t6(m.x1) << "]\n";
            }
            emit_json(G, j);
            return rep.member ? ok : fails;
        }

        if (*ty) {
            GaugeSpec g = parse_gauge(read_json_file(ty_gauges), ty_gauges);
            auto fs = parse_function(read_json_file(ty_fn), g.interval(), ty_fn);
            require(fs.dfn.has_value(), ty_fn + ": taylor needs the measure 'dfn' = d f^{(n)}");
            auto td = make_taylor_data(ConeSpec{g, ty_k, ty_n}, fs.f, *fs.dfn, fs.limits_at_a);
            auto prof = convergence_profile(td, ty_z, ty_ys, parse_grid_spec(ty_window, {}, 131), cfg.tol_eq);
            Table t{{"y", "sup_gap_right", "sup_gap_left"}, {}};
            for (auto& r : prof.rows) t.rows.push_back({r.y, r.gap_right, r.gap_left});
            json j{{"schema", kSchema}, {"report", "taylor"}, {"rows", t.to_json()},
                   {"nonnegative", prof.nonnegative}, {"nonincreasing", prof.nonincreasing}};
            if (cfg.format != Format::json) std::cout << t.render(cfg.format);
            emit_json(G, j);
            return prof.nonnegative && prof.nonincreasing ? ok : fails;
        }

        if (*dm) {
            GaugeSpec g = dm_gauges.empty() ? GaugeSpec::unit() : parse_gauge(read_json_file(dm_gauges), dm_gauges);
            MeasureRep nu1 = parse_measure(read_json_file(dm_nu1), dm_nu1);
            MeasureRep nu2 = parse_measure(read_json_file(dm_nu2), dm_nu2);
            auto grid = parse_grid_spec(dm_tgrid, default_t_grid(nu1, nu2, g.interval(), cfg.t_grid), cfg.t_grid);
            DominanceReport rep;
            if (dm_reflect) {
                require(g.kind() == GaugeKind::unit, "--reflected supports unit gauges only");
                UnitDominanceOptions o;
                o.tol = cfg.tol_eq;
                rep = check_dominance_reflected(nu1, nu2, dm_k, dm_n, dm_s, dm_z, grid, o);
            } else {
                DominanceOptions o;
                o.tol = cfg.tol_eq;
                rep = check_dominance(nu1, nu2, ConeSpec{g, dm_k, dm_n}, dm_s, dm_z, grid, o);
            }
            if (cfg.format == Format::text) std::cout << dominance_text(rep);
            else if (cfg.format == Format::csv) {
                Table t{{"t", "v1", "v2", "gap"}, {}};
                for (auto& c : rep.cond_iii) t.rows.push_back({c.t, c.v1, c.v2, c.gap});
                std::cout << t.render(Format::csv);
            }
            emit_json(G, dominance_json(rep));
            return verdict_exit(rep.verdict);
        }

        if (*ch) {
            json j{{"schema", kSchema}, {"report", "cheb"}};
            if (!ch_pair.empty()) {
                ChebFn f1 = parse_cheb(ch_pair[0]), f2 = parse_cheb(ch_pair[1]);
                double r = cheb_ratio(f1, f2);
                std::vector<double> br;
                for (auto* f : {&f1, &f2})
                    if (f->kind == ChebFn::tau) br.push_back(f->t);
                double q = cheb_ratio_quadrature(f1, f2, MeasureRep::cauchy(), br);
                j["pair"] = {f1.name(), f2.name()};
                j["ratio"] = r;
                j["quadrature"] = q;
                std::string frac;
                if (f1.kind == ChebFn::rho && f2.kind == ChebFn::rho) {
                    auto e = cheb_ratio_exact_rho_rho();
                    frac = std::to_string(e.numerator()) + "/" + std::to_string(e.denominator());
                    j["exact"] = frac;
                }
                if (cfg.format == Format::text) {
                    std::cout << "r(" << f1.name() << ", " << f2.name() << ") = " << fmt_num(r, 15);
                    if (!frac.empty()) std::cout << " = " << frac;
                    std::cout << "\nquadrature: " << fmt_num(q, 15) << "\n";
                } else if (cfg.format == Format::csv) {
                    std::cout << "f1,f2,ratio,quadrature\n"
                              << f1.name() << "," << f2.name() << "," << fmt_num(r, 17) << "," << fmt_num(q, 17) << "\n";
                }
            }
            if (ch_scan >= 2) {
                constexpr double pi = std::numbers::pi;
                std::vector<double> ts;
                for (double u : linspace(-pi / 2 + 0.01, pi / 2 - 0.01, ch_scan)) ts.push_back(std::tan(u));
                auto sc = cheb_minimum_scan(ts);
                Table t{{"t", "r_rho_tau"}, {}};
                for (size_t i = 0; i < ts.size(); ++i) t.rows.push_back({ts[i], sc.rho_tau[i]});
                j["scan"] = {{"min", sc.min_value}, {"argmin", sc.argmin}, {"rho_tau_increasing", sc.rho_tau_increasing},
                             {"rho_tau", t.to_json()}};
                if (cfg.format == Format::text)
                    std::cout << "minimum " << fmt_num(sc.min_value, 12) << " at (" << sc.argmin << "), r(rho, tau_t) "
                              << (sc.rho_tau_increasing ? "increasing" : "not increasing") << "\n";
                if (cfg.format != Format::json) std::cout << t.render(cfg.format);
            }
            emit_json(G, j);
            return ok;
        }

        if (*mg) {
            MartingaleModel m = MartingaleModel::fair_walk(mg_n);
            if (!mg_s.empty()) {
                require(static_cast<int>(mg_s.size()) == mg_n, "--s needs n values");
                m.s = mg_s;
                auto s = mg_s;
                m.step = [s](int i, const std::vector<double>&) { return TwoPointStep{-s[i], s[i], 0.5}; };
            }
            m.mode = mg_mode == "martingale" ? MartingaleModel::martingale : MartingaleModel::supermartingale;
            auto rep = martingale_dominance(m, parse_grid_spec(mg_t, {}, 41), cfg.seed, mg_paths);
            Table t{{"t", "lhs", "lhs_se", "rhs", "margin"}, {}};
            for (auto& r : rep.rows) t.rows.push_back({r.t, r.lhs, r.lhs_se, r.rhs, r.margin});
            json j{{"schema", kSchema}, {"report", "martingale"}, {"exact", rep.exact}, {"s", rep.s},
                   {"mean", rep.mean}, {"second_moment", rep.second}, {"holds", rep.holds},
                   {"unresolved", rep.unresolved}, {"rows", t.to_json()}};
            json cor = json::array();
            for (auto& [k, v] : rep.corollary) cor.push_back({{"k", k}, {"verdict", to_string(v)}});
            j["dual_cone"] = cor;
            if (cfg.format == Format::text) {
                std::cout << (rep.exact ? "exact enumeration" : "Monte Carlo (mean +- 3 SE)") << ", s = " << t6(rep.s)
                          << ", E S = " << t6(rep.mean) << ", E S^2 = " << t6(rep.second) << "\n";
                for (auto& [k, v] : rep.corollary) std::cout << "dual-cone check k=" << k << ": " << to_string(v) << "\n";
            }
            if (cfg.format != Format::json) std::cout << t.render(cfg.format);
            emit_json(G, j);
            if (!rep.holds) return fails;
            return rep.unresolved ? inconclusive : ok;
        }

        if (*lc) {
            auto rep = left_tail_chain(lc_n, lc_m, lc_s, parse_grid_spec(lc_t, {}, 41), std::nullopt, cfg.tol_eq);
            json links = json::array();
            for (auto& L : rep.links) {
                json d = dominance_json(L.report);
                d["link"] = L.name;
                d["min_margin"] = jnum(L.min_margin);
                links.push_back(d);
                if (cfg.format == Format::text)
                    std::cout << L.name << ": " << to_string(L.report.verdict) << ", min margin "
                              << t6(L.min_margin) << "\n";
                else if (cfg.format == Format::csv) {
                    Table t{{"t", "v1", "v2", "gap"}, {}};
                    for (auto& c : L.report.cond_iii) t.rows.push_back({c.t, c.v1, c.v2, c.gap});
                    std::cout << "# " << L.name << "\n" << t.render(Format::csv);
                }
            }
            if (cfg.format == Format::text)
                std::cout << "Poisson closed form vs summation: " << t6(rep.poisson_route_gap) << "\n";
            emit_json(G, json{{"schema", kSchema}, {"report", "left-chain"}, {"holds", rep.holds},
                              {"poisson_route_gap", jnum(rep.poisson_route_gap)}, {"links", links}});
            return rep.holds ? ok : fails;
        }

        if (*di) {
            GaugeSpec g = di_stein               ? GaugeSpec::stein()
                          : !di_gauges.empty() ? parse_gauge(read_json_file(di_gauges), di_gauges)
                          : di_lambda.empty()  ? GaugeSpec::unit()
                                               : GaugeSpec::exponential(di_lambda);
            auto sys = diffineq_system(g, di_k, di_n);
            if (cfg.format != Format::json) {
                for (auto& s : sys.inequalities) std::cout << s << "\n";
                std::cout << "extreme elements:\n";
                for (auto& s : sys.generators) std::cout << "  " << s << "\n";
                if (!sys.note.empty()) std::cout << sys.note << "\n";
            }
            emit_json(G, json{{"schema", kSchema}, {"report", "diffineq"}, {"symbolic", sys.symbolic},
                              {"inequalities", sys.inequalities}, {"generators", sys.generators}});
            return ok;
        }

        if (*st) {
            auto res = run_acceptance(cfg.seed);
            bool bad = false;
            json rows = json::array();
            for (auto& r : res) {
                bool known = std::count(known_deviations().begin(), known_deviations().end(), r.id) > 0;
                if (!r.pass && (st_strict || !known)) bad = true;
                if (cfg.format != Format::json)
                    std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail
                              << (!r.pass && known ? " [documented deviation]" : "") << "\n";
                rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
            }
            emit_json(G, json{{"schema", kSchema}, {"report", "selftest"}, {"criteria", rows}});
            return bad ? fails : ok;
        }
    } catch (const Inconclusive& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return inconclusive;
    } catch (const UndefinedMoment& e) {
        std::cerr << "undefined: " << e.what() << "\n";
        return inconclusive;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_error;
    }
    return ok;
}
