#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gmono/io.hpp"

using namespace gmono;

namespace {

std::string sample(const std::string& name) { return std::string(GMONO_SAMPLES) + "/" + name; }

std::string parse_error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Gauges, RoundTripThroughJson) {
    for (auto g : {GaugeSpec::unit(), GaugeSpec::exponential({0, -1, 2.5}),
                   GaugeSpec::power(0, {1.5, 0.5}, Interval::open(0, inf))}) {
        auto back = parse_gauge(gauge_json(g));
        EXPECT_EQ(back.describe(), g.describe());
        for (double x : {0.3, 1.0, 2.0})
            for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(back(j, x), g(j, x));
    }
    EXPECT_EQ(parse_gauge(read_json_file(sample("exp_gauges.json"))).params(),
              (std::vector<double>{0, 0, 0, -1, 2, 1}));
    EXPECT_EQ(parse_gauge(json{{"kind", "stein"}}).describe(), GaugeSpec::stein().describe());
}

TEST(Measures, RoundTripThroughJson) {
    auto n = MeasureRep::normal(0.5, 2, 3);
    n.atoms = {{-1, 0.25}};
    auto p = MeasureRep::poisson(2, -0.5, 1);
    auto c = MeasureRep::cauchy(1, 2);
    for (auto* m : {&n, &p, &c}) {
        auto back = parse_measure(measure_json(*m));
        for (double t : {-2.0, 0.0, 1.5})
            EXPECT_DOUBLE_EQ(partial_moment(back, t, 0), partial_moment(*m, t, 0));
        EXPECT_EQ(measure_json(back).dump(), measure_json(*m).dump());
    }
    auto spread = parse_measure(read_json_file(sample("jensen_spread.json")));
    EXPECT_EQ(spread.atoms.size(), 2u);
}

TEST(Measures, InfiniteValuesAsStrings) {
    auto m = parse_measure(json{{"interval", {{"a", 0}, {"b", "inf"}}}, {"atoms", {{1, 1}}}});
    EXPECT_EQ(m.interval.a, 0);
    EXPECT_EQ(m.interval.b, inf);
    EXPECT_EQ(interval_json(m.interval)["b"], "inf");
    EXPECT_EQ(jnum(inf), json("inf"));
    EXPECT_EQ(jnum(-inf), json("-inf"));
    EXPECT_EQ(jnum(std::nan("")), json("nan"));
}

TEST(Diagnostics, LocationOfBadValues) {
    auto bad = read_json_file(sample("bad_measure.json"));
    EXPECT_NE(parse_error_text([&] { parse_measure(bad); }).find("atoms/0/1"), std::string::npos);
    auto neg = json{{"atoms", {{0, 1}, {1, -2}}}};
    EXPECT_NE(parse_error_text([&] { parse_measure(neg); }).find("nonnegative"), std::string::npos);
    auto fam = json{{"continuous", {{"family", "gamma"}}}};
    EXPECT_NE(parse_error_text([&] { parse_measure(fam); }).find("/continuous/family"), std::string::npos);
    auto pieces = json{{"builtin", "custom"}, {"pieces", {{{"terms", {{1, -1}}}}}}};
    EXPECT_NE(parse_error_text([&] { parse_function(pieces, Interval::real_line()); }).find("/pieces/0/terms/0/1"),
              std::string::npos);
    EXPECT_THROW(read_json_file(sample("does_not_exist.json")), InputError);
}

TEST(Diagnostics, SchemaMismatch) {
    auto j = json{{"schema", "gmono/2"}, {"kind", "unit"}};
    EXPECT_NE(parse_error_text([&] { parse_gauge(j); }).find("/schema"), std::string::npos);
}

TEST(Functions, BuiltinsAndCustomPieces) {
    auto e = parse_function(read_json_file(sample("exp_on_R.json")), Interval::real_line());
    EXPECT_NEAR(e.f(1.0), std::exp(1.0), 1e-15);
    ASSERT_TRUE(e.limits_at_a.has_value());
    EXPECT_EQ(e.limits_at_a->size(), 3u);
    ASSERT_TRUE(e.dfn.has_value());
    // 1 + x below 0, e^x from 0 on: C^1 join
    auto j = json{{"builtin", "custom"},
                  {"pieces", {{{"terms", {{1, 0}, {1, 1}}}}, {{"from", 0}, {"terms", {{1, 0, 1}}}}}}};
    auto c = parse_function(j, Interval::real_line());
    EXPECT_DOUBLE_EQ(c.f(-2.0), -1.0);
    EXPECT_DOUBLE_EQ(c.f(1.0), std::exp(1.0));
    EXPECT_NEAR(gauged_derivative(c.f, GaugeSpec::unit(), 1, 0.5), std::exp(0.5), 1e-13);
    EXPECT_NEAR(gauged_derivative(c.f, GaugeSpec::unit(), 1, -0.5), 1.0, 1e-13);
    EXPECT_EQ(c.f.kinks, (std::vector<double>{0.0}));
}

TEST(Functions, GaugedTablesInterpolate) {
    auto j = json{{"builtin", "exp"}, {"gauged", {{{0, 1}, {1, 3}}}}};
    auto f = parse_function(j, Interval::real_line());
    ASSERT_EQ(f.f.gauged.size(), 1u);
    EXPECT_DOUBLE_EQ(f.f.gauged[0](0.5), 2.0);
    EXPECT_DOUBLE_EQ(f.f.gauged[0](5.0), 3.0);
}

TEST(Reports, DominanceJsonValidatesAndIsDeterministic) {
    auto a = parse_measure(read_json_file(sample("jensen_spread.json")));
    auto b = parse_measure(read_json_file(sample("jensen_point.json")));
    ConeSpec c{GaugeSpec::unit(), 2, 2};
    auto j1 = dominance_json(check_dominance(a, b, c));
    auto j2 = dominance_json(check_dominance(a, b, c));
    EXPECT_EQ(j1.dump(), j2.dump());
    EXPECT_NO_THROW(validate_report(j1));
    EXPECT_NO_THROW(validate_report(json::parse(j1.dump(2))));
    EXPECT_EQ(j1["verdict"], "dominates");
    EXPECT_EQ(j1["max_equality_gap"], 0);
    EXPECT_TRUE(j1["witness"].is_null());
    auto rev = dominance_json(check_dominance(b, a, c));
    EXPECT_EQ(rev["verdict"], "fails");
    EXPECT_TRUE(rev["witness"].is_string());
    auto broken = j1;
    broken["verdict"] = "maybe";
    EXPECT_THROW(validate_report(broken), InputError);
    EXPECT_NE(dominance_text(check_dominance(a, b, c)).find("verdict: dominates"), std::string::npos);
}

TEST(Reports, NumbersRoundTrip) {
    double v = 0.1 + 0.2;
    auto j = json::parse(json{{"v", jnum(v)}}.dump());
    EXPECT_EQ(j["v"].get<double>(), v);
}

TEST(Tables, CsvAndText) {
    Table t{{"t", "gap"}, {{0.5, 1.0 / 3}, {1, -inf}}};
    auto csv = t.render(Format::csv);
    EXPECT_EQ(csv.substr(0, 6), "t,gap\n");
    EXPECT_NE(csv.find("0.33333333333333331"), std::string::npos);
    auto txt = t.render(Format::text);
    EXPECT_EQ(txt.substr(0, 8), "# t gap\n");
    EXPECT_NE(txt.find("0.333333"), std::string::npos);
    auto js = t.to_json();
    EXPECT_EQ(js[1]["gap"], "-inf");
}

TEST(Config, EnvironmentOverride) {
    auto path = std::filesystem::temp_directory_path() / "gmono_test_config.json";
    {
        std::ofstream(path) << R"({"schema": "gmono/1", "tol_eq": 1e-7, "grid": 64, "format": "csv"})";
    }
    ::setenv("GMONO_CONFIG", path.c_str(), 1);
    auto c = default_config();
    ::unsetenv("GMONO_CONFIG");
    std::filesystem::remove(path);
    EXPECT_EQ(c.tol_eq, 1e-7);
    EXPECT_EQ(c.grid, 64);
    EXPECT_EQ(c.format, Format::csv);
    EXPECT_EQ(c.t_grid, RunConfig{}.t_grid);
    EXPECT_THROW(parse_config(json{{"grid", 1}}), InputError);
    EXPECT_THROW(parse_config(json{{"grid", 1.5}}), ParseError);
    EXPECT_THROW(parse_format("xml"), InputError);
}
