#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <random>

#include "gmono/wpoly.hpp"

using namespace gmono;

namespace {

// p_{t;j,m}(x) = w_j(x) * int_t^x p_{t;j+1,m}, p_{t;m,m} = w_m, by nested Gauss-Legendre.
double nested(const GaugeSpec& g, double t, int j, int m, double x) {
    if (j == m) return g(m, x);
    if (x == t) return 0;
    double in = boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double y) { return nested(g, t, j + 1, m, y); }, t, x);
    return g(j, x) * in;
}

double fact(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(WPolyUnit, ChainMatchesTruncatedPowers) {
    auto u = GaugeSpec::unit();
    for (int m = 0; m <= 5; ++m)
        for (int j = 0; j <= m; ++j)
            for (double x : {-2.0, -0.3, 0.0, 1.7}) {
                double want = std::pow(x - 0.5, m - j) / fact(m - j);
                EXPECT_NEAR(WPoly::chain_t(u, 0.5, j, m)(x), want, 1e-13 * (1 + std::abs(want)));
            }
}

TEST(WPolyUnit, PartsSplitAtT) {
    auto u = GaugeSpec::unit();
    auto p = WPoly::chain_t(u, 0.5, 0, 3);
    auto pp = p.with_part(Part::positive), pn = p.with_part(Part::negative);
    for (double x : {-1.0, 0.2, 0.5, 0.9, 3.0}) {
        EXPECT_DOUBLE_EQ(pp(x) + pn(x), p(x));
        EXPECT_EQ(pp(x), x >= 0.5 ? p(x) : 0.0);
    }
    EXPECT_EQ(pp.describe(), "p+_{0.5;0,3}");
}

TEST(WPolyRecursion, AgreesWithClosedFormOnRandomExponentialGauges) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> L(-1.5, 1.5), X(-2, 2);
    for (int trial = 0; trial < 25; ++trial) {
        int m = 1 + static_cast<int>(rng() % 4);
        std::vector<double> lam;
        for (int i = 0; i <= m; ++i) lam.push_back(L(rng));
        auto g = GaugeSpec::exponential(lam);
        double t = X(rng), x = X(rng);
        int j = static_cast<int>(rng() % (m + 1));
        double c = WPoly::chain_t(g, t, j, m)(x);
        double r = WPoly::chain_t(g, t, j, m, Part::full, Route::recursion)(x);
        double o = nested(g, t, j, m, x);
        EXPECT_NEAR(c, o, 1e-9 * (1 + std::abs(o))) << g.describe() << " t=" << t << " x=" << x;
        EXPECT_NEAR(r, o, 1e-7 * (1 + std::abs(o)));
    }
}

TEST(WPolyRecursion, TableAndPowerGaugesMatchNestedQuadrature) {
    auto st = GaugeSpec::stein();
    for (double x : {-1.0, 0.4, 1.3}) {
        double o = nested(st, 0.2, 0, 2, x);
        EXPECT_NEAR(WPoly::chain_t(st, 0.2, 0, 2)(x), o, 1e-8 * (1 + std::abs(o)));
    }
    auto pw = GaugeSpec::power(0, {1.5, 0.5, 2.0}, Interval::open(0, inf));
    for (double x : {0.3, 1.0, 2.5}) {
        double o = nested(pw, 1.0, 0, 2, x);
        EXPECT_NEAR(WPoly::chain_t(pw, 1.0, 0, 2)(x), o, 1e-9 * (1 + std::abs(o)));
        EXPECT_NEAR(WPoly::chain_t(pw, 1.0, 0, 2, Part::full, Route::recursion)(x), o, 1e-7 * (1 + std::abs(o)));
    }
}

TEST(WPolyGauged, DerivativesAreLaterChainLevels) {
    // gauged(r) of p_{t;0,m} is p_{t;r,m} / w_r
    auto g = GaugeSpec::exponential({0.3, -0.7, 1.1, 0.4});
    auto p = WPoly::chain_t(g, -0.5, 0, 3);
    for (double x : {-1.0, 0.0, 0.8})
        for (int r = 0; r <= 4; ++r) {
            double want = r <= 3 ? WPoly::chain_t(g, -0.5, r, 3)(x) / g(r, x) : 0.0;
            EXPECT_NEAR(p.gauged(r, x), want, 1e-12 * (1 + std::abs(want)));
        }
}

TEST(WPolyAZ, UnitGaugesOnHalfLine) {
    // a = 0 in I: p_{a;2,4} = x^2/2, then two integrations from z = 1
    auto g = GaugeSpec::unit({0, inf, true, false});
    auto p = WPoly::chain_az(g, 1.0, 0, 2, 4);
    for (double x : {0.0, 0.5, 1.0, 2.0, 3.5}) {
        double want = (std::pow(x, 4) - 1) / 24 - (x - 1) / 6;
        EXPECT_NEAR(p(x), want, 1e-12 * (1 + std::abs(want)));
    }
}

TEST(WPolyAZ, ExponentialExampleAndVanishingBelowK) {
    auto g = GaugeSpec::exponential({0, 0, 0, -1, 2, 1});
    auto p = WPoly::chain_az(g, 0, 0, 2, 5);
    EXPECT_NEAR(p(1), (std::exp(2.0) - 3) / 24, 1e-13);
    EXPECT_NEAR(WPoly::chain_az(g, 0, 0, 2, 5, Route::recursion)(1), (std::exp(2.0) - 3) / 24, 1e-9);
    for (int z10 : {-10, 0, 7}) {
        double z = z10 / 10.0;
        for (int j : {2, 4, 5}) {
            auto q = WPoly::chain_az(g, z, 0, 2, j);
            EXPECT_NEAR(q.gauged(0, z), 0, 1e-13);
            EXPECT_NEAR(q.gauged(1, z), 0, 1e-13);
            EXPECT_GT(q.gauged(2, z), 0);
        }
    }
    // (2, 3) is outside the finiteness set
    EXPECT_THROW(WPoly::chain_az(g, 0, 0, 2, 3), InputError);
}

TEST(Finiteness, ExponentialCriterionAndProbe) {
    auto g = GaugeSpec::exponential({0, 0, 0, -1, 2, 1});
    auto F = finiteness_set(g, 5, Route::closed_form);
    EXPECT_EQ(F.row(2, 5), (std::vector<int>{2, 4, 5}));
    EXPECT_EQ(F, finiteness_set(g, 5, Route::recursion));
}

TEST(Finiteness, UnitGauges) {
    auto F = finiteness_set(GaugeSpec::unit(), 4);
    for (int m = 0; m <= 4; ++m)
        for (int j = 0; j <= m; ++j) EXPECT_EQ(F.contains(j, m), j == m);
    auto H = finiteness_set(GaugeSpec::unit(Interval::closed(0, 1)), 4);
    for (int m = 0; m <= 4; ++m)
        for (int j = 0; j <= m; ++j) EXPECT_TRUE(H.contains(j, m));
}

TEST(Finiteness, ProbeMatchesCriterionOnRandomRates) {
    std::mt19937_64 rng(5);
    const double rates[] = {-1.5, -1, -0.5, 0.5, 1, 1.5, 2};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> lam;
        for (int i = 0; i <= 4; ++i) lam.push_back(rates[rng() % 7]);
        auto g = GaugeSpec::exponential(lam);
        EXPECT_EQ(finiteness_set(g, 4, Route::closed_form), finiteness_set(g, 4, Route::recursion)) << g.describe();
    }
}

TEST(Interpolation, MatchesPrescribedGaugedDerivatives) {
    auto g = GaugeSpec::exponential({0.5, -1, 0.25});
    std::vector<double> c{1.5, -2, 0.75};
    auto q = interpolate(g, 0.3, c);
    for (int r = 0; r < 3; ++r) EXPECT_NEAR(q.gauged(r, 0.3), c[r], 1e-12);
    EXPECT_NEAR(q.gauged(3, 1.0), 0, 1e-12);
}

TEST(ClosedForm, TextForExponentialChain) {
    auto g = GaugeSpec::exponential({0, 0, 0, -1, 2, 1});
    EXPECT_EQ(WPoly::chain_t(g, 0, 0, 1).closed_form_string().value_or(""), "x");
    EXPECT_FALSE(WPoly::chain_t(GaugeSpec::stein(), 0, 0, 1).closed_form_string().has_value());
}

TEST(Errors, BadArguments) {
    auto u = GaugeSpec::unit(Interval::closed(0, 1));
    EXPECT_THROW(WPoly::chain_t(u, 0, 2, 1), InputError);
    EXPECT_THROW(WPoly::chain_t(u, 2, 0, 1), InputError);
    EXPECT_THROW(WPoly::chain_t(u, 0, 0, 1)(1.5), DomainError);
}
