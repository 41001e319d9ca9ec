#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gmono/gderiv.hpp"

using namespace gmono;

namespace {

FunctionRep expf() { return FunctionRep::generic("exp", [](auto x) { using std::exp; return exp(x); }); }
FunctionRep sq() { return FunctionRep::generic("x^2", [](auto x) { return x * x; }); }

}  // namespace

TEST(GaugedDerivative, UnitGaugesAreOrdinaryDerivatives) {
    auto f = FunctionRep::generic("sin", [](auto x) { using std::sin; return sin(x); });
    for (double x : {-1.0, 0.2, 2.0})
        for (int j = 0; j <= 4; ++j) {
            double want = std::sin(x + j * M_PI / 2);
            EXPECT_NEAR(gauged_derivative(f, GaugeSpec::unit(), j, x), want, 1e-13);
            EXPECT_NEAR(gauged_derivative(f, GaugeSpec::unit(), j, x, Strategy::fd), want, 1e-5);
        }
}

TEST(GaugedDerivative, SteinOperatorOnSquare) {
    // gauges (1, 1/phi, phi): E^1 f = phi f', E^2 f = f'' - x f'
    for (double x : {-1.5, 0.5, 1.0}) {
        double phi = std::exp(-x * x / 2) / std::sqrt(2 * M_PI);
        EXPECT_NEAR(gauged_derivative(sq(), GaugeSpec::stein(), 1, x), phi * 2 * x, 1e-14);
        EXPECT_NEAR(gauged_derivative(sq(), GaugeSpec::stein(), 2, x), 2 - 2 * x * x, 1e-13);
    }
}

TEST(GaugedDerivative, ExponentialGaugesOnExp2x) {
    // lambda = (0,0,0,-1,2,1), f = e^{2x}: f^{(5)}(0) = 24
    auto f = FunctionRep::generic("e2", [](auto x) { using std::exp; return exp(x * 2.0); });
    auto g = GaugeSpec::exponential({0, 0, 0, -1, 2, 1});
    EXPECT_NEAR(gauged_derivative(f, g, 5, 0.0), 24, 1e-11);
    EXPECT_NEAR(gauged_derivative(f, g, 5, 0.0, Strategy::fd), 24, 1e-3);
}

TEST(GaugedDerivative, FdConvergesAtFourthOrder) {
    for (int j = 1; j <= 3; ++j) {
        double e1 = std::abs(gauged_derivative(expf(), GaugeSpec::unit(), j, 0.3, Strategy::fd, {0.2}) - std::exp(0.3));
        double e2 = std::abs(gauged_derivative(expf(), GaugeSpec::unit(), j, 0.3, Strategy::fd, {0.1}) - std::exp(0.3));
        EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3) << "j=" << j;
    }
}

TEST(GaugedDerivative, SuppliedDataAndConsistency) {
    auto f = expf();
    f.gauged = {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }};
    EXPECT_EQ(gauged_derivative(f, GaugeSpec::unit(), 1, 0.5), std::exp(0.5));
    EXPECT_LT(consistency_gap(f, GaugeSpec::unit(), 1, linspace(-1, 1, 11)), 1e-6);
    f.gauged[1] = [](double x) { return 2 * std::exp(x); };
    EXPECT_GT(consistency_gap(f, GaugeSpec::unit(), 1, linspace(-1, 1, 11)), 0.1);
    EXPECT_THROW(gauged_derivative(f, GaugeSpec::unit(), 3, 0.0, Strategy::supplied), DomainError);
}

TEST(GaugedDerivative, OutsideIntervalIsRejected) {
    EXPECT_THROW(gauged_derivative(expf(), GaugeSpec::unit(Interval::open(0, 1)), 1, 1.0), DomainError);
}

TEST(ConeMembership, ExpIsMultiplyMonotone) {
    auto rep = cone_membership(expf(), ConeSpec{GaugeSpec::unit(), 1, 3}, linspace(-5, 3, 200));
    EXPECT_TRUE(rep.member);
    EXPECT_EQ(rep.grid_points, 200u);
}

TEST(ConeMembership, ReportsFirstViolation) {
    auto neg = FunctionRep::generic("-x", [](auto x) { return -x; });
    auto rep = cone_membership(neg, ConeSpec{GaugeSpec::unit(), 1, 1}, linspace(-1, 1, 21));
    EXPECT_FALSE(rep.member);
    ASSERT_FALSE(rep.violations.empty());
    EXPECT_EQ(rep.violations.front().j, 0);
    EXPECT_NEAR(rep.violations.front().x0, -1, 1e-12);
}

TEST(ConeMembership, SquareNeedsOrderTwoOnly) {
    // x^2 has f' increasing but f not monotone: member of k=2, not of k=1
    EXPECT_TRUE(cone_membership(sq(), ConeSpec{GaugeSpec::unit(), 2, 2}, linspace(-3, 3, 61)).member);
    EXPECT_FALSE(cone_membership(sq(), ConeSpec{GaugeSpec::unit(), 1, 2}, linspace(-3, 3, 61)).member);
}

TEST(Mixture, AtomsGiveTruncatedPowers) {
    auto mu = MeasureRep::from_atoms({{-1, 1}, {1, 2}});
    auto h = mixture_function(mu, GaugeSpec::unit(), 0, 1);
    // (x+1) + 2 (x-1)_+ at 1.5
    EXPECT_NEAR(h(1.5), 3.5, 1e-14);
    EXPECT_NEAR(h(0.0), 1.0, 1e-14);
    EXPECT_NEAR(h(-2.0), 0.0, 1e-14);
    EXPECT_TRUE(cone_membership(h, ConeSpec{GaugeSpec::unit(), 1, 1}, linspace(-3, 3, 61)).member);
}

TEST(Mixture, NormalMixtureMatchesPartialMoments) {
    // int phi(t) (x - t)_+^2 / 2 dt = E(x - Z)_+^2 / 2
    auto h = mixture_function(MeasureRep::normal(0, 1), GaugeSpec::unit(), 0, 2);
    for (double x : {-1.0, 0.5, 2.0}) {
        double want = partial_moment(reflected(MeasureRep::normal(0, 1)), -x, 2) / 2;
        EXPECT_NEAR(h(x), want, 1e-9);
    }
}

TEST(Mixture, TruncationAtY) {
    auto mu = MeasureRep::from_atoms({{-2, 1}, {0, 1}});
    auto h = mixture_function(mu, GaugeSpec::unit(), 0, 1, -1.0);
    EXPECT_NEAR(h(1.0), 1.0, 1e-14);  // only the atom at 0 survives
}

TEST(Mixture, DerivativeIdentityProperty) {
    // (h_i / w_i)' = h_{i+1} on random exponential gauges and mixed measures
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> L(-1, 1), T(-1, 1);
    const double h = 1e-4;
    for (int c = 0; c < 10; ++c) {
        auto g = GaugeSpec::exponential({L(rng), L(rng), L(rng), L(rng)});
        auto mu = MeasureRep::normal(T(rng), 0.7);
        mu.atoms.push_back({T(rng) - 2, 0.5});
        int i = static_cast<int>(rng() % 2);
        auto hi = mixture_function(mu, g, i, 2), hi1 = mixture_function(mu, g, i + 1, 2);
        double x = T(rng);
        double lhs = (hi(x + h) / g(i, x + h) - hi(x - h) / g(i, x - h)) / (2 * h);
        EXPECT_NEAR(lhs, hi1(x), 1e-6 * (1 + std::abs(hi1(x))));
    }
}

TEST(Comparison, FromAPoint) {
    // f = e^x and g = 1 + x agree to order 1 at 0 with f'' >= g'' = 0
    auto g = FunctionRep::generic("1+x", [](auto x) { return x + 1.0; });
    auto rep = compare_from_point(expf(), g, GaugeSpec::unit(), 2, 0.0, linspace(-3, 3, 61));
    EXPECT_TRUE(rep.holds);
    EXPECT_GE(rep.right_margin, -1e-12);
    EXPECT_GE(rep.left_margin, -1e-12);
}

TEST(Invariance, TanMap) {
    for (int j = 0; j <= 3; ++j) {
        auto r = invariance_check(expf(), GaugeSpec::unit(), ScaleMap::tan_map(), j, linspace(-1.2, 1.2, 32));
        EXPECT_LT(r.max_abs, 1e-10) << j;
        auto s = invariance_check(sq(), GaugeSpec::unit(), ScaleMap::tan_map(), j, linspace(-1.2, 1.2, 32));
        EXPECT_LT(s.max_abs, 1e-10) << j;
    }
    auto fd = invariance_check(expf(), GaugeSpec::unit(), ScaleMap::tan_map(), 2, linspace(-1.2, 1.2, 32), Strategy::fd);
    EXPECT_LT(fd.max_rel, 1e-3);
}

TEST(Grids, DefaultGridSpreadsOverInfiniteIntervals) {
    auto g = default_grid(Interval::real_line(), 64);
    EXPECT_EQ(g.size(), 64u);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_LT(g.front(), -10);
    EXPECT_GT(g.back(), 10);
    auto c = default_grid(Interval::closed(0, 1), 5);
    EXPECT_EQ(c.front(), 0);
    EXPECT_EQ(c.back(), 1);
}

TEST(RightContinuity, AcceptsRightContinuousSteps) {
    EXPECT_TRUE(right_continuous([](double x) { return std::exp(x); }, Interval::closed(-1, 1)));
    EXPECT_TRUE(right_continuous([](double x) { return x >= 0 ? 1.0 : 0.0; }, Interval::closed(-1, 1)));
}
