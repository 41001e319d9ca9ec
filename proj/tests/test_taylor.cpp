#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "gmono/taylor.hpp"

using namespace gmono;

namespace {

FunctionRep expf(Interval I = Interval::real_line()) {
    return FunctionRep::generic("exp", [](auto x) { using std::exp; return exp(x); }, I);
}

MeasureRep exp_density(double lo, double hi, Interval I = Interval::real_line()) {
    TailHint left = std::isfinite(lo) ? TailHint{} : TailHint{TailHint::exponential, 1};
    return MeasureRep::density({"exp", [](double t) { return std::exp(t); }, lo, hi, left, {}}, I);
}

TaylorData exp_on_R(int k = 1, int n = 2) {
    return make_taylor_data(ConeSpec{GaugeSpec::unit(), k, n}, expf(), exp_density(-inf, inf));
}

}  // namespace

TEST(Taylor, UnitIdentityOnClosedInterval) {
    // f = exp on [0,1]: f^{(j)} = sum_{i=j}^{n} f^{(i)}(0) x^{i-j}/(i-j)! + int_0^x e^t (x-t)^{n-j}/(n-j)! dt
    Interval I = Interval::closed(0, 1);
    auto td = make_taylor_data(ConeSpec{GaugeSpec::unit(I), 1, 2}, expf(I), exp_density(0, 1, I));
    for (int i = 1; i <= 2; ++i) EXPECT_NEAR(td.limit(i), 1.0, 1e-12);
    for (double x : linspace(0, 1, 64))
        for (int j = 1; j <= 2; ++j) {
            auto t = taylor_expand(td, j, x);
            double p = 0;
            for (int i = j; i <= 2; ++i) p += std::pow(x, i - j) / std::tgamma(i - j + 1.0);
            EXPECT_NEAR(t.p, p, 1e-12);
            EXPECT_NEAR(t.p + t.h, std::exp(x), 1e-10);
        }
}

TEST(Taylor, TopOrderIsZero) {
    auto td = exp_on_R();
    auto t = taylor_expand(td, 3, 0.4);
    EXPECT_EQ(t.p, 0);
    EXPECT_EQ(t.h, 0);
    EXPECT_THROW(taylor_expand(td, 0, 0.4), InputError);
}

TEST(Taylor, LimitsAtMinusInfinityVanish) {
    auto td = exp_on_R();
    EXPECT_NEAR(td.limit(1), 0, 1e-8);
    EXPECT_NEAR(td.limit(2), 0, 1e-8);
    // on R the whole of e^x is the mixture part
    auto t = taylor_expand(td, 1, 0.7);
    EXPECT_NEAR(t.h, std::exp(0.7), 1e-8);
}

TEST(Taylor, RejectsInconsistentLimits) {
    // (1, 2) is outside the unit finiteness set at -inf, so f'(a+) must vanish
    EXPECT_THROW(make_taylor_data(ConeSpec{GaugeSpec::unit(), 1, 2}, expf(), exp_density(-inf, inf),
                                  std::vector<double>{0, 1, 0}),
                 InputError);
    EXPECT_THROW(make_taylor_data(ConeSpec{GaugeSpec::unit(), 1, 2}, expf(), exp_density(-inf, inf),
                                  std::vector<double>{0, -1, 0}),
                 InputError);
}

TEST(Approx, RemainderMatchesQuadrature) {
    auto td = exp_on_R();
    auto ap = build_approx(td, 0, -5);
    // R_{z,y}(x) = int_y^x e^t (x - t)^2 / 2 dt
    double want = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double t) { return std::exp(t) * (1 - t) * (1 - t) / 2; }, -5, 1);
    EXPECT_NEAR(ap.R(1), want, 1e-10);
}

TEST(Approx, ClosedFormOfGy) {
    // k=1: q is the constant f(0) - R(0); g_y(1) = e - e^{-5}(1 + 4 + 25/2 - ...) via the closed form
    auto td = exp_on_R();
    for (double y : {-1.0, -5.0}) {
        auto ap = build_approx(td, 0, y);
        // R(x) = e^x - e^y (1 + (x - y) + (x - y)^2 / 2) for x >= y, and q = 1 - R(0)
        auto R = [y](double x) { return std::exp(x) - std::exp(y) * (1 + (x - y) + (x - y) * (x - y) / 2); };
        double g1 = 1 - R(0) + R(1);
        EXPECT_NEAR(ap.g_y(1), g1, 1e-10);
        EXPECT_NEAR(ap.c[0], 1 - R(0), 1e-10);
    }
    // at y = -5 the gap to e is 6.5 e^{-5}
    EXPECT_NEAR(std::exp(1.0) - build_approx(td, 0, -5).g_y(1), 6.5 * std::exp(-5.0), 1e-10);
}

TEST(Approx, GyIsAConeMember) {
    auto td = exp_on_R();
    ConeSpec cone{GaugeSpec::unit(), 1, 2};
    for (double y : {-1.0, -4.0, -16.0})
        EXPECT_TRUE(cone_membership(build_approx(td, 0, y).g_y, cone, linspace(-20, 3, 120)).member) << y;
}

TEST(Approx, ArgumentChecks) {
    auto td = exp_on_R();
    EXPECT_THROW(build_approx(td, 0, 1), InputError);
    Interval I = Interval::closed(0, 1);
    auto tc = make_taylor_data(ConeSpec{GaugeSpec::unit(I), 1, 2}, expf(I), exp_density(0, 1, I));
    EXPECT_THROW(build_approx(tc, 0.5, 0.0), InputError);
}

TEST(Profile, MonotoneConvergence) {
    auto td = exp_on_R();
    std::vector<double> ys;
    for (int i = 0; i <= 6; ++i) ys.push_back(-std::ldexp(1.0, i));
    auto prof = convergence_profile(td, 0, ys, linspace(-10, 3, 131));
    EXPECT_TRUE(prof.nonnegative);
    EXPECT_TRUE(prof.nonincreasing);
    ASSERT_EQ(prof.rows.size(), ys.size());
    EXPECT_LT(prof.rows.back().gap_right, 1e-3);
    for (size_t i = 0; i < ys.size(); ++i) EXPECT_EQ(prof.rows[i].y, ys[i]);
    EXPECT_THROW(convergence_profile(td, 0, {-1, -1}, linspace(-1, 1, 5)), InputError);
}

TEST(Profile, EvenOrderSignOnTheLeft) {
    // k = 2: (f - g_y) >= 0 on both sides
    auto td = exp_on_R(2, 3);
    auto prof = convergence_profile(td, 0, {-2, -4, -8}, linspace(-10, 3, 66));
    EXPECT_TRUE(prof.nonnegative);
    EXPECT_TRUE(prof.nonincreasing);
}

TEST(RemLeft, MemberWithFractionalGrowth) {
    for (int k = 1; k <= 3; ++k) {
        auto f = rem_left_example(k, 3);
        EXPECT_TRUE(cone_membership(f, ConeSpec{GaugeSpec::unit(), k, 3}, linspace(-20, 5, 200)).member) << k;
        EXPECT_NEAR(growth_exponent(f.f), k - 0.5, 5e-3);  // window bias ~ e log2(2001/2002)
    }
}
