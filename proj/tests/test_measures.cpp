#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "gmono/measures.hpp"

using namespace gmono;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); }

double pois_pmf(double lam, int k) { return std::exp(-lam + k * std::log(lam) - std::lgamma(k + 1.0)); }

}  // namespace

TEST(NormalPartial, MatchesQuadratureAcrossTheRecurrenceSwitch) {
    for (int n = 0; n <= 6; ++n)
        for (double c : {-5.0, -1.0, 0.0, 0.7, 1.5, 3.0, 6.0}) {
            double want = gk([&](double z) { return std::pow(z - c, n) * phi(z); }, c, inf);
            double got = partial_moment(MeasureRep::normal(0, 1), c, n);
            EXPECT_NEAR(got, want, 1e-10 * (std::abs(want) + 1e-300) + 1e-300) << "n=" << n << " c=" << c;
        }
}

TEST(NormalPartial, ScaledAndShifted) {
    // E(m + s Z - t)_+^n = s^n E(Z - (t - m)/s)_+^n
    auto nu = MeasureRep::normal(1.5, 2.0, 3.0);
    double want = 3.0 * std::pow(2.0, 3) * partial_moment(MeasureRep::normal(0, 1), (0.5 - 1.5) / 2.0, 3);
    EXPECT_NEAR(partial_moment(nu, 0.5, 3), want, 1e-12 * want);
    EXPECT_NEAR(partial_moment(nu, 0.5, 3, MomentRoute::summation), want, 1e-8 * want);
}

TEST(NormalPartial, ZeroOrderIsTailProbability) {
    EXPECT_NEAR(partial_moment(MeasureRep::normal(0, 1), 0, 0), 0.5, 1e-15);
    EXPECT_NEAR(partial_moment(MeasureRep::normal(0, 1), 1.96, 0), 0.024997895148220435, 1e-15);
}

TEST(PoissonPartial, ClosedFormAgainstDirectSum) {
    for (double lam : {0.3, 2.0, 10.0})
        for (double scale : {0.5, 1.0, -0.7})
            for (int n = 0; n <= 4; ++n)
                for (double t : {-3.0, 0.0, 1.2, 4.0}) {
                    double want = 0;
                    for (int k = 0; k < 200; ++k) {
                        double x = 0.25 + scale * k, d = x - t;
                        want += pois_pmf(lam, k) * (n == 0 ? (d >= 0 ? 1.0 : 0.0) : (d > 0 ? std::pow(d, n) : 0.0));
                    }
                    auto nu = MeasureRep::poisson(lam, scale, 0.25);
                    EXPECT_NEAR(partial_moment(nu, t, n, MomentRoute::closed_form), want, 1e-10 * (1 + want));
                    EXPECT_NEAR(partial_moment(nu, t, n, MomentRoute::summation), want, 1e-10 * (1 + want));
                }
}

TEST(PoissonPartial, LeftMomentsViaReflection) {
    auto nu = MeasureRep::poisson(2.0, 0.2, 0);
    double want = 0;
    for (int k = 0; k < 100; ++k) want += pois_pmf(2.0, k) * std::pow(std::max(0.0, 1.0 - 0.2 * k), 3);
    EXPECT_NEAR(left_partial_moment(nu, 1.0, 3), want, 1e-12);
}

TEST(CauchyPartial, InfiniteAboveOrderZero) {
    EXPECT_EQ(partial_moment(MeasureRep::cauchy(), 0, 1), inf);
    EXPECT_NEAR(partial_moment(MeasureRep::cauchy(), 1, 0), 0.25, 1e-15);
}

TEST(Moments, UndefinedForCauchyMean) {
    auto parts = moment_parts(MeasureRep::cauchy(), [](double x) { return x; });
    EXPECT_FALSE(parts.defined());
    EXPECT_THROW(gmoment(MeasureRep::cauchy(), [](double x) { return x; }), UndefinedMoment);
    // but the positive part alone is a legitimate +inf
    EXPECT_EQ(moment_parts(MeasureRep::cauchy(), [](double x) { return x > 0 ? x : 0.0; }).value(), inf);
}

TEST(Moments, DensityWithExponentialTail) {
    DensityLaw d{"exp", [](double x) { return x >= 0 ? std::exp(-x) : 0.0; }, 0, inf, {}, {TailHint::exponential, 1}};
    auto nu = MeasureRep::density(d);
    EXPECT_NEAR(gmoment(nu, [](double x) { return x * x; }), 2.0, 1e-9);
    EXPECT_NEAR(partial_moment(nu, 1.0, 2), 2 * std::exp(-1.0), 1e-9);
    EXPECT_NEAR(nu.total_mass(), 1.0, 1e-10);
}

TEST(Moments, AtomsArePlainSums) {
    auto nu = MeasureRep::from_atoms({{-1, 0.25}, {2, 0.75}});
    EXPECT_DOUBLE_EQ(gmoment(nu, [](double x) { return x * x; }), 0.25 + 3.0);
    EXPECT_DOUBLE_EQ(partial_moment(nu, 0, 2), 3.0);
    EXPECT_DOUBLE_EQ(left_partial_moment(nu, 0, 1), 0.25);
    EXPECT_EQ(nu.support_lo(), -1);
    EXPECT_EQ(nu.support_hi(), 2);
}

TEST(Moments, RandomMixturesAgreeWithSeparateParts) {
    // linearity: moment of atoms + normal equals the sum of the parts
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2, 2), W(0.1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        auto nu = MeasureRep::normal(U(rng), W(rng) + 0.5, W(rng));
        nu.atoms = {{U(rng), W(rng)}, {U(rng), W(rng)}};
        double t = U(rng);
        int n = static_cast<int>(rng() % 5);
        auto atoms_only = MeasureRep::from_atoms(nu.atoms);
        auto cont = nu;
        cont.atoms.clear();
        EXPECT_NEAR(partial_moment(nu, t, n), partial_moment(atoms_only, t, n) + partial_moment(cont, t, n), 1e-12);
        EXPECT_NEAR(partial_moment(cont, t, n), partial_moment(cont, t, n, MomentRoute::summation),
                    1e-8 * (1 + partial_moment(cont, t, n)));
    }
}

TEST(Reflection, IsAnInvolution) {
    auto nu = MeasureRep::poisson(1.5, 2.0, 0.5);
    nu.atoms = {{0.7, 0.3}};
    auto rr = reflected(reflected(nu));
    for (double t : {-1.0, 0.5, 3.0})
        EXPECT_NEAR(partial_moment(rr, t, 2), partial_moment(nu, t, 2), 1e-12);
    EXPECT_EQ(reflected(nu).support_hi(), -0.5);
}

TEST(Validation, RejectsBadMeasures) {
    EXPECT_THROW(MeasureRep::from_atoms({{0, -1}}), InputError);
    EXPECT_THROW(MeasureRep::normal(0, 0), InputError);
    EXPECT_THROW(MeasureRep::from_atoms({{2, 1}}, Interval::open(0, 1)), InputError);
    EXPECT_THROW(MeasureRep::poisson(0), InputError);
}
