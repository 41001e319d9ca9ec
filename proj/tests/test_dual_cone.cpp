#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gmono/admissibility.hpp"
#include "gmono/dual_cone.hpp"

using namespace gmono;

namespace {

MeasureRep spread() { return MeasureRep::from_atoms({{-1, 0.5}, {1, 0.5}}); }
MeasureRep point() { return MeasureRep::from_atoms({{0, 1}}); }

double atoms_integral(const MeasureRep& nu, const std::function<double(double)>& f) {
    double s = 0;
    for (auto& a : nu.atoms) s += a.w * f(a.x);
    return s;
}

}  // namespace

TEST(Dominance, JensenSpreadBeatsPoint) {
    auto rep = check_dominance(spread(), point(), ConeSpec{GaugeSpec::unit(), 2, 2});
    EXPECT_EQ(rep.verdict, Verdict::dominates);
    ASSERT_EQ(rep.cond_i.size(), 2u);
    for (auto& c : rep.cond_i) EXPECT_NEAR(c.gap, 0, 1e-15);
    ASSERT_FALSE(rep.cond_ii.empty());
    EXPECT_NEAR(rep.cond_ii.front().gap, 0.5, 1e-12);  // (x-z)^2 / 2
    EXPECT_FALSE(rep.witness.has_value());
}

TEST(Dominance, ReverseJensenFailsWithValidWitness) {
    ConeSpec c{GaugeSpec::unit(), 2, 2};
    auto rep = check_dominance(point(), spread(), c);
    EXPECT_EQ(rep.verdict, Verdict::fails);
    ASSERT_TRUE(rep.witness.has_value());
    auto w = [&](double x) { return (*rep.witness)(x); };
    EXPECT_LT(atoms_integral(point(), w), atoms_integral(spread(), w));
    EXPECT_TRUE(cone_membership(*rep.witness, c, linspace(-3, 3, 61), 1e-8, Strategy::supplied).member);
}

TEST(Dominance, UnitPathAgreesWithGeneralPath) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-2, 2), W(0.1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3), k = 1 + static_cast<int>(rng() % n);
        std::vector<Atom> a, b;
        for (int i = 0; i < 4; ++i) a.push_back({U(rng), W(rng)});
        for (int i = 0; i < 4; ++i) b.push_back({U(rng), W(rng)});
        auto m1 = MeasureRep::from_atoms(a), m2 = MeasureRep::from_atoms(b);
        auto grid = linspace(-3, 3, 25);
        auto u = check_dominance_unit(m1, m2, k, n, Interval::real_line(), 0.0, 0.0, grid);
        auto g = check_dominance(m1, m2, ConeSpec{GaugeSpec::unit(), k, n}, 0.0, 0.0, grid);
        EXPECT_EQ(u.verdict, g.verdict) << "k=" << k << " n=" << n;
    }
}

TEST(Dominance, VerdictDoesNotDependOnSOrZ) {
    ConeSpec c{GaugeSpec::exponential({0.5, -0.25, 1, 0.75}), 2, 2};
    auto xs = std::vector<double>{-1.2, 0.1, 1.4};
    auto cc = divided_difference(c.g, xs, 2, 0.0);
    std::vector<Atom> a, b;
    for (int i = 0; i < 3; ++i) (cc[i] > 0 ? a : b).push_back({xs[i], std::abs(cc[i])});
    auto m1 = MeasureRep::from_atoms(a), m2 = MeasureRep::from_atoms(b);
    for (double s : {-1.0, 0.0, 0.8})
        for (double z : {-0.5, 1.0}) {
            EXPECT_EQ(check_dominance(m1, m2, c, s, z).verdict, Verdict::dominates) << s << " " << z;
            EXPECT_EQ(check_dominance(m2, m1, c, s, z).verdict, Verdict::fails) << s << " " << z;
        }
}

TEST(DividedDifference, AnnihilatesLowerChainAndIsPositiveOnTop) {
    auto g = GaugeSpec::exponential({0.25, -0.5, 0.5, 1});
    std::vector<double> xs{-1, 0, 0.5, 2};
    auto c = divided_difference(g, xs, 3, 0.0);
    for (int i = 0; i < 3; ++i) {
        auto p = WPoly::chain_t(g, 0.0, 0, i);
        double s = 0;
        for (int l = 0; l < 4; ++l) s += c[l] * p(xs[l]);
        EXPECT_NEAR(s, 0, 1e-12);
    }
    auto top = WPoly::chain_t(g, 0.0, 0, 3);
    double s = 0;
    for (int l = 0; l < 4; ++l) s += c[l] * top(xs[l]);
    EXPECT_GT(s, 0);
    EXPECT_THROW(divided_difference(g, {0, 0, 1, 2}, 3, 0.0), DomainError);
}

TEST(Oracle, NoSoundnessViolationsOnRandomPairs) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-2, 2), W(0.1, 1);
    for (int trial = 0; trial < 15; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3), k = 1 + static_cast<int>(rng() % n);
        std::vector<Atom> a, b;
        for (int i = 0; i < 3; ++i) a.push_back({U(rng), W(rng)});
        for (int i = 0; i < 3; ++i) b.push_back({U(rng), W(rng)});
        auto r = oracle_equivalence(MeasureRep::from_atoms(a), MeasureRep::from_atoms(b),
                                    ConeSpec{GaugeSpec::unit(), k, n}, 100, 100 + trial);
        EXPECT_EQ(r.soundness_violations, 0);
        if (r.verdict == Verdict::fails) EXPECT_TRUE(r.witness_valid);
    }
}

TEST(Reflected, LeftTailClass) {
    // (t - x)_+^2 is convex, so the spread still wins; the point does not
    auto rep = check_dominance_reflected(spread(), point(), 1, 2);
    EXPECT_EQ(rep.verdict, Verdict::dominates);
    EXPECT_TRUE(std::is_sorted(rep.t_grid.begin(), rep.t_grid.end()));
    auto back = check_dominance_reflected(point(), spread(), 1, 2);
    EXPECT_EQ(back.verdict, Verdict::fails);
    ASSERT_TRUE(back.witness.has_value());
    auto w = [&](double x) { return (*back.witness)(x); };
    EXPECT_LT(atoms_integral(point(), w), atoms_integral(spread(), w));
}

TEST(Admissibility, CauchyFailsAtDegreeOne) {
    auto r = admissibility(MeasureRep::cauchy(), ConeSpec{GaugeSpec::unit(), 2, 3});
    EXPECT_FALSE(r.admissible);
    EXPECT_EQ(r.failing_degree, 1);
    // k <= n also needs nu(x) itself, undefined for Cauchy
    EXPECT_FALSE(admissibility(MeasureRep::cauchy(), ConeSpec{GaugeSpec::unit(), 1, 3}).admissible);
}

TEST(Admissibility, NormalOutsideTheExceptionalBranch) {
    for (int n = 0; n <= 4; ++n)
        for (int k = 1; k <= n + 1; ++k) {
            auto r = admissibility(MeasureRep::normal(0, 1), ConeSpec{GaugeSpec::unit(), k, n});
            // k = n+1 odd on R: -exp(x^2) 1{x<0} is in the cone with integral -inf
            bool exceptional = k == n + 1 && k % 2 == 1;
            EXPECT_EQ(r.admissible, !exceptional) << "k=" << k << " n=" << n;
        }
}

TEST(Admissibility, ExceptionalBranchNeedsSupportAwayFromA) {
    // k = n + 1 odd and a = 0 not in (0, inf)
    ConeSpec c{GaugeSpec::unit(Interval::open(0, inf)), 3, 2};
    auto away = admissibility(MeasureRep::from_atoms({{0.5, 1}, {2, 1}}, Interval::open(0, inf)), c);
    EXPECT_EQ(away.branch, AdmissibilityBranch::exceptional);
    EXPECT_TRUE(away.admissible);
    DensityLaw u{"uniform", [](double x) { return x > 0 && x < 1 ? 1.0 : 0.0; }, 0, 1, {}, {}};
    auto near = admissibility(MeasureRep::density(u, Interval::open(0, inf)), c);
    EXPECT_FALSE(near.admissible);
}
