#include <gtest/gtest.h>

#include <cmath>

#include "cellevo/theory.hpp"

using namespace cellevo;

namespace {

MonoModelSpec healthy() { return {}; }

MonoModelSpec cancer() {
    MonoModelSpec m;
    m.kind = MonoKind::CancerLinear;
    m.r = RationalDecay{1.0, 1.0};
    m.d = Constant{0.245};
    m.mu = InverseQuadratic{0.3025, 0.5};
    m.c = 1.0;
    return m;
}

}  // namespace

TEST(Homeostasis, ClosedForm) {
    EXPECT_NEAR(homeostasis_rho(2.0, 0.4, 1.0), 4.0, 1e-14);
    EXPECT_EQ(homeostasis_rho(0.4, 0.4, 1.0), 0.0);
    EXPECT_NEAR(homeostasis_rho(2.0, 0.5, 2.0), 1.0, 1e-14);
}

TEST(Homeostasis, Errors) {
    EXPECT_THROW(homeostasis_rho(0.3, 0.4, 1.0), ConfigError);
    EXPECT_THROW(homeostasis_rho(1.0, 0.0, 1.0), ConfigError);
    EXPECT_THROW(homeostasis_rho(1.0, 0.4, 0.0), ConfigError);
}

TEST(FittestTrait, HealthyRoots) {
    const auto m = healthy();
    EXPECT_NEAR(fittest_trait_from_rho(m, 4.0), 0.0, 1e-12);
    EXPECT_NEAR(fittest_trait_from_rho(m, 0.0), 0.894427190999916, 1e-10);
    for (double rho : {0.3, 1.0, 2.5, 3.9})
        EXPECT_NEAR(fittest_trait_from_rho(m, rho), std::sqrt((4.0 - rho) / (5.0 * (1.0 + rho))), 1e-10) << rho;
}

TEST(FittestTrait, NoSignChange) {
    EXPECT_THROW(fittest_trait_from_rho(healthy(), 10.0), NumericalError);
}

TEST(NetGrowth, Values) {
    EXPECT_NEAR(net_growth(healthy(), 0.0, 0.0, 0.0), 1.6, 1e-15);
    EXPECT_NEAR(net_growth(healthy(), 0.0, 4.0, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(net_growth(cancer(), std::sqrt(2.0 / 3.0), 123.0, 1.0), 0.025, 1e-14);
}

TEST(DoseFitness, MatchesNetGrowth) {
    const auto m = cancer();
    for (double x : {0.0, 0.3, 0.8165, 1.0})
        EXPECT_NEAR(dose_fitness(1.0, 0.245, 0.5, 0.55, x), net_growth(m, x, 0.0, 1.0), 1e-14);
}

TEST(DoseAnalysis, InteriorMaximum) {
    const auto da = dose_analysis(1.0, 0.245, 0.5, 0.3025);
    EXPECT_EQ(da.regime, DoseRegime::InteriorMaximum);
    EXPECT_NEAR(da.alpha, 0.55, 1e-15);
    ASSERT_TRUE(da.y_c && da.x_c);
    EXPECT_NEAR(*da.y_c, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(*da.x_c, 0.816496580927726, 1e-12);
    EXPECT_NEAR(da.R_bar, 0.025, 1e-12);
    EXPECT_TRUE(da.resistance());
    EXPECT_NEAR(dose_fitness(1.0, 0.245, 0.5, da.alpha, *da.x_c), da.R_bar, 1e-12);
}

TEST(DoseAnalysis, Regimes) {
    const auto strong = dose_analysis(1.0, 0.245, 0.5, 1.44);
    EXPECT_EQ(strong.regime, DoseRegime::StrongDoseNoResistance);
    EXPECT_EQ(strong.R_bar, -0.245);
    EXPECT_FALSE(strong.x_c);
    EXPECT_FALSE(strong.resistance());

    // alpha = 0.2 <= a^2 r0 = 0.25
    const auto weak = dose_analysis(1.0, 0.245, 0.5, 0.04);
    EXPECT_EQ(weak.regime, DoseRegime::WeakDoseNoResistance);
    EXPECT_NEAR(weak.R_bar, 1.0 - 0.245 - 0.04 / 0.25, 1e-14);

    // boundaries
    EXPECT_EQ(dose_analysis(1.0, 0.245, 0.5, 1.0).regime, DoseRegime::StrongDoseNoResistance);
    EXPECT_EQ(dose_analysis(1.0, 0.245, 0.5, 0.0625).regime, DoseRegime::WeakDoseNoResistance);
    EXPECT_STREQ(to_string(DoseRegime::InteriorMaximum), "interior-maximum");
}

TEST(DoseAnalysis, Errors) {
    EXPECT_THROW(dose_analysis(1.0, 0.245, 1.0, 0.3), ConfigError);
    EXPECT_THROW(dose_analysis(1.0, 0.245, 0.0, 0.3), ConfigError);
    EXPECT_THROW(dose_analysis(1.0, 0.245, 0.5, 0.0), ConfigError);
    EXPECT_THROW(dose_analysis(1.0, 0.0, 0.5, 0.3), ConfigError);
}

TEST(DoseAnalysis, RbarNonincreasingInInteriorRange) {
    double prev = 1e300;
    for (int k = 1; k <= 12; ++k) {
        const auto da = dose_analysis(1.0, 0.245, 0.5, k / 10.0);
        if (da.regime != DoseRegime::InteriorMaximum) continue;
        EXPECT_LE(da.R_bar, prev) << k;
        prev = da.R_bar;
    }
}

TEST(OptimalDose, PicksStrongDose) {
    std::vector<double> grid;
    for (int k = 1; k <= 15; ++k) grid.push_back(k / 10.0);
    const auto opt = optimal_dose(1.0, 0.245, 0.5, grid);
    EXPECT_NEAR(opt.c_star, 1.0, 1e-15);
    EXPECT_EQ(opt.threshold, 1.0);
    EXPECT_EQ(opt.table.size(), 15u);
    EXPECT_THROW(optimal_dose(1.0, 0.245, 0.5, {}), ConfigError);
}

TEST(Concentration, DoubleRootAtResistantTrait) {
    const auto x = concentration_from_I(1.0, 0.245, 0.5, 0.55, 0.025);
    ASSERT_TRUE(x);
    EXPECT_NEAR(*x, 0.816496580927726, 1e-6);
}

TEST(Concentration, SmallestRoot) {
    const auto x = concentration_from_I(1.0, 0.245, 0.5, 0.55, 0.0);
    ASSERT_TRUE(x);
    EXPECT_NEAR(dose_fitness(1.0, 0.245, 0.5, 0.55, *x), 0.0, 1e-12);
    EXPECT_NEAR(*x, 0.6182, 1e-3);
    EXPECT_FALSE(concentration_from_I(1.0, 0.245, 0.5, 0.55, 0.1));
}
