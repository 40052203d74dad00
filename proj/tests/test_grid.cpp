#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cellevo/grid.hpp"

using namespace cellevo;

TEST(Grid, NodesAndWeights) {
    const Grid g = make_grid(4, 1.0);
    EXPECT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.dx(), 0.25);
    EXPECT_DOUBLE_EQ(g.x(0), 0.0);
    EXPECT_DOUBLE_EQ(g.x(4), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(0), 0.125);
    EXPECT_DOUBLE_EQ(g.weight(2), 0.25);
    EXPECT_DOUBLE_EQ(g.weight(4), 0.125);
    EXPECT_EQ(g.nearest(0.3), 1u);
    EXPECT_EQ(g.nearest(-1.0), 0u);
    EXPECT_EQ(g.nearest(7.0), 4u);
}

TEST(Grid, LastNodePinned) {
    const Grid g = make_grid(3000, 1.0);
    EXPECT_EQ(g.x(3000), 1.0);
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(make_grid(1, 1.0), ConfigError);
    EXPECT_THROW(make_grid(10, 0.0), ConfigError);
    EXPECT_THROW(make_grid(10, -1.0), ConfigError);
}

TEST(Integrate, SquareOnUnitInterval) {
    const Grid g = make_grid(2000, 1.0);
    DensityField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.x(i) * g.x(i);
    // trapezoid error is dx^2/6
    EXPECT_NEAR(integrate(f), 1.0 / 3.0, 1e-7);
    EXPECT_NEAR(integrate(f) - 1.0 / 3.0, 1.0 / (6.0 * 2000.0 * 2000.0), 1e-14);
}

TEST(Integrate, ConstantIsExact) {
    const Grid g = make_grid(7, 2.0);
    DensityField f(g, std::vector<double>(8, 3.0));
    EXPECT_NEAR(integrate(f), 6.0, 1e-14);
}

TEST(Integrate, RejectsNonFinite) {
    const Grid g = make_grid(4, 1.0);
    DensityField f(g);
    f[2] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(integrate(f), NumericalError);
    f[2] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(integrate(f), NumericalError);
}

TEST(DensityField, SizeMismatch) {
    const Grid g = make_grid(4, 1.0);
    EXPECT_ANY_THROW(DensityField(g, std::vector<double>(3, 1.0)));
}

TEST(GaussianBump, MassAndPeak) {
    const Grid g = make_grid(2000, 1.0);
    const auto b = gaussian_bump(g, 0.7, 0.01, 1.0);
    EXPECT_NEAR(integrate(b), 1.0, 1e-12);
    EXPECT_NEAR(argmax_trait(b), 0.7, 1e-12);
    const auto half = gaussian_bump(g, 0.5, 0.05, 0.5);
    EXPECT_NEAR(integrate(half), 0.5, 1e-12);
}

TEST(GaussianBump, RejectsBadArguments) {
    const Grid g = make_grid(100, 1.0);
    EXPECT_THROW(gaussian_bump(g, 0.5, 0.0, 1.0), ConfigError);
    EXPECT_THROW(gaussian_bump(g, 0.5, 0.1, 0.0), ConfigError);
}

TEST(HopfCole, RoundTrip) {
    const Grid g = make_grid(500, 1.0);
    const auto n = gaussian_bump(g, 0.4, 0.05, 2.0);
    const double eps = 0.01;
    const auto back = inverse_hopf_cole(hopf_cole(n, eps), eps);
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] < 1e-250) continue;
        EXPECT_NEAR(back[i], n[i], 1e-12 * n[i]) << i;
    }
}

TEST(HopfCole, FloorsZeros) {
    const Grid g = make_grid(4, 1.0);
    DensityField n(g);
    n[1] = 1.0;
    const auto u = hopf_cole(n, 0.5);
    EXPECT_DOUBLE_EQ(u.values[1], 0.0);
    EXPECT_DOUBLE_EQ(u.values[0], 0.5 * std::log(kDefaultLogFloor));
    EXPECT_TRUE(std::isfinite(u.values[0]));
}

TEST(Diagnostics, ArgmaxTiesGoLow) {
    const Grid g = make_grid(4, 1.0);
    DensityField n(g, {0.0, 2.0, 1.0, 2.0, 0.0});
    EXPECT_EQ(argmax_node(n.values), 1u);
    EXPECT_DOUBLE_EQ(argmax_trait(n), 0.25);
}

TEST(Diagnostics, MeanAndQuantile) {
    const Grid g = make_grid(1000, 1.0);
    DensityField n(g, std::vector<double>(1001, 1.0));
    EXPECT_NEAR(mean_trait(n), 0.5, 1e-12);
    EXPECT_NEAR(mass_quantile(n, 0.5), 0.5, 1e-3);
    EXPECT_NEAR(mass_quantile(n, 0.9), 0.9, 1e-3);
    EXPECT_NEAR(upper_tail_mass_fraction(n, 0.02), 0.02, 2e-3);
    DensityField zero(g);
    EXPECT_THROW(mass_quantile(zero, 0.5), NumericalError);
}
