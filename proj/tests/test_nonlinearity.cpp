#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace varwave;
using varwave::testing::small_space;

TEST(Nonlinearity, SlopeMatchesDerivative) {
    NonlinearitySpec f;
    f.c_lin = -0.3;
    f.c_sat = 0.7;
    f.c_osc = 0.2;
    const double h = 1e-6;
    for (double y = -6.0; y <= 6.0; y += 0.37)
        EXPECT_NEAR(f.slope(y), (f.odd_part(y + h) - f.odd_part(y - h)) / (2 * h), 1e-8);
}

TEST(Nonlinearity, SlopeRangeEnclosesSamples) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        NonlinearitySpec f;
        f.c_lin = c(rng);
        f.c_sat = c(rng);
        f.c_osc = c(rng);
        const SlopeRange r = f.slope_range();
        for (double y = -20.0; y <= 20.0; y += 0.01) {
            EXPECT_GE(f.slope(y), r.lo - 1e-14);
            EXPECT_LE(f.slope(y), r.hi + 1e-14);
        }
    }
    NonlinearitySpec sat;
    sat.c_sat = 1.0;
    EXPECT_NEAR(sat.slope(std::sqrt(3.0)), 9.0 / 8.0, 1e-14);
    EXPECT_EQ(sat.slope_range().hi, 9.0 / 8.0);
    EXPECT_EQ(sat.asymptotic_slope(), 1.0);
}

TEST(Nonlinearity, SymmetryValidation) {
    const SpaceRef s = small_space();
    NonlinearitySpec f;
    f.symmetry = SymmetryDeclaration::OddOnly;
    f.forcing = SpectralField::unit(s, 1, 1, Trig::Cos, 0.5);
    EXPECT_THROW(f.validate(), HypothesisViolation);
    f.symmetry = SymmetryDeclaration::SplitOddEven;
    EXPECT_NO_THROW(f.validate());
    f.forcing = SpectralField::unit(s, 2, 1, Trig::Cos, 0.5);
    EXPECT_THROW(f.validate(), HypothesisViolation);
    f.forcing.reset();
    f.c_lin = std::numeric_limits<double>::infinity();
    EXPECT_THROW(f.validate(), InvalidInput);
}

TEST(Nonlinearity, NemytskiiPointwiseAndForcing) {
    const SpaceRef s = small_space();
    const GridRef g = make_grid(s, 1.5);
    NonlinearitySpec f;
    f.c_lin = 2.0;
    f.forcing = SpectralField::unit(s, 1, 1, Trig::Cos, 0.25);
    std::mt19937_64 rng(7);
    const SpectralField y = random_odd_field(s, rng, 1.0);
    const SpectralField F = apply_nonlinearity(f, y, g);
    EXPECT_LT((F - (2.0 * y + *f.forcing)).norm(), 1e-12);
    GridField bad = synthesize(y, g);
    bad.values(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(nemytskii(f, bad), NumericalFailure);
}

TEST(Nonlinearity, JacobianOfLinearPartIsExact) {
    const SpaceRef s = small_space();
    const GridRef g = make_grid(s, 1.5);
    NonlinearitySpec f;
    f.c_lin = -0.25;
    std::mt19937_64 rng(8);
    const SpectralField y = random_odd_field(s, rng, 3.0);
    const SpectralField v = random_odd_field(s, rng, 1.0);
    EXPECT_LT((apply_nonlinearity_jacobian(f, y, v, g) - (-0.25) * v).norm(), 1e-13);
}
