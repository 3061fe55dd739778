#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace varwave;
using varwave::testing::make_basis;
using varwave::testing::small_space;

namespace {

struct UnitProblem {
    SpaceRef space;
    GridRef grid;
    OperatorSpectrum spectrum;
};

UnitProblem unit_setup() {
    const auto b = make_basis(CoefficientProfile::constant(1.0), 12);
    const auto per = RationalPeriod::make(2, 1);
    const SpaceRef s = make_space(b, per, 11, 12);
    return {s, make_grid(s, 1.5), odd_spectrum(*b, per, 11, 12)};
}

}  // namespace

TEST(EstimateDelta, ConstantMatchesEnumeration) {
    const UnitProblem u = unit_setup();
    const DeltaEstimate d = estimate_delta(SlopeField::constant(-0.25), u.space, u.grid);
    EXPECT_NEAR(d.delta, 1.0, 1e-10);
    EXPECT_FALSE(d.near_singular);
    const DeltaEstimate r = estimate_delta(SlopeField::constant(0.75), u.space, u.grid);
    EXPECT_TRUE(r.near_singular);
    EXPECT_LT(r.delta, 1e-9);
}

TEST(EstimateDelta, VariableMatchesDenseSvd) {
    const SpaceRef s = small_space(5, 6, CoefficientProfile::exponential(0.6));
    const GridRef g = make_grid(s, 1.5);
    const double w = 4.0 * kPi / s->T();
    const SlopeField gamma = SlopeField::function(
        [&](double t, double x) { return -0.3 + 0.25 * std::cos(w * t) * std::sin(x); }, "var");
    const ShiftedWaveOperator op = ShiftedWaveOperator::from_slope(s, gamma, g);
    Eigen::MatrixXd A(op.dim(), op.dim());
    for (Eigen::Index k = 0; k < op.dim(); ++k) A.col(k) = op.apply(Eigen::VectorXd::Unit(op.dim(), k));
    EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    const double sigma_min = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues().minCoeff();
    const DeltaEstimate d = estimate_delta(gamma, s, g);
    EXPECT_NEAR(d.delta, sigma_min, 1e-8);
}

TEST(Nonresonance, PassesInsideTheGap) {
    const UnitProblem u = unit_setup();
    const NonresonanceReport r = check_nonresonance(SlopeField::constant(-1.15), SlopeField::constant(0.65),
                                                    u.spectrum, u.space, u.grid);
    EXPECT_TRUE(r.verdict) << r.message;
    EXPECT_DOUBLE_EQ(r.lambda_lower, -1.25);
    EXPECT_DOUBLE_EQ(r.lambda_upper, 0.75);
    ASSERT_EQ(r.kernel_lower.size(), 1u);
    EXPECT_EQ(r.kernel_lower[0], (ModeIndex{3, 1}));
    // Gram form of a constant weight c over an orthonormal-in-plain-measure pair is c.
    EXPECT_NEAR(r.gram_lower, 0.1, 1e-12);
    EXPECT_NEAR(r.gram_upper, 0.1, 1e-12);
    EXPECT_NEAR(r.epsilon_margin, 0.1 - 1e-3, 1e-6);
}

TEST(Nonresonance, FailsAtTheEigenvalue) {
    const UnitProblem u = unit_setup();
    const NonresonanceReport r = check_nonresonance(SlopeField::constant(-1.25), SlopeField::constant(0.65),
                                                    u.spectrum, u.space, u.grid);
    EXPECT_FALSE(r.verdict);
    EXPECT_LE(r.gram_lower, 1e-10);
}

TEST(Nonresonance, FailsWhenNotBracketed) {
    const UnitProblem u = unit_setup();
    const NonresonanceReport r = check_nonresonance(SlopeField::constant(-0.25), SlopeField::constant(0.8),
                                                    u.spectrum, u.space, u.grid);
    EXPECT_FALSE(r.bracketing_ok);
    EXPECT_FALSE(r.verdict);
}

TEST(Nonresonance, VariableSlopeTouchingTheEigenvalue) {
    // alpha equals lambda_lower except on part of the domain: the Gram form stays positive.
    const UnitProblem u = unit_setup();
    const double w = 4.0 * kPi / u.space->T();
    const SlopeField alpha = SlopeField::function(
        [&](double t, double) { return -1.25 + 0.1 * (1.0 + std::cos(w * t)); }, "touching");
    for (bool weighted : {false, true}) {
        NonresonanceOptions opt;
        opt.weighted_gram = weighted;
        opt.compute_margin = false;
        const NonresonanceReport r =
            check_nonresonance(alpha, SlopeField::constant(0.5), u.spectrum, u.space, u.grid, opt);
        EXPECT_TRUE(r.verdict) << r.message;
        EXPECT_GT(r.gram_lower, 1e-3);
    }
}

TEST(WeakResidual, SmallForSolutionsLargeOtherwise) {
    const UnitProblem u = unit_setup();
    NonlinearitySpec spec;
    spec.c_lin = -0.25;
    spec.forcing = SpectralField::unit(u.space, 1, 1, Trig::Cos, 1.0);
    const SpectralField y = SpectralField::unit(u.space, 1, 1, Trig::Cos, 1.0);
    EXPECT_LT(weak_residual(y, spec, u.grid), 1e-12);
    const SpectralField wrong = SpectralField::unit(u.space, 1, 1, Trig::Cos, 1.5);
    EXPECT_GT(weak_residual(wrong, spec, u.grid), 1e-3);
    SpectralField hidden = y;
    hidden.set(11, 12, Trig::Sin, 1e-3);
    EXPECT_GT(weak_residual(hidden, spec, u.grid), 1e-7);
}

TEST(WeakResidual, PureForcingOracle) {
    // f = e with e = (1,1)-cos: y = e / mu_11 = (4/3) (1,1)-cos.
    const UnitProblem u = unit_setup();
    NonlinearitySpec spec;
    spec.forcing = SpectralField::unit(u.space, 1, 1, Trig::Cos, 1.0);
    const SpectralField y = SpectralField::unit(u.space, 1, 1, Trig::Cos, 4.0 / 3.0);
    EXPECT_LE(weak_residual(y, spec, u.grid), 1e-6);
    EXPECT_LT((apply_L(y) - apply_nonlinearity(spec, y, u.grid)).norm(), 1e-14);
}

TEST(GlobalSlopes, InclusiveBoundsAndForcing) {
    NonlinearitySpec f;
    f.c_lin = -0.25;
    f.c_osc = 0.125;
    EXPECT_TRUE(check_global_slopes(f, -0.375, -0.125).pass);
    EXPECT_FALSE(check_global_slopes(f, -0.3, -0.125).pass);
    const UnitProblem u = unit_setup();
    f.forcing = SpectralField::unit(u.space, 1, 1, Trig::Cos, 1.0);
    EXPECT_THROW(check_global_slopes(f, -1.0, 1.0), HypothesisViolation);
}
