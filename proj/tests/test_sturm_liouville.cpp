#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace varwave;

TEST(EigenBasis, ConstantCoefficientIsExact) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(2.5), 20);
    for (int n = 1; n <= 20; ++n) EXPECT_NEAR(b.lambda_sq(n), n * n, 1e-9);
    EXPECT_EQ(b.galerkin_dim(), 128);
    EXPECT_THROW(b.lambda_sq(0), InvalidInput);
    EXPECT_THROW(b.lambda_sq(21), InvalidInput);
}

TEST(EigenBasis, ExponentialShiftsByQuarterSquare) {
    for (double a : {0.5, 1.0, 2.0}) {
        const EigenBasis b = solve_eigenbasis(CoefficientProfile::exponential(a), 15);
        for (int n = 1; n <= 15; ++n) EXPECT_NEAR(b.lambda_sq(n), n * n + a * a / 4.0, 1e-9);
    }
}

TEST(EigenBasis, EigenfunctionsAreWeightedOrthonormal) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::exponential(1.0), 12);
    const Eigen::VectorXd w = b.simpson_weights().cwiseProduct(b.u_on_grid());
    const Eigen::MatrixXd G = b.phi().transpose() * w.asDiagonal() * b.phi();
    EXPECT_LT((G - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EigenBasis, SignConventionPositiveSlopeAtOrigin) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::square_polynomial(), 10);
    Eigen::VectorXd x0(1);
    x0[0] = 0.0;
    const Eigen::MatrixXd d = b.sample_derivative(x0);
    for (int n = 0; n < 10; ++n) EXPECT_GT(d(0, n), 0.0);
}

TEST(EigenBasis, SatisfiesTheEquationPointwise) {
    // -(u phi')' = lambda^2 u phi, checked by central differences of u phi'.
    const auto profile = CoefficientProfile::exponential(1.0);
    const EigenBasis b = solve_eigenbasis(profile, 6);
    const double h = 1e-4;
    for (double x : {0.7, 1.6, 2.9}) {
        Eigen::VectorXd xs(3);
        xs << x - h, x, x + h;
        const Eigen::MatrixXd d = b.sample_derivative(xs);
        const Eigen::MatrixXd v = b.sample(xs);
        for (int n = 0; n < 6; ++n) {
            const double flux_p = profile.u(x + h) * d(2, n), flux_m = profile.u(x - h) * d(0, n);
            const double lhs = -(flux_p - flux_m) / (2.0 * h);
            EXPECT_NEAR(lhs, b.lambda_sq(n + 1) * profile.u(x) * v(1, n), 1e-5 * (n + 1) * (n + 1));
        }
    }
}

TEST(EigenBasis, EigenvaluesIncreaseAndTruncationIsStable) {
    const auto p = CoefficientProfile::exponential(1.5);
    const EigenBasis small = solve_eigenbasis(p, 10);
    EigenBasisOptions opt;
    opt.galerkin_dim = 256;
    const EigenBasis big = solve_eigenbasis(std::make_shared<const CoefficientProfile>(p), 10, opt);
    for (int n = 1; n <= 10; ++n) {
        if (n > 1) {
            EXPECT_GT(small.lambda_sq(n), small.lambda_sq(n - 1));
        }
        EXPECT_NEAR(small.lambda_sq(n), big.lambda_sq(n), 1e-10);
    }
}

TEST(EigenBasis, RejectsBadSizes) {
    const auto p = CoefficientProfile::constant(1.0);
    EXPECT_THROW(solve_eigenbasis(p, 0), InvalidInput);
    EigenBasisOptions opt;
    opt.galerkin_dim = 16;
    EXPECT_THROW(solve_eigenbasis(std::make_shared<const CoefficientProfile>(p), 10, opt), InvalidInput);
}

TEST(Asymptotics, ReportAndSlope) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::exponential(1.0), 12);
    const auto d = asymptotics_report(b);
    ASSERT_EQ(d.size(), 12u);
    for (const auto& e : d) EXPECT_NEAR(e.defect, 0.0, 1e-9);
    EXPECT_THROW(asymptotics_report(solve_eigenbasis(CoefficientProfile::constant(1.0), 5)), InvalidInput);

    std::vector<AsymptoticDefect> synthetic;
    for (int n = 1; n <= 40; ++n) synthetic.push_back({n, 3.0 / (n * n)});
    EXPECT_NEAR(defect_loglog_slope(synthetic, 5, 40), -2.0, 1e-12);
    EXPECT_THROW(defect_loglog_slope(synthetic, 41, 50), InvalidInput);
}
