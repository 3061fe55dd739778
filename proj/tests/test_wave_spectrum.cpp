#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace varwave;
using varwave::testing::make_basis;

TEST(RationalPeriod, Validation) {
    EXPECT_THROW(RationalPeriod::make(4, 2), InvalidInput);
    EXPECT_THROW(RationalPeriod::make(0, 1), InvalidInput);
    EXPECT_NEAR(RationalPeriod::make(2, 3).T(), 4.0 * kPi / 3.0, 1e-15);
    EXPECT_THROW(RationalPeriod::make(3, 2).require_even_p(), HypothesisViolation);
    EXPECT_NO_THROW(RationalPeriod::make(2, 1).require_even_p());
}

TEST(Mu, ExactForConstantCoefficient) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(1.0), 10);
    const auto per = RationalPeriod::make(2, 1);
    EXPECT_EQ(mu(b, per, 1, 1), 0.75);
    EXPECT_EQ(mu(b, per, 3, 1), -1.25);
    EXPECT_EQ(time_frequency_sq(RationalPeriod::make(4, 3), 5), 225.0 / 16.0);
}

TEST(OddSpectrum, UnitCoefficientExample) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(1.0), 12);
    const OperatorSpectrum s = odd_spectrum(b, RationalPeriod::make(2, 1), 11, 12);
    EXPECT_EQ(s.entries().size(), 6u * 12u);
    for (const auto& e : s.entries()) EXPECT_EQ(e.m % 2, 1);
    EXPECT_DOUBLE_EQ(s.min_abs_mu(), 0.75);
    const ConsecutivePair pair = consecutive_pair(s, 0.0);
    EXPECT_DOUBLE_EQ(pair.lower, -1.25);
    EXPECT_DOUBLE_EQ(pair.upper, 0.75);
    EXPECT_TRUE(kernel_basis(s, 0.0).empty());
    const auto k = kernel_basis(s, 0.75);
    ASSERT_EQ(k.size(), 1u);
    EXPECT_EQ(k[0], (ModeIndex{1, 1}));
}

TEST(OddSpectrum, SortedAndGrouped) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(1.0), 20);
    const OperatorSpectrum s = odd_spectrum(b, RationalPeriod::make(2, 1), 21, 20);
    for (std::size_t i = 1; i < s.entries().size(); ++i)
        EXPECT_LE(s.entries()[i - 1].mu, s.entries()[i].mu);
    int total = 0;
    const auto values = s.distinct_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        total += values[i].index_pairs;
        if (i > 0) {
            EXPECT_GT(values[i].value - values[i - 1].value, s.kernel_tol());
        }
    }
    EXPECT_EQ(total, static_cast<int>(s.entries().size()));
    // mu = 4 - 1/4 = 15/4 and 16 - 49/4 = 15/4: a two-fold value.
    EXPECT_EQ(kernel_basis(s, 3.75).size(), 2u);
}

TEST(OddSpectrum, OddPIsAHypothesisViolation) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(1.0), 10);
    EXPECT_THROW(odd_spectrum(b, RationalPeriod::make(3, 2), 5, 10), HypothesisViolation);
}

TEST(EvenSpectrum, ContainsKernel) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(1.0), 10);
    const OperatorSpectrum s = even_spectrum(b, RationalPeriod::make(2, 1), 8, 10);
    const auto k = kernel_basis(s, 0.0);
    ASSERT_FALSE(k.empty());
    EXPECT_EQ(k.front(), (ModeIndex{2, 1}));
}

TEST(ConsecutivePair, Errors) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::constant(1.0), 12);
    const OperatorSpectrum s = odd_spectrum(b, RationalPeriod::make(2, 1), 11, 12);
    EXPECT_THROW(consecutive_pair(s, 0.75), InvalidInput);
    EXPECT_THROW(consecutive_pair(s, 1e9), InvalidInput);
    // Window too small: modes with m > 3 would fall between the bracketing values.
    const OperatorSpectrum tiny = odd_spectrum(b, RationalPeriod::make(2, 1), 3, 12);
    EXPECT_THROW(consecutive_pair(tiny, 10.0), InvalidInput);
}

TEST(OddSpectrum, ExponentialCoefficientShiftsValues) {
    const EigenBasis b = solve_eigenbasis(CoefficientProfile::exponential(1.0), 12);
    const OperatorSpectrum s = odd_spectrum(b, RationalPeriod::make(2, 1), 11, 12);
    const ConsecutivePair pair = consecutive_pair(s, 0.25);
    EXPECT_NEAR(pair.lower, -1.0, 1e-9);
    EXPECT_NEAR(pair.upper, 1.0, 1e-9);
}
