#pragma once

/**
 * @file nonlinearity.hpp
 * @brief Parametric nonlinearity
 *     f(t, x, y) = c_lin y + c_sat y^3/(1+y^2) + c_osc sin(y) + e(t, x)
 * (already divided by u) and its Nemytskii (superposition) operator.
 *
 * The y-dependent part is odd in y and independent of t; the forcing e is an
 * odd-parity field (T/2-antiperiodic), so the whole map sends the odd subspace
 * into itself.
 */

#include <cmath>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"

namespace varwave {

enum class SymmetryDeclaration { OddOnly, SplitOddEven };

inline std::string to_string(SymmetryDeclaration s) {
    return s == SymmetryDeclaration::OddOnly ? "odd_f1_only" : "split_f1_f2";
}

/// Closed-form slope range [lo, hi] of f'(y) over the real line.
struct SlopeRange {
    double lo;
    double hi;
};

struct NonlinearitySpec {
    double c_lin = 0.0;
    double c_sat = 0.0;
    double c_osc = 0.0;
    std::optional<SpectralField> forcing;
    SymmetryDeclaration symmetry = SymmetryDeclaration::SplitOddEven;

    bool has_forcing() const { return forcing && forcing->norm() > 0.0; }

    /// y-dependent part.
    double odd_part(double y) const {
        return c_lin * y + c_sat * y * y * y / (1.0 + y * y) + c_osc * std::sin(y);
    }

    /// d/dy of the y-dependent part; d/dy[y^3/(1+y^2)] = (y^4 + 3y^2)/(1+y^2)^2.
    double slope(double y) const {
        const double y2 = y * y;
        const double d = 1.0 + y2;
        return c_lin + c_sat * (y2 * y2 + 3.0 * y2) / (d * d) + c_osc * std::cos(y);
    }

    /// The saturating derivative ranges over [0, 9/8] (maximum at y^2 = 3).
    SlopeRange slope_range() const {
        double lo = c_lin, hi = c_lin;
        const double sat = c_sat * 9.0 / 8.0;
        lo += std::min(0.0, sat);
        hi += std::max(0.0, sat);
        lo -= std::abs(c_osc);
        hi += std::abs(c_osc);
        return {lo, hi};
    }

    /// lim f/y as |y| -> infinity.
    double asymptotic_slope() const { return c_lin + c_sat; }

    /// Checks the declared symmetry against the forcing.
    void validate() const {
        if (!std::isfinite(c_lin) || !std::isfinite(c_sat) || !std::isfinite(c_osc))
            throw InvalidInput("nonlinearity coefficients must be finite");
        if (!forcing) return;
        if (symmetry == SymmetryDeclaration::OddOnly && forcing->norm() > 0.0)
            throw HypothesisViolation(
                "symmetry odd_f1_only declared but a nonzero forcing term is present");
        if (parity_norm(*forcing, Parity::Even) > 0.0)
            throw HypothesisViolation(
                "forcing must lie in the odd subspace (T/2-antiperiodic in t)");
    }
};

/// Forcing sampled on `grid` (zero when absent).
inline GridField forcing_on_grid(const NonlinearitySpec& spec, const GridRef& grid) {
    if (!spec.forcing) return GridField::zeros(grid);
    return synthesize(*spec.forcing, grid);
}

/// Pointwise f(t, x, y(t, x)).
inline GridField nemytskii(const NonlinearitySpec& spec, const GridField& y) {
    if (!y.values.allFinite()) throw NumericalFailure("nemytskii: non-finite values in y");
    GridField out = forcing_on_grid(spec, y.grid);
    out.values += y.values.unaryExpr([&](double v) { return spec.odd_part(v); });
    return out;
}

/// Pointwise df/dy(t, x, y(t, x)).
inline GridField nemytskii_slope(const NonlinearitySpec& spec, const GridField& y) {
    if (!y.values.allFinite()) throw NumericalFailure("nemytskii_slope: non-finite values in y");
    return {y.grid, y.values.unaryExpr([&](double v) { return spec.slope(v); })};
}

/// Coefficients of F(y): synthesize on the (dealiased) grid, apply f, analyze.
inline SpectralField apply_nonlinearity(const NonlinearitySpec& spec, const SpectralField& y,
                                        const GridRef& grid) {
    return analyze(nemytskii(spec, synthesize(y, grid)));
}

/// Jacobian action F'(y) v, pseudo-spectrally.
inline SpectralField apply_nonlinearity_jacobian(const NonlinearitySpec& spec,
                                                 const SpectralField& y, const SpectralField& v,
                                                 const GridRef& grid) {
    return multiply(nemytskii_slope(spec, synthesize(y, grid)), v);
}

}  // namespace varwave
