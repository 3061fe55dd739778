#pragma once

/**
 * @file resolvent.hpp
 * @brief The shifted operator L_o - Gamma on the truncated odd subspace and
 *        its inverse.
 *
 * Gamma is multiplication by an even-parity function gamma(t, x). For constant
 * gamma the operator is diagonal in the eigenbasis, mu_mn - gamma; otherwise it
 * is applied pseudo-spectrally and inverted by GMRES, preconditioned by the
 * diagonal (mu_mn - mean(gamma))^{-1}.
 */

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"
#include "varwave/krylov.hpp"
#include "varwave/slope_field.hpp"

namespace varwave {

class ShiftedWaveOperator {
public:
    /// Constant multiplier.
    ShiftedWaveOperator(SpaceRef space, double gamma)
        : space_(std::move(space)), mu_(odd_mu_vector(*space_)), constant_(gamma),
          mean_(gamma) {}

    /// Variable multiplier sampled on `gamma.grid`.
    ShiftedWaveOperator(SpaceRef space, GridField gamma)
        : space_(std::move(space)), mu_(odd_mu_vector(*space_)), gamma_(std::move(gamma)) {
        const Grid& g = *gamma_->grid;
        const double area = g.wt.sum() * g.wx.sum();
        mean_ = (g.wt.transpose() * gamma_->values * g.wx)(0, 0) / area;
    }

    static ShiftedWaveOperator from_slope(SpaceRef space, const SlopeField& gamma,
                                          const GridRef& grid) {
        if (gamma.is_constant()) return {std::move(space), gamma.constant_value()};
        gamma.require_even(grid);
        return {std::move(space), gamma.sample(grid)};
    }

    Eigen::Index dim() const { return mu_.size(); }
    bool is_diagonal() const { return constant_.has_value(); }
    double mean_gamma() const { return mean_; }
    const SpaceRef& space() const { return space_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
        if (constant_) return (mu_.array() - *constant_).matrix().cwiseProduct(v);
        const SpectralField c = odd_from_vector(space_, v);
        return mu_.cwiseProduct(v) - odd_to_vector(multiply(*gamma_, c));
    }

    /// mu_mn - shift for each flattened odd unknown.
    Eigen::VectorXd diagonal(double shift) const { return (mu_.array() - shift).matrix(); }

    /// Throws when some mu_mn - mean(gamma) is within tol of zero, naming (m, n).
    void require_nonresonant_diagonal(double tol) const {
        const Eigen::VectorXd d = diagonal(mean_);
        for (Eigen::Index k = 0; k < d.size(); ++k)
            if (std::abs(d[k]) <= tol) {
                const ModeIndex mode = odd_index_mode(*space_, k);
                throw NumericalFailure(fmt::format(
                    "resonant truncation: mu({},{}) - gamma = {} is within {} of zero", mode.m,
                    mode.n, d[k], tol));
            }
    }

    /// Inverse of the diagonal part, with entries clamped away from zero.
    Eigen::VectorXd preconditioner(double floor) const {
        Eigen::VectorXd d = diagonal(mean_);
        for (Eigen::Index k = 0; k < d.size(); ++k) {
            if (std::abs(d[k]) < floor) d[k] = d[k] < 0.0 ? -floor : floor;
            d[k] = 1.0 / d[k];
        }
        return d;
    }

    /// Solves (L_o - Gamma) x = rhs. Diagonal case is exact division.
    krylov::GmresResult solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                              const krylov::GmresOptions& opt, double precond_floor) const {
        if (constant_) {
            x = rhs.cwiseQuotient(diagonal(*constant_));
            return {true, 0, 0.0};
        }
        const Eigen::VectorXd pinv = preconditioner(precond_floor);
        return krylov::gmres([&](const Eigen::VectorXd& v) { return apply(v); },
                             [&](const Eigen::VectorXd& v) { return pinv.cwiseProduct(v); }, rhs,
                             x, opt);
    }

private:
    SpaceRef space_;
    Eigen::VectorXd mu_;
    std::optional<double> constant_;
    std::optional<GridField> gamma_;
    double mean_ = 0.0;
};

struct ResolventOptions {
    double kernel_tol = 1e-6;
    double tol = 1e-12;
    int max_iterations = 2000;
};

/// y = (L_o - Gamma)^{-1} rhs on the truncated odd subspace.
inline SpectralField resolvent_apply(const SlopeField& gamma, const SpectralField& rhs,
                                     const GridRef& grid, const ResolventOptions& opt = {}) {
    if (parity_norm(rhs, Parity::Even) > 0.0)
        throw InvalidInput("resolvent_apply: right-hand side must lie in the odd subspace");
    const SpaceRef& space = rhs.space();
    const ShiftedWaveOperator op = ShiftedWaveOperator::from_slope(space, gamma, grid);
    op.require_nonresonant_diagonal(opt.kernel_tol);
    const Eigen::VectorXd b = odd_to_vector(rhs);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    krylov::GmresOptions g;
    g.rtol = opt.tol;
    g.max_iterations = opt.max_iterations;
    const auto res = op.solve(b, x, g, opt.kernel_tol);
    if (!res.converged)
        throw NumericalFailure(fmt::format(
            "resolvent GMRES did not converge: residual {} after {} iterations", res.residual,
            res.iterations));
    return odd_from_vector(space, x);
}

}  // namespace varwave
