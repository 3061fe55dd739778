#pragma once

/**
 * @file verification.hpp
 * @brief Numerical checks of the nonresonance hypotheses and of computed
 *        solutions.
 *
 *  - check_nonresonance: pointwise bracketing lambda_lower <= alpha <= beta <=
 *    lambda_upper plus strict positivity of the kernel Gram forms
 *        int (alpha - lambda_lower) v_k v_l dt dx   on ker(L_o - lambda_lower),
 *        int (lambda_upper - beta)  w_k w_l dt dx   on ker(L_o - lambda_upper),
 *    in plain Lebesgue measure unless the weighted variant is requested.
 *  - estimate_delta: smallest singular value of L_o - Gamma on the truncation,
 *    by Lanczos on the inverse operator.
 *  - weak_residual: the weak-form defect against smooth periodic-Dirichlet
 *    test functions.
 *  - check_global_slopes: closed-form interval bound of f'(y) against [alpha, beta].
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"
#include "varwave/krylov.hpp"
#include "varwave/nonlinearity.hpp"
#include "varwave/resolvent.hpp"
#include "varwave/slope_field.hpp"
#include "varwave/wave_spectrum.hpp"

namespace varwave {

struct DeltaEstimate {
    double delta = 0.0;
    bool near_singular = false;
    int lanczos_steps = 0;
};

struct DeltaOptions {
    double kernel_tol = 1e-6;
    double rtol = 1e-12;
    int max_steps = 300;
};

/// Smallest singular value of (L_o - Gamma_gamma) on the truncated odd subspace.
/// The operator is symmetric, so this is 1 / (largest |eigenvalue| of its inverse).
inline DeltaEstimate estimate_delta(const SlopeField& gamma, const SpaceRef& space,
                                    const GridRef& grid, const DeltaOptions& opt = {}) {
    const ShiftedWaveOperator op = ShiftedWaveOperator::from_slope(space, gamma, grid);
    DeltaEstimate out;
    if (op.is_diagonal()) {
        const double min_diag = op.diagonal(gamma.constant_value()).cwiseAbs().minCoeff();
        if (min_diag <= opt.kernel_tol) {
            out.delta = min_diag;
            out.near_singular = true;
            return out;
        }
    }
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd start(op.dim());
    for (Eigen::Index k = 0; k < start.size(); ++k) start[k] = gauss(rng);

    krylov::GmresOptions g;
    g.rtol = 1e-13;
    bool solve_failed = false;
    auto inverse = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(v.size());
        const auto r = op.solve(v, x, g, 1e-3);
        if (!r.converged) solve_failed = true;
        return x;
    };
    krylov::LanczosOptions lo;
    lo.rtol = opt.rtol;
    lo.max_steps = opt.max_steps;
    const auto res = krylov::lanczos_largest_magnitude(inverse, start, lo);
    out.lanczos_steps = res.steps;
    if (solve_failed) {
        out.delta = 0.0;
        out.near_singular = true;
        return out;
    }
    if (!res.converged)
        throw NumericalFailure(fmt::format("Lanczos did not converge in {} steps", res.steps));
    out.delta = 1.0 / std::abs(res.value);
    out.near_singular = out.delta <= opt.kernel_tol;
    return out;
}

struct NonresonanceOptions {
    /// Level used to pick the consecutive pair; defaults to the midpoint of [min alpha, max beta].
    std::optional<double> level;
    /// Use the u-weighted measure in the Gram forms instead of plain dt dx.
    bool weighted_gram = false;
    /// Floor on delta for the reported epsilon margin.
    double margin_delta_floor = 1e-3;
    bool compute_margin = true;
    double gram_tol = 1e-10;
};

struct NonresonanceReport {
    double lambda_lower = std::numeric_limits<double>::quiet_NaN();
    double lambda_upper = std::numeric_limits<double>::quiet_NaN();
    bool bracketing_ok = false;
    double gram_lower = std::numeric_limits<double>::infinity();
    double gram_upper = std::numeric_limits<double>::infinity();
    std::vector<ModeIndex> kernel_lower;
    std::vector<ModeIndex> kernel_upper;
    double epsilon_margin = 0.0;
    bool verdict = false;
    std::string message;
};

namespace detail {

/// Smallest eigenvalue of int weight * v_k v_l over the kernel basis functions.
inline double kernel_gram_min(const std::vector<ModeIndex>& kernel, const GridField& weight,
                              const SpaceRef& space, bool weighted) {
    if (kernel.empty()) return std::numeric_limits<double>::infinity();
    const GridRef& grid = weight.grid;
    std::vector<GridField> v;
    for (const auto& k : kernel) {
        v.push_back(synthesize(SpectralField::unit(space, k.m, k.n, Trig::Cos), grid));
        if (k.m > 0) v.push_back(synthesize(SpectralField::unit(space, k.m, k.n, Trig::Sin), grid));
    }
    const auto dim = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd M(dim, dim);
    const Eigen::VectorXd wx = weighted ? grid->wx.cwiseProduct(grid->u) : grid->wx;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Eigen::MatrixXd prod = weight.values.cwiseProduct(v[i].values).cwiseProduct(v[j].values);
            M(i, j) = M(j, i) = (grid->wt.transpose() * prod * wx)(0, 0);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace detail

/// Checks bracketing and kernel positivity for alpha, beta against the odd spectrum.
inline NonresonanceReport check_nonresonance(const SlopeField& alpha, const SlopeField& beta,
                                             const OperatorSpectrum& spectrum,
                                             const SpaceRef& space, const GridRef& grid,
                                             const NonresonanceOptions& opt = {}) {
    alpha.require_even(grid);
    beta.require_even(grid);
    NonresonanceReport r;
    const GridField a = alpha.sample(grid);
    const GridField b = beta.sample(grid);
    const double level = opt.level.value_or(0.5 * (a.values.minCoeff() + b.values.maxCoeff()));
    try {
        const ConsecutivePair pair = consecutive_pair(spectrum, level);
        r.lambda_lower = pair.lower;
        r.lambda_upper = pair.upper;
    } catch (const InvalidInput& e) {
        r.message = e.what();
        return r;
    }
    r.bracketing_ok = (a.values.array() >= r.lambda_lower).all() &&
                      (a.values.array() <= b.values.array()).all() &&
                      (b.values.array() <= r.lambda_upper).all();

    r.kernel_lower = kernel_basis(spectrum, r.lambda_lower);
    r.kernel_upper = kernel_basis(spectrum, r.lambda_upper);
    GridField lower_weight{grid, (a.values.array() - r.lambda_lower).matrix()};
    GridField upper_weight{grid, (r.lambda_upper - b.values.array()).matrix()};
    r.gram_lower = detail::kernel_gram_min(r.kernel_lower, lower_weight, space, opt.weighted_gram);
    r.gram_upper = detail::kernel_gram_min(r.kernel_upper, upper_weight, space, opt.weighted_gram);
    r.verdict = r.bracketing_ok && r.gram_lower > opt.gram_tol && r.gram_upper > opt.gram_tol;
    if (!r.bracketing_ok) r.message = "alpha/beta are not bracketed by the consecutive pair";
    else if (!r.verdict) r.message = "kernel Gram form is not strictly positive";

    if (opt.compute_margin && r.verdict) {
        // delta is 1-Lipschitz in a constant shift, so from eps with delta(eps) = d no
        // shift below eps + (d - floor) can bring delta under the floor.
        DeltaOptions dopt;
        dopt.kernel_tol = spectrum.kernel_tol();
        auto worst = [&](double eps) {
            const auto lo = estimate_delta(alpha.shifted(-eps), space, grid, dopt);
            const auto hi = estimate_delta(beta.shifted(eps), space, grid, dopt);
            return std::min(lo.delta, hi.delta);
        };
        const double span = r.lambda_upper - r.lambda_lower;
        const double min_step = 1e-9 * std::max(1.0, span);
        double eps = 0.0;
        double d = worst(0.0);
        if (d < opt.margin_delta_floor) {
            r.epsilon_margin = 0.0;
        } else {
            for (int it = 0; it < 10000 && eps < span; ++it) {
                const double step = d - opt.margin_delta_floor;
                if (step < min_step) break;
                const double next = std::min(span, eps + step);
                d = worst(next);
                if (d < opt.margin_delta_floor) break;
                eps = next;
            }
            r.epsilon_margin = eps;
        }
    }
    return r;
}

struct WeakResidualOptions {
    int num_tests = 16;
    std::uint64_t seed = 0;
};

/// max over random test functions psi of
/// |int y (u psi_tt - (u psi_x)_x) - int u f(y) psi| / ||psi||.
/// Each psi = sum_{j <= m_max, k <= n_max} (a_jk cos(w j t) + b_jk sin(w j t)) sin(k x)
/// with Gaussian a_jk, b_jk damped by 1 / (1 + j^2 + k^2).
inline double weak_residual(const SpectralField& y, const NonlinearitySpec& spec,
                            const GridRef& grid, const WeakResidualOptions& opt = {}) {
    if (!(*y.space() == *grid->space)) throw InvalidInput("weak_residual: grid/field mismatch");
    if (opt.num_tests < 1) throw InvalidInput("weak_residual: num_tests must be >= 1");
    const SpectralSpace& s = *y.space();
    const GridField yg = synthesize(y, grid);
    const GridField fy = nemytskii(spec, yg);
    const double omega = 2.0 * kPi / s.T();
    const int M = s.m_max(), N = s.n_max();

    Eigen::MatrixXd ct(grid->n_t, M + 1), st(grid->n_t, M + 1);
    for (int i = 0; i < grid->n_t; ++i)
        for (int j = 0; j <= M; ++j) {
            ct(i, j) = std::cos(omega * j * grid->t[i]);
            st(i, j) = std::sin(omega * j * grid->t[i]);
        }
    Eigen::MatrixXd sx(grid->n_x, N), cx(grid->n_x, N);
    for (int l = 0; l < grid->n_x; ++l)
        for (int k = 1; k <= N; ++k) {
            sx(l, k - 1) = std::sin(k * grid->x[l]);
            cx(l, k - 1) = std::cos(k * grid->x[l]);
        }
    Eigen::VectorXd time_sq(M + 1), kk(N);
    for (int j = 0; j <= M; ++j) time_sq[j] = (omega * j) * (omega * j);
    for (int k = 1; k <= N; ++k) kk[k - 1] = k;

    const Eigen::MatrixXd uy = yg.values * grid->u.asDiagonal();
    const Eigen::MatrixXd dy = yg.values * grid->du.asDiagonal();
    const Eigen::MatrixXd uf = fy.values * grid->u.asDiagonal();

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int test = 0; test < opt.num_tests; ++test) {
        Eigen::MatrixXd a(M + 1, N), b(M + 1, N);
        for (int j = 0; j <= M; ++j)
            for (int k = 1; k <= N; ++k) {
                const double damp = 1.0 / (1.0 + j * j + k * k);
                a(j, k - 1) = damp * gauss(rng);
                b(j, k - 1) = (j == 0) ? 0.0 : damp * gauss(rng);
            }
        const Eigen::MatrixXd time = ct * a + st * b;                                  // n_t x N
        const Eigen::MatrixXd time_tt = -(ct * (time_sq.asDiagonal() * a) + st * (time_sq.asDiagonal() * b));
        const Eigen::MatrixXd psi = time * sx.transpose();
        const Eigen::MatrixXd psi_tt = time_tt * sx.transpose();
        const Eigen::MatrixXd psi_x = time * kk.asDiagonal() * cx.transpose();
        const Eigen::MatrixXd psi_xx = -(time * kk.cwiseProduct(kk).asDiagonal() * sx.transpose());
        // y (u psi_tt - u' psi_x - u psi_xx) - u f psi
        const Eigen::MatrixXd integrand = uy.cwiseProduct(psi_tt - psi_xx) -
                                          dy.cwiseProduct(psi_x) - uf.cwiseProduct(psi);
        const double defect = (grid->wt.transpose() * integrand * grid->wx)(0, 0);
        const GridField pg{grid, psi};
        const double pnorm = std::sqrt(weighted_inner(pg, pg));
        if (pnorm > 0.0) worst = std::max(worst, std::abs(defect) / pnorm);
    }
    return worst;
}

struct GlobalSlopeReport {
    SlopeRange range;
    bool pass = false;
};

/// Incremental slopes of f lie in [alpha, beta] for all y (closed-form interval bound).
inline GlobalSlopeReport check_global_slopes(const NonlinearitySpec& spec, double alpha,
                                             double beta) {
    if (spec.has_forcing())
        throw HypothesisViolation("global slope check requires zero forcing (odd family)");
    GlobalSlopeReport r;
    r.range = spec.slope_range();
    r.pass = r.range.lo >= alpha && r.range.hi <= beta;
    return r;
}

}  // namespace varwave
