#pragma once

/**
 * @file solver.hpp
 * @brief Periodic solutions in the odd subspace by natural-parameter
 *        continuation of
 *            L_o y - (1 - s) alpha y - s F_o(y) = 0,   s: 0 -> 1,
 *        with a matrix-free Newton-GMRES corrector at each step.
 *
 * At s = 0 the operator L_o - alpha is invertible, so y = 0 is the unique
 * starting point. The Jacobian at s is L_o - Gamma_gamma with
 * gamma = (1 - s) alpha + s f'(y), applied pseudo-spectrally on the dealiased
 * grid and preconditioned by (mu_mn - mean(gamma))^{-1}.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"
#include "varwave/krylov.hpp"
#include "varwave/nonlinearity.hpp"
#include "varwave/resolvent.hpp"
#include "varwave/slope_field.hpp"
#include "varwave/verification.hpp"

namespace varwave {

struct SolveConfig {
    int m_max = 15;
    int n_max = 16;
    SlopeField alpha = SlopeField::constant(-0.25);
    SlopeField beta = SlopeField::constant(-0.25);
    int continuation_steps = 10;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double R_clamp = 10.0;
    std::uint64_t seed = 0;
    double dealias = 1.5;
    double kernel_tol = 1e-6;
    double symmetry_tol = 1e-8;
};

struct PathPoint {
    double s;
    double norm;
    int newton_iters;
};

struct SolveReport {
    SpectralField solution;
    double residual_norm = 0.0;
    double even_norm = 0.0;
    std::vector<PathPoint> continuation_path;
    double apriori_bound = 0.0;
    bool bound_satisfied = false;
    double delta_num = 0.0;
    double h_R_norm = 0.0;
    double clamp_min = 0.0;
    double clamp_max = 0.0;
};

/// Newton failed part-way along the homotopy; carries the path so far.
class ContinuationFailure : public NumericalFailure {
public:
    ContinuationFailure(const std::string& what, std::vector<PathPoint> path)
        : NumericalFailure(what), path_(std::move(path)) {}
    const std::vector<PathPoint>& path() const { return path_; }

private:
    std::vector<PathPoint> path_;
};

/// The clamp slope: f(y)/y for |y| >= R, and for |y| < R the linear blend
///     R^{-1} f(+-R) (y/R) + (1 -+ y/R) alpha
/// towards alpha at y = 0. `forcing` is e(t, x) at the same point.
inline double clamp_slope_g(const NonlinearitySpec& spec, double alpha, double forcing,
                            double R, double y) {
    if (!(R > 0.0)) throw InvalidInput(fmt::format("clamp radius R must be positive, got {}", R));
    auto f = [&](double v) { return spec.odd_part(v) + forcing; };
    if (std::abs(y) >= R) return f(y) / y;
    if (y >= 0.0) return f(R) / R * (y / R) + (1.0 - y / R) * alpha;
    return f(-R) / R * (y / R) + (1.0 + y / R) * alpha;
}

/// e(t, x) at a single point.
inline double forcing_at(const NonlinearitySpec& spec, double t, double x) {
    if (!spec.forcing) return 0.0;
    const SpectralField& e = *spec.forcing;
    const SpectralSpace& s = *e.space();
    Eigen::VectorXd xs(1);
    xs[0] = x;
    const Eigen::RowVectorXd phi = s.basis().sample(xs).row(0).head(s.n_max());
    const double T = s.T();
    const double omega = 2.0 * kPi / T;
    double acc = 0.0;
    for (int m = 0; m <= s.m_max(); ++m) {
        const double Tm = (m == 0) ? 1.0 / std::sqrt(T) : std::sqrt(2.0 / T);
        const double c = Tm * std::cos(omega * m * t), sn = Tm * std::sin(omega * m * t);
        acc += c * e.a().row(m).dot(phi) + sn * e.b().row(m).dot(phi);
    }
    return acc;
}

namespace detail {

/// Weighted L2 norm of the envelope h_R = (|c_lin| + |c_sat|) R + |c_osc| + |e|.
inline double envelope_norm(const NonlinearitySpec& spec, double R, const GridRef& grid) {
    GridField e = forcing_on_grid(spec, grid);
    const double base = (std::abs(spec.c_lin) + std::abs(spec.c_sat)) * R + std::abs(spec.c_osc);
    GridField h{grid, (e.values.cwiseAbs().array() + base).matrix()};
    return std::sqrt(weighted_inner(h, h));
}

struct AprioriBound {
    double bound;
    double delta;
    double h_R;
};

/// (2 ||h_R|| + pi T ||alpha||_inf) / delta, with delta the smaller of the
/// singular-value estimates at alpha and beta.
inline AprioriBound apriori_bound(const NonlinearitySpec& spec, const SolveConfig& cfg,
                                  const SpaceRef& space, const GridRef& grid) {
    DeltaOptions dopt;
    dopt.kernel_tol = cfg.kernel_tol;
    const auto da = estimate_delta(cfg.alpha, space, grid, dopt);
    const auto db = estimate_delta(cfg.beta, space, grid, dopt);
    const double delta = std::min(da.delta, db.delta);
    const double h = envelope_norm(spec, cfg.R_clamp, grid);
    const double numer = 2.0 * h + kPi * space->T() * cfg.alpha.sup_abs(grid);
    const double bound =
        delta > 0.0 ? numer / delta : std::numeric_limits<double>::infinity();
    return {bound, delta, h};
}

/// Residual of the homotopy at s, restricted to the odd subspace, plus the
/// scale used in the relative stopping test.
struct HomotopyResidual {
    Eigen::VectorXd r;
    double scale;
    double even_norm_F;
};

inline HomotopyResidual homotopy_residual(const NonlinearitySpec& spec, const SpectralField& y,
                                          const GridField& alpha, double s) {
    const SpectralField F = apply_nonlinearity(spec, y, alpha.grid);
    const SpectralField ay = multiply(alpha, y);
    SpectralField rhs = (1.0 - s) * ay + s * F;
    SpectralField res = apply_L(y) - rhs;
    return {odd_to_vector(res), rhs.norm(), parity_norm(F, Parity::Even)};
}

struct NewtonOutcome {
    SpectralField y;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

inline NewtonOutcome newton(const NonlinearitySpec& spec, SpectralField y, const GridField& alpha,
                            double s, const SolveConfig& cfg) {
    const SpaceRef& space = y.space();
    const GridRef& grid = alpha.grid;
    NewtonOutcome out;
    HomotopyResidual hr = homotopy_residual(spec, y, alpha, s);
    for (int it = 0; it <= cfg.newton_max_iter; ++it) {
        if (hr.even_norm_F > cfg.symmetry_tol * (1.0 + y.norm()))
            throw NumericalFailure(fmt::format(
                "symmetry violation: even part of F(y) has norm {} at s={}", hr.even_norm_F, s));
        const double rn = hr.r.norm();
        out.residual = rn;
        if (!std::isfinite(rn)) break;
        if (rn <= cfg.newton_tol * (1.0 + hr.scale)) {
            out.converged = true;
            break;
        }
        if (it == cfg.newton_max_iter) break;
        out.iterations = it + 1;

        GridField gamma = nemytskii_slope(spec, synthesize(y, grid));
        gamma.values = (1.0 - s) * alpha.values + s * gamma.values;
        const ShiftedWaveOperator J(space, gamma);
        J.require_nonresonant_diagonal(cfg.kernel_tol);
        Eigen::VectorXd step = Eigen::VectorXd::Zero(hr.r.size());
        krylov::GmresOptions g;
        g.rtol = 1e-12;
        const auto gr = J.solve(-hr.r, step, g, cfg.kernel_tol);
        if (!gr.converged && gr.residual > 1e-6 * rn) break;

        // Backtracking on the residual norm.
        double t = 1.0;
        SpectralField trial = y + t * odd_from_vector(space, step);
        HomotopyResidual trial_r = homotopy_residual(spec, trial, alpha, s);
        for (int half = 0; half < 12 && !(trial_r.r.norm() <= (1.0 - 1e-4 * t) * rn); ++half) {
            t *= 0.5;
            trial = y + t * odd_from_vector(space, step);
            trial_r = homotopy_residual(spec, trial, alpha, s);
        }
        y = std::move(trial);
        y.set_parity_tag(ParityTag::Odd);
        hr = std::move(trial_r);
    }
    out.y = std::move(y);
    return out;
}

}  // namespace detail

/// Traverses the homotopy from s = 0 to 1 in equal steps.
inline SolveReport continuation_solve(const NonlinearitySpec& spec, const SolveConfig& cfg,
                                      const SpaceRef& space) {
    spec.validate();
    if (cfg.continuation_steps < 1) throw InvalidInput("continuation_steps must be >= 1");
    space->period().require_even_p();
    const GridRef grid = make_grid(space, cfg.dealias);
    cfg.alpha.require_even(grid);
    const GridField alpha = cfg.alpha.sample(grid);

    SolveReport report;
    // s = 0: (L_o - alpha) y = 0 has only the trivial solution.
    SpectralField y = resolvent_apply(cfg.alpha, SpectralField(space, ParityTag::Odd), grid,
                                      {cfg.kernel_tol, 1e-12, 2000});
    report.continuation_path.push_back({0.0, y.norm(), 0});

    for (int k = 1; k <= cfg.continuation_steps; ++k) {
        const double s = static_cast<double>(k) / cfg.continuation_steps;
        auto step = detail::newton(spec, y, alpha, s, cfg);
        report.continuation_path.push_back({s, step.y.norm(), step.iterations});
        if (!step.converged)
            throw ContinuationFailure(
                fmt::format("Newton did not converge at s={} (residual {} after {} iterations)",
                            s, step.residual, step.iterations),
                report.continuation_path);
        y = std::move(step.y);
    }

    y.set_parity_tag(ParityTag::Odd);
    const SpectralField F = apply_nonlinearity(spec, y, grid);
    report.residual_norm = (apply_L(y) - F).norm();
    report.even_norm = parity_norm(y, Parity::Even);
    report.solution = y;

    const auto ab = detail::apriori_bound(spec, cfg, space, grid);
    report.apriori_bound = ab.bound;
    report.delta_num = ab.delta;
    report.h_R_norm = ab.h_R;
    report.bound_satisfied = y.norm() <= ab.bound;

    const GridField yg = synthesize(y, grid);
    const GridField e = forcing_on_grid(spec, grid);
    report.clamp_min = std::numeric_limits<double>::infinity();
    report.clamp_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid->n_t; ++i)
        for (int j = 0; j < grid->n_x; ++j) {
            const double g =
                clamp_slope_g(spec, alpha.values(i, j), e.values(i, j), cfg.R_clamp, yg.values(i, j));
            report.clamp_min = std::min(report.clamp_min, g);
            report.clamp_max = std::max(report.clamp_max, g);
        }
    return report;
}

struct ProbeStart {
    double initial_norm;
    bool converged;
    double final_norm;
    int iterations;
};

struct ProbeReport {
    std::vector<ProbeStart> starts;
    std::vector<SpectralField> distinct_solutions;
    double apriori_bound = 0.0;
    GlobalSlopeReport slopes;
    double max_pairwise_distance = 0.0;
    bool unique_trivial = false;
};

/// Newton on L_o y = F_o(y) from seeded random odd starts of norm up to 10x the
/// a priori bound; collects distinct converged solutions (distance > 1e-4).
inline ProbeReport uniqueness_probe(const NonlinearitySpec& spec, const SolveConfig& cfg,
                                    const SpaceRef& space, int num_starts) {
    spec.validate();
    if (num_starts < 1) throw InvalidInput("num_starts must be >= 1");
    if (spec.has_forcing() || spec.symmetry != SymmetryDeclaration::OddOnly)
        throw HypothesisViolation(
            "uniqueness probe requires an odd nonlinearity without forcing (symmetry odd_f1_only)");
    if (!cfg.alpha.is_constant() || !cfg.beta.is_constant())
        throw InvalidInput("uniqueness probe uses constant alpha, beta");
    ProbeReport report;
    report.slopes =
        check_global_slopes(spec, cfg.alpha.constant_value(), cfg.beta.constant_value());
    if (!report.slopes.pass)
        throw HypothesisViolation(fmt::format(
            "incremental slopes [{}, {}] are not inside [alpha, beta] = [{}, {}]",
            report.slopes.range.lo, report.slopes.range.hi, cfg.alpha.constant_value(),
            cfg.beta.constant_value()));
    space->period().require_even_p();
    const GridRef grid = make_grid(space, cfg.dealias);
    const GridField alpha = cfg.alpha.sample(grid);
    report.apriori_bound = detail::apriori_bound(spec, cfg, space, grid).bound;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    std::vector<SpectralField> converged;
    for (int k = 0; k < num_starts; ++k) {
        const double target = 10.0 * report.apriori_bound * (1.0 - radius(rng));
        SpectralField y0 = random_odd_field(space, rng, target);
        auto out = detail::newton(spec, y0, alpha, 1.0, cfg);
        report.starts.push_back({target, out.converged, out.y.norm(), out.iterations});
        if (!out.converged) continue;
        bool seen = false;
        for (const auto& sol : report.distinct_solutions)
            if ((sol - out.y).norm() <= 1e-4) seen = true;
        if (!seen) report.distinct_solutions.push_back(out.y);
        converged.push_back(std::move(out.y));
    }
    for (std::size_t i = 0; i < converged.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            report.max_pairwise_distance =
                std::max(report.max_pairwise_distance, (converged[i] - converged[j]).norm());
    const bool all_converged = std::all_of(report.starts.begin(), report.starts.end(),
                                           [](const ProbeStart& s) { return s.converged; });
    report.unique_trivial = all_converged && report.distinct_solutions.size() == 1 &&
                            report.distinct_solutions.front().norm() <= 1e-6;
    return report;
}

}  // namespace varwave
