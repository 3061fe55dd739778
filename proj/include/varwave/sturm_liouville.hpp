#pragma once

/**
 * @file sturm_liouville.hpp
 * @brief Dirichlet eigenpairs of (u phi')' = -lambda^2 u phi on [0, pi].
 *
 * The problem is brought to Liouville normal form with psi = sqrt(u) phi,
 *     -psi'' + eta_u psi = lambda^2 psi,   psi(0) = psi(pi) = 0,
 * and discretized by a sine-Galerkin method of dimension K:
 *     A_kl = k^2 delta_kl + (2/pi) int_0^pi eta_u sin(kx) sin(lx) dx
 *          = k^2 delta_kl + (C_{|k-l|} - C_{k+l}) / pi,
 * with C_j = int_0^pi eta_u cos(jx) dx evaluated by composite Gauss-Legendre.
 * The eigenvectors give psi_n as a sine series; phi_n = psi_n / sqrt(u) is then
 * u-weighted orthonormal because the sine basis is L2-orthonormal.
 */

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "varwave/coefficient.hpp"
#include "varwave/errors.hpp"
#include "varwave/quadrature.hpp"

namespace varwave {

struct EigenBasisOptions {
    /// Sine-Galerkin dimension; defaults to max(4 n_max, 128).
    std::optional<int> galerkin_dim;
};

class EigenBasis {
public:
    int n_max() const { return static_cast<int>(lambda_sq_.size()); }
    int galerkin_dim() const { return static_cast<int>(vectors_.rows()); }

    /// Eigenvalues lambda_n^2, n = 1..n_max, ascending.
    const std::vector<double>& lambda_sq() const { return lambda_sq_; }
    double lambda_sq(int n) const {
        if (n < 1 || n > n_max())
            throw InvalidInput(fmt::format("eigen index n={} outside 1..{}", n, n_max()));
        return lambda_sq_[static_cast<std::size_t>(n - 1)];
    }

    const CoefficientProfile& profile() const { return *profile_; }
    double kappa() const { return kappa_; }

    /// Uniform quadrature grid in x (odd number of nodes, Simpson-exact for the basis).
    const Eigen::VectorXd& x() const { return x_; }
    const Eigen::VectorXd& simpson_weights() const { return wx_; }
    /// phi_n(x_j) on the quadrature grid; column n-1 holds phi_n.
    const Eigen::MatrixXd& phi() const { return phi_; }
    /// u(x_j) on the quadrature grid.
    const Eigen::VectorXd& u_on_grid() const { return u_; }

    /// phi_1..phi_{n_max} at arbitrary points in [0, pi]; returns len(xs) x n_max.
    Eigen::MatrixXd sample(const Eigen::VectorXd& xs) const {
        Eigen::MatrixXd psi = sine_matrix(xs) * vectors_;
        for (Eigen::Index i = 0; i < xs.size(); ++i) psi.row(i) /= std::sqrt(profile_->u(xs[i]));
        return psi;
    }

    /// phi_n' at arbitrary points; returns len(xs) x n_max.
    Eigen::MatrixXd sample_derivative(const Eigen::VectorXd& xs) const {
        const Eigen::Index K = vectors_.rows();
        Eigen::MatrixXd s(xs.size(), K), c(xs.size(), K);
        const double norm = std::sqrt(2.0 / kPi);
        for (Eigen::Index i = 0; i < xs.size(); ++i)
            for (Eigen::Index k = 1; k <= K; ++k) {
                s(i, k - 1) = norm * std::sin(static_cast<double>(k) * xs[i]);
                c(i, k - 1) = norm * static_cast<double>(k) * std::cos(static_cast<double>(k) * xs[i]);
            }
        const Eigen::MatrixXd psi = s * vectors_;
        const Eigen::MatrixXd dpsi = c * vectors_;
        Eigen::MatrixXd out(xs.size(), vectors_.cols());
        for (Eigen::Index i = 0; i < xs.size(); ++i) {
            const Jet j = profile_->jet(xs[i]);
            const double r = 1.0 / std::sqrt(j.u);
            out.row(i) = r * dpsi.row(i) - 0.5 * j.du / j.u * r * psi.row(i);
        }
        return out;
    }

private:
    friend EigenBasis solve_eigenbasis(std::shared_ptr<const CoefficientProfile>, int,
                                       const EigenBasisOptions&);

    static Eigen::MatrixXd sine_matrix(const Eigen::VectorXd& xs, Eigen::Index K) {
        Eigen::MatrixXd s(xs.size(), K);
        const double norm = std::sqrt(2.0 / kPi);
        for (Eigen::Index i = 0; i < xs.size(); ++i)
            for (Eigen::Index k = 1; k <= K; ++k)
                s(i, k - 1) = norm * std::sin(static_cast<double>(k) * xs[i]);
        return s;
    }
    Eigen::MatrixXd sine_matrix(const Eigen::VectorXd& xs) const {
        return sine_matrix(xs, vectors_.rows());
    }

    std::shared_ptr<const CoefficientProfile> profile_;
    double kappa_ = 0.0;
    std::vector<double> lambda_sq_;
    Eigen::MatrixXd vectors_;  // K x n_max sine coefficients of psi_n (normalized)
    Eigen::VectorXd x_, wx_, u_;
    Eigen::MatrixXd phi_;
};

/// First n_max Dirichlet eigenpairs of the Sturm-Liouville problem for `profile`.
inline EigenBasis solve_eigenbasis(std::shared_ptr<const CoefficientProfile> profile, int n_max,
                                   const EigenBasisOptions& options = {}) {
    if (!profile) throw InvalidInput("solve_eigenbasis: null profile");
    if (n_max < 1) throw InvalidInput(fmt::format("n_max must be >= 1, got {}", n_max));
    const int K = options.galerkin_dim.value_or(std::max(4 * n_max, 128));
    if (2 * n_max > K)
        throw InvalidInput(fmt::format(
            "n_max={} exceeds half the Galerkin dimension K={} (accuracy guard)", n_max, K));

    // Cosine moments of eta_u up to frequency 2K.
    const auto rule = quadrature::composite_gauss_legendre(0.0, kPi, K);
    const int n_moments = 2 * K + 1;
    std::vector<double> moments(static_cast<std::size_t>(n_moments), 0.0);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double xi = rule.nodes[i];
        const double we = rule.weights[i] * eta_u(*profile, xi);
        if (!std::isfinite(we))
            throw NumericalFailure(fmt::format(
                "eta_u is not finite at x={} for {} profile", xi, to_string(profile->kind())));
        // cos(j x) by the Chebyshev recurrence.
        const double c1 = std::cos(xi);
        double prev = 1.0, cur = c1;
        moments[0] += we;
        moments[1] += we * c1;
        for (int j = 2; j < n_moments; ++j) {
            const double next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
            moments[static_cast<std::size_t>(j)] += we * cur;
        }
    }

    Eigen::MatrixXd A(K, K);
    for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= K; ++l) {
            const double v = (moments[static_cast<std::size_t>(std::abs(k - l))] -
                              moments[static_cast<std::size_t>(k + l)]) / kPi;
            A(k - 1, l - 1) = v + (k == l ? static_cast<double>(k) * k : 0.0);
        }
    if (!A.allFinite())
        throw NumericalFailure(fmt::format("non-finite Galerkin matrix for {} profile",
                                           to_string(profile->kind())));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw NumericalFailure(fmt::format("symmetric eigen-solve failed for {} profile",
                                           to_string(profile->kind())));

    EigenBasis basis;
    basis.profile_ = profile;
    basis.kappa_ = kappa(*profile);
    basis.lambda_sq_.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_max);
    for (int n = 1; n < n_max; ++n) {
        const double a = basis.lambda_sq_[static_cast<std::size_t>(n - 1)];
        const double b = basis.lambda_sq_[static_cast<std::size_t>(n)];
        if (!(b - a > 1e-10 * std::max(1.0, std::abs(b))))
            throw NumericalFailure(fmt::format(
                "eigenvalues {} and {} are not simple (lambda^2 = {}, {})", n, n + 1, a, b));
    }
    basis.vectors_ = es.eigenvectors().leftCols(n_max);

    // Quadrature grid: Simpson is exact for cos(jx), j < intervals, so products of
    // two sine series of length K are integrated exactly once intervals > 2K.
    int intervals = std::max(static_cast<int>(profile->grid_size()) - 1, 2 * K + 2);
    if (intervals % 2 != 0) ++intervals;
    const int nx = intervals + 1;
    const double h = kPi / intervals;
    basis.x_ = Eigen::VectorXd::LinSpaced(nx, 0.0, kPi);
    basis.wx_ = quadrature::simpson_weights(static_cast<std::size_t>(nx), h);
    basis.u_.resize(nx);
    for (int j = 0; j < nx; ++j) basis.u_[j] = profile->u(basis.x_[j]);

    // Sign: phi_n'(0) > 0, i.e. psi_n'(0) = sqrt(2/pi) sum_k k v_k > 0.
    for (int n = 0; n < n_max; ++n) {
        double slope = 0.0;
        for (int k = 1; k <= K; ++k) slope += k * basis.vectors_(k - 1, n);
        if (slope < 0.0) basis.vectors_.col(n) *= -1.0;
    }

    basis.phi_ = basis.sample(basis.x_);
    // Renormalize in the u-weighted norm on the quadrature grid.
    for (int n = 0; n < n_max; ++n) {
        const double norm2 =
            (basis.wx_.array() * basis.u_.array() * basis.phi_.col(n).array().square()).sum();
        const double s = 1.0 / std::sqrt(norm2);
        basis.phi_.col(n) *= s;
        basis.vectors_.col(n) *= s;
    }
    return basis;
}

inline EigenBasis solve_eigenbasis(const CoefficientProfile& profile, int n_max,
                                   const EigenBasisOptions& options = {}) {
    return solve_eigenbasis(std::make_shared<const CoefficientProfile>(profile), n_max, options);
}

struct AsymptoticDefect {
    int n;
    double defect;  // lambda_n^2 - n^2 - kappa/pi
};

/// Defect sequence of the two-term eigenvalue asymptotics.
inline std::vector<AsymptoticDefect> asymptotics_report(const EigenBasis& basis) {
    if (basis.n_max() < 10)
        throw InvalidInput(fmt::format("asymptotics_report needs n_max >= 10, got {}",
                                       basis.n_max()));
    std::vector<AsymptoticDefect> out;
    out.reserve(static_cast<std::size_t>(basis.n_max()));
    const double shift = basis.kappa() / kPi;
    for (int n = 1; n <= basis.n_max(); ++n)
        out.push_back({n, basis.lambda_sq(n) - static_cast<double>(n) * n - shift});
    return out;
}

/// Least-squares slope of log|d_n| against log n over n in [n_lo, n_hi].
inline double defect_loglog_slope(const std::vector<AsymptoticDefect>& defects, int n_lo,
                                  int n_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& d : defects) {
        if (d.n < n_lo || d.n > n_hi || d.defect == 0.0) continue;
        const double lx = std::log(static_cast<double>(d.n));
        const double ly = std::log(std::abs(d.defect));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) throw InvalidInput("defect_loglog_slope: fewer than two nonzero defects");
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace varwave
