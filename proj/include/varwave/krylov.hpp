#pragma once

// Matrix-free Krylov kernels: restarted right-preconditioned GMRES and
// Lanczos with full reorthogonalization.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace varwave::krylov {

struct GmresOptions {
    double rtol = 1e-12;
    double atol = 0.0;
    int max_iterations = 2000;
    int restart = 80;
};

struct GmresResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

/// Solves A x = b with right preconditioning (A M^{-1} z = b, x = M^{-1} z).
/// `x` holds the initial guess on entry.
template <class Op, class Prec>
GmresResult gmres(Op&& apply_A, Prec&& apply_Minv, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                  const GmresOptions& opt = {}) {
    using Eigen::VectorXd;
    GmresResult res;
    const double bnorm = b.norm();
    const double target = std::max(opt.rtol * bnorm, opt.atol);
    if (x.size() != b.size()) x = VectorXd::Zero(b.size());
    if (bnorm == 0.0) {
        x.setZero();
        res.converged = true;
        return res;
    }
    const int m = std::max(1, std::min<int>(opt.restart, static_cast<int>(b.size())));
    std::vector<VectorXd> V(static_cast<std::size_t>(m + 1));
    std::vector<VectorXd> Z(static_cast<std::size_t>(m));
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    VectorXd cs(m), sn(m), g(m + 1);

    VectorXd r = b - apply_A(x);
    double beta = r.norm();
    res.residual = beta;
    while (res.iterations < opt.max_iterations) {
        if (beta <= target) {
            res.converged = true;
            return res;
        }
        V[0] = r / beta;
        g.setZero();
        g[0] = beta;
        H.setZero();
        int k = 0;
        for (; k < m && res.iterations < opt.max_iterations; ++k) {
            ++res.iterations;
            Z[k] = apply_Minv(V[k]);
            VectorXd w = apply_A(Z[k]);
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= k; ++i) {
                    const double h = V[i].dot(w);
                    H(i, k) += h;
                    w -= h * V[i];
                }
            H(k + 1, k) = w.norm();
            const bool breakdown = H(k + 1, k) <= 1e-300;
            if (!breakdown) V[k + 1] = w / H(k + 1, k);
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double denom = std::hypot(H(k, k), H(k + 1, k));
            cs[k] = denom == 0.0 ? 1.0 : H(k, k) / denom;
            sn[k] = denom == 0.0 ? 0.0 : H(k + 1, k) / denom;
            H(k, k) = denom;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            res.residual = std::abs(g[k + 1]);
            if (res.residual <= target || breakdown) {
                ++k;
                break;
            }
        }
        // Back substitution for the k x k triangular system.
        VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        for (int i = 0; i < k; ++i) x += y[i] * Z[i];
        r = b - apply_A(x);
        beta = r.norm();
        res.residual = beta;
    }
    res.converged = beta <= target;
    return res;
}

struct LanczosOptions {
    double rtol = 1e-12;
    int max_steps = 300;
};

struct LanczosResult {
    double value = 0.0;  // eigenvalue of largest magnitude
    bool converged = false;
    int steps = 0;
};

/// Eigenvalue of largest magnitude of a symmetric operator.
template <class Op>
LanczosResult lanczos_largest_magnitude(Op&& apply_B, const Eigen::VectorXd& start,
                                        const LanczosOptions& opt = {}) {
    using Eigen::VectorXd;
    LanczosResult res;
    const Eigen::Index n = start.size();
    const int max_steps = static_cast<int>(std::min<Eigen::Index>(opt.max_steps, n));
    std::vector<VectorXd> Q;
    Q.reserve(static_cast<std::size_t>(max_steps + 1));
    Q.push_back(start / start.norm());
    std::vector<double> alpha, beta;
    double previous = 0.0;
    for (int k = 0; k < max_steps; ++k) {
        VectorXd w = apply_B(Q[static_cast<std::size_t>(k)]);
        const double a = Q.back().dot(w);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : Q) w -= q.dot(w) * q;
        const double b = w.norm();
        res.steps = k + 1;

        const auto dim = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd Tk = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            Tk(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < dim)
                Tk(i, i + 1) = Tk(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tk);
        const auto& ev = es.eigenvalues();
        Eigen::Index idx = 0;
        ev.cwiseAbs().maxCoeff(&idx);
        const double theta = ev[idx];
        const double resid = b * std::abs(es.eigenvectors()(dim - 1, idx));
        res.value = theta;
        if (b <= 1e-14 * std::abs(theta) || k + 1 == n) {
            res.converged = true;
            return res;
        }
        const double mag = std::abs(theta);
        if (resid <= opt.rtol * mag && std::abs(mag - previous) <= opt.rtol * mag) {
            res.converged = true;
            return res;
        }
        previous = mag;
        beta.push_back(b);
        Q.push_back(w / b);
    }
    return res;
}

}  // namespace varwave::krylov
