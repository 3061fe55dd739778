#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "varwave/errors.hpp"

namespace varwave::quadrature {

/// Composite Simpson weights on `n_points` equispaced nodes with spacing `h`.
/// An odd number of intervals is closed with a Simpson 3/8 panel at the end.
inline Eigen::VectorXd simpson_weights(std::size_t n_points, double h) {
    if (n_points < 3) throw InvalidInput("simpson_weights: need at least 3 nodes");
    const std::size_t intervals = n_points - 1;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_points));
    const std::size_t simpson_intervals = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (std::size_t i = 0; i + 2 <= simpson_intervals; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (simpson_intervals != intervals) {
        const std::size_t s = simpson_intervals;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

struct Rule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on the Legendre recurrence).
inline Rule gauss_legendre(int n) {
    Rule r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

/// Composite Gauss-Legendre rule on [a, b]: `panels` panels of `order` points each.
inline Rule composite_gauss_legendre(double a, double b, int panels, int order = 16) {
    const Rule ref = gauss_legendre(order);
    const int n = panels * order;
    Rule r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        for (int i = 0; i < order; ++i) {
            r.nodes[p * order + i] = mid + 0.5 * width * ref.nodes[i];
            r.weights[p * order + i] = 0.5 * width * ref.weights[i];
        }
    }
    return r;
}

}  // namespace varwave::quadrature
