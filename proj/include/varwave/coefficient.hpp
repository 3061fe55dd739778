#pragma once

/**
 * @file coefficient.hpp
 * @brief The variable coefficient u(x) on [0, pi] and its Liouville potential.
 *
 * A profile is either one of the closed-form families (constant, exponential
 * e^{a x}, the square polynomial (1 + x/pi)^2) or a user-sampled table of
 * (u, u', u'') on a uniform grid. All kinds expose the same jet evaluation
 * (u, u', u'') at any x in [0, pi]; sampled tables are interpolated by local
 * cubics, each column independently.
 *
 * The potential of the Liouville normal form is
 *     eta_u(x) = u''/(2u) - (u'/u)^2 / 4,
 * and kappa is its integral over [0, pi].
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/quadrature.hpp"

namespace varwave {

inline constexpr double kPi = std::numbers::pi;

enum class CoefficientKind { Constant, Exponential, SquarePolynomial, UserSampled };

inline std::string to_string(CoefficientKind k) {
    switch (k) {
        case CoefficientKind::Constant: return "constant";
        case CoefficientKind::Exponential: return "exponential";
        case CoefficientKind::SquarePolynomial: return "square_polynomial";
        case CoefficientKind::UserSampled: return "sampled";
    }
    return "unknown";
}

/// u together with its first two derivatives at a point.
struct Jet {
    double u;
    double du;
    double d2u;
};

class CoefficientProfile {
public:
    static constexpr std::size_t kMinGridSize = 129;
    static constexpr std::size_t kDefaultGridSize = 257;

    static CoefficientProfile constant(double c, std::size_t grid_size = kDefaultGridSize) {
        CoefficientProfile p(CoefficientKind::Constant, c, grid_size);
        p.validate();
        return p;
    }

    /// u(x) = exp(a x).
    static CoefficientProfile exponential(double a, std::size_t grid_size = kDefaultGridSize) {
        CoefficientProfile p(CoefficientKind::Exponential, a, grid_size);
        p.validate();
        return p;
    }

    /// u(x) = (1 + x/pi)^2, for which eta_u vanishes identically.
    static CoefficientProfile square_polynomial(std::size_t grid_size = kDefaultGridSize) {
        CoefficientProfile p(CoefficientKind::SquarePolynomial, 0.0, grid_size);
        p.validate();
        return p;
    }

    /// Samples of u, u', u'' on the uniform grid x_j = j*pi/(N-1), j = 0..N-1.
    static CoefficientProfile sampled(std::vector<double> u, std::vector<double> du,
                                      std::vector<double> d2u) {
        if (u.size() != du.size() || u.size() != d2u.size())
            throw InvalidInput(fmt::format(
                "sampled profile: column lengths differ (u={}, u'={}, u''={})", u.size(),
                du.size(), d2u.size()));
        CoefficientProfile p(CoefficientKind::UserSampled, 0.0, u.size());
        p.u_ = std::move(u);
        p.du_ = std::move(du);
        p.d2u_ = std::move(d2u);
        p.validate();
        return p;
    }

    /// Reads a whitespace- or comma-separated 3-column table (u, u', u'').
    /// Lines starting with '#' are comments; x is implicit.
    static CoefficientProfile from_table(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidInput("cannot open coefficient table: " + path);
        std::vector<double> u, du, d2u;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::replace(line.begin(), line.end(), ',', ' ');
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ss(line);
            double a, b, c;
            if (!(ss >> a >> b >> c))
                throw InvalidInput(fmt::format("{}:{}: expected three numbers", path, lineno));
            u.push_back(a);
            du.push_back(b);
            d2u.push_back(c);
        }
        return sampled(std::move(u), std::move(du), std::move(d2u));
    }

    CoefficientKind kind() const { return kind_; }
    double parameter() const { return param_; }
    std::size_t grid_size() const { return grid_size_; }
    double grid_spacing() const { return kPi / static_cast<double>(grid_size_ - 1); }
    double grid_point(std::size_t j) const { return static_cast<double>(j) * grid_spacing(); }

    Jet jet(double x) const {
        check_domain(x);
        switch (kind_) {
            case CoefficientKind::Constant: return {param_, 0.0, 0.0};
            case CoefficientKind::Exponential: {
                const double e = std::exp(param_ * x);
                return {e, param_ * e, param_ * param_ * e};
            }
            case CoefficientKind::SquarePolynomial: {
                const double s = 1.0 + x / kPi;
                return {s * s, 2.0 * s / kPi, 2.0 / (kPi * kPi)};
            }
            case CoefficientKind::UserSampled: return interpolate(x);
        }
        return {};
    }

    double u(double x) const { return jet(x).u; }

private:
    CoefficientProfile(CoefficientKind k, double param, std::size_t grid_size)
        : kind_(k), param_(param), grid_size_(grid_size) {}

    void validate() const {
        if (grid_size_ < kMinGridSize)
            throw InvalidInput(fmt::format("coefficient grid_size must be >= {}, got {}",
                                           kMinGridSize, grid_size_));
        for (std::size_t j = 0; j < grid_size_; ++j) {
            const Jet v = jet(grid_point(j));
            if (!std::isfinite(v.u) || !std::isfinite(v.du) || !std::isfinite(v.d2u))
                throw InvalidInput(fmt::format("coefficient {} is not finite at x={}",
                                               to_string(kind_), grid_point(j)));
            if (!(v.u > 0.0))
                throw HypothesisViolation(fmt::format(
                    "coefficient {} is not strictly positive: u({}) = {}", to_string(kind_),
                    grid_point(j), v.u));
        }
    }

    void check_domain(double x) const {
        constexpr double slack = 1e-12;
        if (!(x >= -slack && x <= kPi + slack))
            throw InvalidInput(fmt::format("x = {} lies outside [0, pi]", x));
    }

    Jet interpolate(double x) const {
        const double h = grid_spacing();
        const auto n = static_cast<std::ptrdiff_t>(grid_size_);
        const auto cell = static_cast<std::ptrdiff_t>(std::floor(x / h));
        const std::ptrdiff_t i0 = std::clamp<std::ptrdiff_t>(cell - 1, 0, n - 4);
        double w[4];
        for (int a = 0; a < 4; ++a) {
            double num = 1.0, den = 1.0;
            const double xa = static_cast<double>(i0 + a) * h;
            for (int b = 0; b < 4; ++b) {
                if (b == a) continue;
                const double xb = static_cast<double>(i0 + b) * h;
                num *= x - xb;
                den *= xa - xb;
            }
            w[a] = num / den;
        }
        Jet r{0.0, 0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
            const auto i = static_cast<std::size_t>(i0 + a);
            r.u += w[a] * u_[i];
            r.du += w[a] * du_[i];
            r.d2u += w[a] * d2u_[i];
        }
        return r;
    }

    CoefficientKind kind_;
    double param_;
    std::size_t grid_size_;
    std::vector<double> u_, du_, d2u_;
};

/// eta_u(x) = u''/(2u) - (u'/u)^2/4.
inline double eta_u(const CoefficientProfile& profile, double x) {
    const Jet j = profile.jet(x);
    const double r = j.du / j.u;
    return 0.5 * j.d2u / j.u - 0.25 * r * r;
}

/// kappa = integral of eta_u over [0, pi], composite Simpson on the profile grid.
inline double kappa(const CoefficientProfile& profile) {
    const std::size_t n = profile.grid_size();
    const Eigen::VectorXd w = quadrature::simpson_weights(n, profile.grid_spacing());
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        acc += w[static_cast<Eigen::Index>(j)] * eta_u(profile, profile.grid_point(j));
    return acc;
}

}  // namespace varwave
