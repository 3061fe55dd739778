#pragma once

// Bounded coefficient functions alpha(t, x), beta(t, x), gamma(t, x) that act
// as multiplication operators on the odd subspace. They must be T/2-periodic
// in t so that multiplication preserves T/2-antiperiodicity.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"

namespace varwave {

class SlopeField {
public:
    static SlopeField constant(double c) {
        if (!std::isfinite(c)) throw InvalidInput("slope field constant must be finite");
        SlopeField f;
        f.constant_ = c;
        f.fn_ = [c](double, double) { return c; };
        f.description_ = fmt::format("{}", c);
        return f;
    }

    static SlopeField function(std::function<double(double, double)> fn,
                               std::string description = "function") {
        SlopeField f;
        f.fn_ = std::move(fn);
        f.description_ = std::move(description);
        return f;
    }

    bool is_constant() const { return constant_.has_value(); }
    double constant_value() const {
        if (!constant_) throw InvalidInput("slope field is not constant");
        return *constant_;
    }
    const std::string& description() const { return description_; }

    double operator()(double t, double x) const { return fn_(t, x); }

    GridField sample(const GridRef& grid) const {
        return GridField::sample(grid, [&](double t, double x) { return fn_(t, x); });
    }

    /// Throws unless the samples are T/2-periodic in t and finite.
    void require_even(const GridRef& grid) const {
        if (is_constant()) return;
        const GridField g = sample(grid);
        if (!g.values.allFinite()) throw InvalidInput("slope field " + description_ + " is not finite");
        const double scale = 1.0 + g.values.cwiseAbs().maxCoeff();
        const int shift = grid->half_period_shift();
        for (int i = 0; i < grid->n_t; ++i) {
            const double diff =
                (g.values.row(i) - g.values.row((i + shift) % grid->n_t)).cwiseAbs().maxCoeff();
            if (diff > 1e-12 * scale)
                throw HypothesisViolation(fmt::format(
                    "slope field {} is not T/2-periodic in t (defect {} at t={})", description_,
                    diff, grid->t[i]));
        }
    }

    double min(const GridRef& grid) const {
        return is_constant() ? *constant_ : sample(grid).values.minCoeff();
    }
    double max(const GridRef& grid) const {
        return is_constant() ? *constant_ : sample(grid).values.maxCoeff();
    }
    double sup_abs(const GridRef& grid) const {
        return is_constant() ? std::abs(*constant_) : sample(grid).values.cwiseAbs().maxCoeff();
    }

    /// Plain average over the domain.
    double mean(const GridRef& grid) const {
        if (is_constant()) return *constant_;
        const GridField g = sample(grid);
        const double area = grid->wt.sum() * grid->wx.sum();
        return (grid->wt.transpose() * g.values * grid->wx)(0, 0) / area;
    }

    SlopeField shifted(double delta) const {
        if (is_constant()) return constant(*constant_ + delta);
        auto fn = fn_;
        return function([fn, delta](double t, double x) { return fn(t, x) + delta; },
                        fmt::format("({}) + {}", description_, delta));
    }

private:
    std::optional<double> constant_;
    std::function<double(double, double)> fn_;
    std::string description_;
};

}  // namespace varwave
