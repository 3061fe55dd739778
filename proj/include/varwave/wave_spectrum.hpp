#pragma once

/**
 * @file wave_spectrum.hpp
 * @brief Eigenvalues mu_mn = lambda_n^2 - (q m / p)^2 of the periodic-Dirichlet
 *        wave operator and their splitting into the odd-m and even-m families.
 *
 * The odd family (T/2-antiperiodic modes) is the one the solver works on: when
 * p is even, n p - m q is odd for every odd m, so no mu_mn with odd m can sit
 * on the accumulation set of the constant-coefficient kernel.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/sturm_liouville.hpp"

namespace varwave {

/// T = 2 pi p / q with gcd(p, q) = 1.
struct RationalPeriod {
    int p = 2;
    int q = 1;

    static RationalPeriod make(int p, int q) {
        if (p < 1 || q < 1)
            throw InvalidInput(fmt::format("period needs positive p, q; got p={}, q={}", p, q));
        if (std::gcd(p, q) != 1)
            throw InvalidInput(fmt::format("period needs gcd(p, q) = 1; got p={}, q={}", p, q));
        return {p, q};
    }

    double T() const { return 2.0 * kPi * p / q; }

    /// The odd-subspace reduction requires p even.
    void require_even_p() const {
        if (p % 2 != 0)
            throw HypothesisViolation(fmt::format(
                "odd-subspace reduction requires p even (so that np != mq for odd m); got p={}",
                p));
    }
};

enum class Parity { Odd, Even };

inline Parity parity_of(int m) { return (m % 2 != 0) ? Parity::Odd : Parity::Even; }
inline std::string to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }

struct ModeIndex {
    int m;
    int n;
    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// (q m / p)^2 with the product formed in integers before the single division.
inline double time_frequency_sq(const RationalPeriod& period, int m) {
    const std::int64_t qm = static_cast<std::int64_t>(period.q) * m;
    const std::int64_t pp = static_cast<std::int64_t>(period.p) * period.p;
    return static_cast<double>(qm * qm) / static_cast<double>(pp);
}

inline double mu(const EigenBasis& basis, const RationalPeriod& period, int m, int n) {
    if (m < 0) throw InvalidInput(fmt::format("mode index m={} must be nonnegative", m));
    return basis.lambda_sq(n) - time_frequency_sq(period, m);
}

struct SpectrumEntry {
    int m;
    int n;
    double mu;
    Parity parity;
};

/// A group of spectrum values equal within kernel_tol.
struct DistinctValue {
    double value;
    int index_pairs;  // number of (m, n) pairs in the group
};

struct ConsecutivePair {
    double lower;
    double upper;
};

class OperatorSpectrum {
public:
    static constexpr double kDefaultKernelTol = 1e-6;

    const std::vector<SpectrumEntry>& entries() const { return entries_; }
    int m_max() const { return m_max_; }
    int n_max() const { return n_max_; }
    double kernel_tol() const { return kernel_tol_; }
    Parity parity() const { return parity_; }
    const RationalPeriod& period() const { return period_; }
    double kappa() const { return kappa_; }

    double min_abs_mu() const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : entries_) best = std::min(best, std::abs(e.mu));
        return best;
    }

    /// Values merged when consecutive sorted entries differ by at most kernel_tol.
    std::vector<DistinctValue> distinct_values() const {
        std::vector<DistinctValue> out;
        std::size_t i = 0;
        while (i < entries_.size()) {
            std::size_t j = i + 1;
            double sum = entries_[i].mu;
            while (j < entries_.size() && entries_[j].mu - entries_[j - 1].mu <= kernel_tol_) {
                sum += entries_[j].mu;
                ++j;
            }
            out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
            i = j;
        }
        return out;
    }

    /// True when no mode outside the window can have mu in [lo - tol, hi + tol].
    /// Only meaningful for the odd family with p even.
    bool window_covers(double lo, double hi) const {
        if (parity_ != Parity::Odd || period_.p % 2 != 0) return false;
        const double tol = kernel_tol_;
        // Inside the n-range: mu in [lo, hi] iff (qm/p)^2 in [lambda_n^2 - hi, lambda_n^2 - lo];
        // look for an odd m past the window in that range.
        const double ratio = static_cast<double>(period_.p) / period_.q;
        for (double l2 : lambda_sq_) {
            const double top = l2 - lo + tol;
            if (top < 0.0) continue;
            const double m_hi = std::floor(ratio * std::sqrt(top));
            const double m_lo = std::ceil(ratio * std::sqrt(std::max(0.0, l2 - hi - tol)));
            double m = std::max(m_lo, static_cast<double>(m_max_ + 1));
            if (std::fmod(m, 2.0) == 0.0) m += 1.0;
            if (m <= m_hi) return false;
        }
        // Beyond n_max: |mu - kappa/pi - d_n| = |np - mq| (np + mq) / p^2 >= ((n_max+1) p + q) / p^2.
        const double p = period_.p, q = period_.q;
        const double bound = ((n_max_ + 1) * p + q) / (p * p);
        const double centre = kappa_ / kPi;
        const double reach = std::max(std::abs(lo - centre), std::abs(hi - centre)) + tol;
        return reach < bound - tail_defect_;
    }

private:
    friend OperatorSpectrum build_spectrum(const EigenBasis&, const RationalPeriod&, int, int,
                                           Parity, double);

    std::vector<SpectrumEntry> entries_;
    std::vector<double> lambda_sq_;
    RationalPeriod period_;
    int m_max_ = 0;
    int n_max_ = 0;
    double kernel_tol_ = kDefaultKernelTol;
    double kappa_ = 0.0;
    double tail_defect_ = 0.0;
    Parity parity_ = Parity::Odd;
};

/// All entries of one parity with m <= m_max, n <= n_max, sorted by mu.
inline OperatorSpectrum build_spectrum(const EigenBasis& basis, const RationalPeriod& period,
                                       int m_max, int n_max, Parity parity,
                                       double kernel_tol = OperatorSpectrum::kDefaultKernelTol) {
    if (n_max < 1 || n_max > basis.n_max())
        throw InvalidInput(fmt::format("spectrum n_max={} outside 1..{} (basis size)", n_max,
                                       basis.n_max()));
    if (m_max < 0) throw InvalidInput(fmt::format("spectrum m_max={} must be >= 0", m_max));
    if (!(kernel_tol > 0.0)) throw InvalidInput("kernel_tol must be positive");

    OperatorSpectrum s;
    s.period_ = period;
    s.m_max_ = m_max;
    s.n_max_ = n_max;
    s.kernel_tol_ = kernel_tol;
    s.parity_ = parity;
    s.kappa_ = basis.kappa();
    s.lambda_sq_.assign(basis.lambda_sq().begin(), basis.lambda_sq().begin() + n_max);

    const double shift = basis.kappa() / kPi;
    for (int n = std::max(1, n_max / 2); n <= n_max; ++n)
        s.tail_defect_ = std::max(
            s.tail_defect_, std::abs(basis.lambda_sq(n) - static_cast<double>(n) * n - shift));
    s.tail_defect_ *= 2.0;

    const int m_start = (parity == Parity::Odd) ? 1 : 0;
    for (int m = m_start; m <= m_max; m += 2)
        for (int n = 1; n <= n_max; ++n) {
            const double v = mu(basis, period, m, n);
            if (parity == Parity::Odd && period.p % 2 == 0 && !(std::abs(v) > kernel_tol))
                throw NumericalFailure(fmt::format(
                    "odd-m eigenvalue mu({},{}) = {} is within kernel_tol of zero; the "
                    "eigen-solve is not accurate enough",
                    m, n, v));
            s.entries_.push_back({m, n, v, parity});
        }
    std::stable_sort(s.entries_.begin(), s.entries_.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.mu < b.mu; });
    return s;
}

/// Spectrum of the operator restricted to T/2-antiperiodic functions (odd m).
inline OperatorSpectrum odd_spectrum(const EigenBasis& basis, const RationalPeriod& period,
                                     int m_max, int n_max,
                                     double kernel_tol = OperatorSpectrum::kDefaultKernelTol) {
    period.require_even_p();
    return build_spectrum(basis, period, m_max, n_max, Parity::Odd, kernel_tol);
}

/// Even-m family, diagnostics only.
inline OperatorSpectrum even_spectrum(const EigenBasis& basis, const RationalPeriod& period,
                                      int m_max, int n_max,
                                      double kernel_tol = OperatorSpectrum::kDefaultKernelTol) {
    return build_spectrum(basis, period, m_max, n_max, Parity::Even, kernel_tol);
}

/// Largest distinct value <= level and smallest distinct value > level.
inline ConsecutivePair consecutive_pair(const OperatorSpectrum& spec, double level) {
    const auto values = spec.distinct_values();
    if (values.empty()) throw InvalidInput("consecutive_pair: empty spectrum");
    std::optional<double> lower, upper;
    for (const auto& v : values) {
        if (std::abs(v.value - level) <= spec.kernel_tol())
            throw InvalidInput(fmt::format(
                "level {} coincides with spectrum value {} (within kernel_tol)", level, v.value));
        if (v.value <= level) lower = v.value;
        else if (!upper) upper = v.value;
    }
    if (!lower || !upper)
        throw InvalidInput(fmt::format(
            "spectrum window [{}, {}] does not bracket level {}", values.front().value,
            values.back().value, level));
    if (spec.parity() == Parity::Odd && !spec.window_covers(*lower, *upper))
        throw InvalidInput(fmt::format(
            "truncation window m<={}, n<={} is too small: modes outside it may fall in "
            "[{}, {}]",
            spec.m_max(), spec.n_max(), *lower, *upper));
    return {*lower, *upper};
}

/// (m, n) pairs with |mu_mn - value| <= kernel_tol. Each pair with m >= 1
/// contributes a cosine and a sine basis function.
inline std::vector<ModeIndex> kernel_basis(const OperatorSpectrum& spec, double value) {
    std::vector<ModeIndex> out;
    for (const auto& e : spec.entries())
        if (std::abs(e.mu - value) <= spec.kernel_tol()) out.push_back({e.m, e.n});
    std::sort(out.begin(), out.end(), [](const ModeIndex& a, const ModeIndex& b) {
        return a.m != b.m ? a.m < b.m : a.n < b.n;
    });
    return out;
}

}  // namespace varwave
