#pragma once

/**
 * @file function_space.hpp
 * @brief Spectral and grid representations of functions on (0,T) x (0,pi).
 *
 * The orthonormal basis of the u-weighted L2 space is
 *     T_m phi_n(x) cos(q m t / p),  T_m phi_n(x) sin(q m t / p),
 * with T_0 = 1/sqrt(T), T_m = sqrt(2/T) for m >= 1. A SpectralField stores the
 * coefficients a_mn (m = 0..m_max) and b_mn (m = 1..m_max; row 0 is kept at zero)
 * for n = 1..n_max. A GridField stores samples on a tensor grid whose t-nodes
 * are equispaced (periodic trapezoid) and whose x-nodes are equispaced
 * (Simpson). Odd m spans the T/2-antiperiodic subspace, even m the
 * T/2-periodic one.
 */

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "varwave/errors.hpp"
#include "varwave/quadrature.hpp"
#include "varwave/sturm_liouville.hpp"
#include "varwave/wave_spectrum.hpp"

namespace varwave {

enum class Trig { Cos, Sin };
enum class ParityTag { Odd, Even, Mixed };

inline std::string to_string(ParityTag t) {
    switch (t) {
        case ParityTag::Odd: return "odd_subspace";
        case ParityTag::Even: return "even_subspace";
        case ParityTag::Mixed: return "mixed";
    }
    return "mixed";
}

inline ParityTag parity_tag_from_string(const std::string& s) {
    if (s == "odd_subspace" || s == "odd") return ParityTag::Odd;
    if (s == "even_subspace" || s == "even") return ParityTag::Even;
    if (s == "mixed") return ParityTag::Mixed;
    throw InvalidInput("unknown parity tag: " + s);
}

/// Eigenbasis, period and truncation shared by every field of one problem.
class SpectralSpace {
public:
    SpectralSpace(std::shared_ptr<const EigenBasis> basis, RationalPeriod period, int m_max,
                  int n_max)
        : basis_(std::move(basis)), period_(period), m_max_(m_max), n_max_(n_max) {
        if (!basis_) throw InvalidInput("SpectralSpace: null basis");
        if (m_max_ < 1) throw InvalidInput(fmt::format("m_max must be >= 1, got {}", m_max_));
        if (n_max_ < 1 || n_max_ > basis_->n_max())
            throw InvalidInput(fmt::format("n_max={} outside 1..{} (basis size)", n_max_,
                                           basis_->n_max()));
        mu_.resize(m_max_ + 1, n_max_);
        for (int m = 0; m <= m_max_; ++m)
            for (int n = 1; n <= n_max_; ++n) mu_(m, n - 1) = varwave::mu(*basis_, period_, m, n);
    }

    const EigenBasis& basis() const { return *basis_; }
    std::shared_ptr<const EigenBasis> basis_ptr() const { return basis_; }
    const RationalPeriod& period() const { return period_; }
    int m_max() const { return m_max_; }
    int n_max() const { return n_max_; }
    double T() const { return period_.T(); }

    /// mu_mn table, rows m = 0..m_max, columns n-1.
    const Eigen::MatrixXd& mu() const { return mu_; }
    double mu(int m, int n) const { return mu_(m, n - 1); }

    /// Number of real unknowns in the truncated odd subspace.
    int odd_dimension() const { return 2 * ((m_max_ + 1) / 2) * n_max_; }

    friend bool operator==(const SpectralSpace& a, const SpectralSpace& b) {
        return a.basis_ == b.basis_ && a.period_.p == b.period_.p && a.period_.q == b.period_.q &&
               a.m_max_ == b.m_max_ && a.n_max_ == b.n_max_;
    }

private:
    std::shared_ptr<const EigenBasis> basis_;
    RationalPeriod period_;
    int m_max_;
    int n_max_;
    Eigen::MatrixXd mu_;
};

using SpaceRef = std::shared_ptr<const SpectralSpace>;

inline SpaceRef make_space(std::shared_ptr<const EigenBasis> basis, RationalPeriod period,
                           int m_max, int n_max) {
    return std::make_shared<const SpectralSpace>(std::move(basis), period, m_max, n_max);
}

class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(SpaceRef space, ParityTag tag = ParityTag::Mixed)
        : space_(std::move(space)), tag_(tag) {
        if (!space_) throw InvalidInput("SpectralField: null space");
        a_ = Eigen::MatrixXd::Zero(space_->m_max() + 1, space_->n_max());
        b_ = Eigen::MatrixXd::Zero(space_->m_max() + 1, space_->n_max());
    }

    static SpectralField unit(SpaceRef space, int m, int n, Trig trig, double value = 1.0) {
        SpectralField f(std::move(space));
        f.set(m, n, trig, value);
        f.tag_ = parity_of(m) == Parity::Odd ? ParityTag::Odd : ParityTag::Even;
        return f;
    }

    const SpaceRef& space() const { return space_; }
    ParityTag parity_tag() const { return tag_; }
    void set_parity_tag(ParityTag t) { tag_ = t; }

    /// Cosine coefficients, rows m = 0..m_max, columns n-1.
    const Eigen::MatrixXd& a() const { return a_; }
    Eigen::MatrixXd& a() { return a_; }
    /// Sine coefficients, rows m = 0..m_max (row 0 unused), columns n-1.
    const Eigen::MatrixXd& b() const { return b_; }
    Eigen::MatrixXd& b() { return b_; }

    double get(int m, int n, Trig trig) const {
        check_index(m, n, trig);
        return trig == Trig::Cos ? a_(m, n - 1) : b_(m, n - 1);
    }
    void set(int m, int n, Trig trig, double v) {
        check_index(m, n, trig);
        (trig == Trig::Cos ? a_(m, n - 1) : b_(m, n - 1)) = v;
    }

    /// Weighted L2 norm (Parseval in the orthonormal basis).
    double norm() const { return std::sqrt(a_.squaredNorm() + b_.squaredNorm()); }
    double dot(const SpectralField& o) const {
        check_same_space(o);
        return (a_.array() * o.a_.array()).sum() + (b_.array() * o.b_.array()).sum();
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_space(o);
        a_ += o.a_;
        b_ += o.b_;
        tag_ = combine(tag_, o.tag_);
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same_space(o);
        a_ -= o.a_;
        b_ -= o.b_;
        tag_ = combine(tag_, o.tag_);
        return *this;
    }
    SpectralField& operator*=(double s) {
        a_ *= s;
        b_ *= s;
        return *this;
    }
    friend SpectralField operator+(SpectralField l, const SpectralField& r) { return l += r; }
    friend SpectralField operator-(SpectralField l, const SpectralField& r) { return l -= r; }
    friend SpectralField operator*(double s, SpectralField f) { return f *= s; }

    void check_same_space(const SpectralField& o) const {
        if (!space_ || !o.space_ || !(*space_ == *o.space_))
            throw InvalidInput("spectral fields live in different spaces");
    }

private:
    static ParityTag combine(ParityTag x, ParityTag y) { return x == y ? x : ParityTag::Mixed; }

    void check_index(int m, int n, Trig trig) const {
        if (m < 0 || m > space_->m_max() || n < 1 || n > space_->n_max())
            throw InvalidInput(fmt::format("mode ({}, {}) outside m<={}, n<={}", m, n,
                                           space_->m_max(), space_->n_max()));
        if (m == 0 && trig == Trig::Sin)
            throw InvalidInput("the m = 0 mode has no sine component");
    }

    SpaceRef space_;
    Eigen::MatrixXd a_, b_;
    ParityTag tag_ = ParityTag::Mixed;
};

/// Tensor grid with precomputed transform matrices.
struct Grid {
    SpaceRef space;
    int n_t = 0;
    int n_x = 0;
    Eigen::VectorXd t, x;
    Eigen::VectorXd wt, wx;     // trapezoid (periodic) and Simpson weights
    Eigen::VectorXd u, du;      // coefficient and its derivative at x-nodes
    Eigen::MatrixXd cos_t;      // n_t x (m_max+1): T_m cos(q m t / p)
    Eigen::MatrixXd sin_t;      // n_t x (m_max+1): T_m sin(q m t / p), column 0 zero
    Eigen::MatrixXd phi;        // n_x x n_max
    Eigen::MatrixXd project_x;  // n_x x n_max: diag(wx u) phi
    Eigen::MatrixXd cos_t_w;    // (m_max+1) x n_t: cos_t^T diag(wt)
    Eigen::MatrixXd sin_t_w;

    /// Index shift corresponding to t -> t + T/2.
    int half_period_shift() const { return n_t / 2; }
};

using GridRef = std::shared_ptr<const Grid>;

inline int round_up_to_multiple(int v, int k) { return ((v + k - 1) / k) * k; }

/// Grid for `space`: n_t = 4 m_max rounded up to a multiple of 2p, x-nodes from the
/// eigenbasis quadrature grid. `dealias` > 1 refines both directions by that factor.
inline GridRef make_grid(const SpaceRef& space, double dealias = 1.0) {
    if (!(dealias >= 1.0)) throw InvalidInput("dealias factor must be >= 1");
    const EigenBasis& basis = space->basis();
    const int two_p = 2 * space->period().p;
    auto g = std::make_shared<Grid>();
    g->space = space;
    const int base_t = round_up_to_multiple(4 * space->m_max(), two_p);
    g->n_t = round_up_to_multiple(static_cast<int>(std::ceil(dealias * base_t)), two_p);
    const int base_intervals = static_cast<int>(basis.x().size()) - 1;
    int intervals = static_cast<int>(std::ceil(dealias * base_intervals));
    if (intervals % 2 != 0) ++intervals;
    g->n_x = intervals + 1;

    const double T = space->T();
    g->t = Eigen::VectorXd::LinSpaced(g->n_t, 0.0, T - T / g->n_t);
    g->wt = Eigen::VectorXd::Constant(g->n_t, T / g->n_t);
    g->x = Eigen::VectorXd::LinSpaced(g->n_x, 0.0, kPi);
    g->wx = quadrature::simpson_weights(static_cast<std::size_t>(g->n_x), kPi / intervals);

    g->u.resize(g->n_x);
    g->du.resize(g->n_x);
    for (int j = 0; j < g->n_x; ++j) {
        const Jet jet = basis.profile().jet(g->x[j]);
        g->u[j] = jet.u;
        g->du[j] = jet.du;
    }
    const Eigen::MatrixXd phi_all =
        (intervals == base_intervals) ? basis.phi() : basis.sample(g->x);
    g->phi = phi_all.leftCols(space->n_max());
    g->project_x = g->wx.cwiseProduct(g->u).asDiagonal() * g->phi;

    const int M = space->m_max();
    g->cos_t.resize(g->n_t, M + 1);
    g->sin_t.resize(g->n_t, M + 1);
    const double omega = 2.0 * kPi / T;
    for (int i = 0; i < g->n_t; ++i)
        for (int m = 0; m <= M; ++m) {
            const double Tm = (m == 0) ? 1.0 / std::sqrt(T) : std::sqrt(2.0 / T);
            // Phase reduced modulo n_t keeps the T/2 shift exact in floating point.
            const long phase = (static_cast<long>(m) * i) % g->n_t;
            const double arg = omega * (T / g->n_t) * static_cast<double>(phase);
            g->cos_t(i, m) = Tm * std::cos(arg);
            g->sin_t(i, m) = (m == 0) ? 0.0 : Tm * std::sin(arg);
        }
    g->cos_t_w = g->cos_t.transpose() * g->wt.asDiagonal();
    g->sin_t_w = g->sin_t.transpose() * g->wt.asDiagonal();
    return g;
}

struct GridField {
    GridRef grid;
    Eigen::MatrixXd values;  // n_t x n_x

    static GridField zeros(GridRef g) {
        GridField f{g, Eigen::MatrixXd::Zero(g->n_t, g->n_x)};
        return f;
    }

    /// Samples a function of (t, x) on the grid.
    template <class Fn>
    static GridField sample(GridRef g, Fn&& fn) {
        GridField f = zeros(g);
        for (int i = 0; i < g->n_t; ++i)
            for (int j = 0; j < g->n_x; ++j) f.values(i, j) = fn(g->t[i], g->x[j]);
        return f;
    }
};

inline void check_same_grid(const GridField& y, const GridField& z) {
    if (!y.grid || !z.grid) throw InvalidInput("grid field without grid");
    if (y.grid != z.grid &&
        (y.grid->n_t != z.grid->n_t || y.grid->n_x != z.grid->n_x ||
         !(*y.grid->space == *z.grid->space)))
        throw InvalidInput(fmt::format("grid mismatch: {}x{} vs {}x{}", y.grid->n_t,
                                       y.grid->n_x, z.grid->n_t, z.grid->n_x));
}

/// <y, z> = int u y z dt dx by trapezoid in t and Simpson in x.
inline double weighted_inner(const GridField& y, const GridField& z) {
    check_same_grid(y, z);
    const Grid& g = *y.grid;
    return (g.wt.transpose() * y.values.cwiseProduct(z.values) * g.wx.cwiseProduct(g.u))(0, 0);
}

/// Unweighted int y z dt dx on the grid.
inline double plain_inner(const GridField& y, const GridField& z) {
    check_same_grid(y, z);
    const Grid& g = *y.grid;
    return (g.wt.transpose() * y.values.cwiseProduct(z.values) * g.wx)(0, 0);
}

inline GridField synthesize(const SpectralField& c, const GridRef& grid) {
    if (!(*c.space() == *grid->space)) throw InvalidInput("synthesize: field and grid differ");
    const Eigen::MatrixXd time_part = grid->cos_t * c.a() + grid->sin_t * c.b();
    return {grid, time_part * grid->phi.transpose()};
}

inline SpectralField analyze(const GridField& g) {
    const Grid& grid = *g.grid;
    const SpectralSpace& s = *grid.space;
    if (grid.n_t <= 2 * s.m_max() || grid.n_x - 1 <= 2 * s.n_max())
        throw InvalidInput(fmt::format(
            "grid {}x{} under-resolves the band m<={}, n<={}", grid.n_t, grid.n_x, s.m_max(),
            s.n_max()));
    if (g.values.rows() != grid.n_t || g.values.cols() != grid.n_x)
        throw InvalidInput("grid field has the wrong shape");
    SpectralField out(grid.space);
    const Eigen::MatrixXd xproj = g.values * grid.project_x;  // n_t x n_max
    out.a() = grid.cos_t_w * xproj;
    out.b() = grid.sin_t_w * xproj;
    out.b().row(0).setZero();
    return out;
}

/// Zeroes the coefficients of the complementary parity.
inline SpectralField project_parity(const SpectralField& c, Parity target) {
    SpectralField out = c;
    const int keep = (target == Parity::Odd) ? 1 : 0;
    for (int m = 0; m <= c.space()->m_max(); ++m)
        if (m % 2 != keep) {
            out.a().row(m).setZero();
            out.b().row(m).setZero();
        }
    out.set_parity_tag(target == Parity::Odd ? ParityTag::Odd : ParityTag::Even);
    return out;
}

/// Grid-side projection: odd part (y(t) - y(t+T/2))/2, even part (y(t) + y(t+T/2))/2.
inline GridField project_parity(const GridField& y, Parity target) {
    const int n_t = y.grid->n_t;
    const int shift = y.grid->half_period_shift();
    GridField out = GridField::zeros(y.grid);
    const double sign = (target == Parity::Odd) ? -1.0 : 1.0;
    for (int i = 0; i < n_t; ++i)
        out.values.row(i) = 0.5 * (y.values.row(i) + sign * y.values.row((i + shift) % n_t));
    return out;
}

/// Diagonal action of the wave operator: each mode times mu_mn.
inline SpectralField apply_L(const SpectralField& c) {
    SpectralField out = c;
    const Eigen::MatrixXd& mu = c.space()->mu();
    out.a() = c.a().cwiseProduct(mu);
    out.b() = c.b().cwiseProduct(mu);
    out.b().row(0).setZero();
    return out;
}

/// Pseudo-spectral multiplication operator: analyze(gamma * synthesize(c)).
inline SpectralField multiply(const GridField& gamma, const SpectralField& c) {
    GridField y = synthesize(c, gamma.grid);
    y.values.array() *= gamma.values.array();
    return analyze(y);
}

/// Norm of the coefficients of the given parity.
inline double parity_norm(const SpectralField& c, Parity which) {
    return project_parity(c, which).norm();
}

/// Flattens odd-m coefficients: for each odd m, cos block then sin block, n fastest.
inline Eigen::VectorXd odd_to_vector(const SpectralField& c) {
    const SpectralSpace& s = *c.space();
    Eigen::VectorXd v(s.odd_dimension());
    Eigen::Index k = 0;
    for (int m = 1; m <= s.m_max(); m += 2) {
        for (int n = 0; n < s.n_max(); ++n) v[k++] = c.a()(m, n);
        for (int n = 0; n < s.n_max(); ++n) v[k++] = c.b()(m, n);
    }
    return v;
}

inline SpectralField odd_from_vector(const SpaceRef& space, const Eigen::VectorXd& v) {
    if (v.size() != space->odd_dimension())
        throw InvalidInput("odd_from_vector: size mismatch");
    SpectralField c(space, ParityTag::Odd);
    Eigen::Index k = 0;
    for (int m = 1; m <= space->m_max(); m += 2) {
        for (int n = 0; n < space->n_max(); ++n) c.a()(m, n) = v[k++];
        for (int n = 0; n < space->n_max(); ++n) c.b()(m, n) = v[k++];
    }
    return c;
}

/// mu_mn in the flattened odd layout.
inline Eigen::VectorXd odd_mu_vector(const SpectralSpace& s) {
    Eigen::VectorXd v(s.odd_dimension());
    Eigen::Index k = 0;
    for (int m = 1; m <= s.m_max(); m += 2)
        for (int rep = 0; rep < 2; ++rep)
            for (int n = 1; n <= s.n_max(); ++n) v[k++] = s.mu(m, n);
    return v;
}

/// (m, n) of flattened odd index k.
inline ModeIndex odd_index_mode(const SpectralSpace& s, Eigen::Index k) {
    const auto block = static_cast<int>(k / (2 * s.n_max()));
    const auto n = static_cast<int>(k % s.n_max()) + 1;
    return {2 * block + 1, n};
}

/// Random odd-subspace field with coefficients decaying like 1/(1 + m^2 + n^2),
/// rescaled to the requested norm.
template <class Rng>
SpectralField random_odd_field(const SpaceRef& space, Rng& rng, double target_norm) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField c(space, ParityTag::Odd);
    for (int m = 1; m <= space->m_max(); m += 2)
        for (int n = 1; n <= space->n_max(); ++n) {
            const double decay = 1.0 / (1.0 + m * m + n * n);
            c.a()(m, n - 1) = decay * gauss(rng);
            c.b()(m, n - 1) = decay * gauss(rng);
        }
    const double nrm = c.norm();
    if (nrm > 0.0) c *= target_norm / nrm;
    return c;
}

}  // namespace varwave
