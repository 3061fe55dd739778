#pragma once

#include <memory>

#include "varwave/varwave.hpp"

namespace varwave::testing {

inline std::shared_ptr<const EigenBasis> make_basis(const CoefficientProfile& p, int n_max) {
    return std::make_shared<const EigenBasis>(solve_eigenbasis(p, n_max));
}

/// Odd space for u = 1 (or the given profile), p = 2, q = 1.
inline SpaceRef small_space(int m_max = 7, int n_max = 8,
                            const CoefficientProfile& p = CoefficientProfile::constant(1.0)) {
    return make_space(make_basis(p, n_max), RationalPeriod::make(2, 1), m_max, n_max);
}

}  // namespace varwave::testing
