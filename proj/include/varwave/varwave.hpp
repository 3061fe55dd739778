#pragma once

#include "varwave/errors.hpp"
#include "varwave/quadrature.hpp"
#include "varwave/coefficient.hpp"
#include "varwave/sturm_liouville.hpp"
#include "varwave/wave_spectrum.hpp"
#include "varwave/function_space.hpp"
#include "varwave/nonlinearity.hpp"
#include "varwave/krylov.hpp"
#include "varwave/slope_field.hpp"
#include "varwave/resolvent.hpp"
#include "varwave/verification.hpp"
#include "varwave/solver.hpp"
#include "varwave/io.hpp"
#include "varwave/config.hpp"
