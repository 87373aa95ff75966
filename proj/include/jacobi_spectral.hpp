#pragma once

#include "jacobi_spectral/basis.hpp"
#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/expansion.hpp"
#include "jacobi_spectral/multi_index.hpp"
#include "jacobi_spectral/operators.hpp"
#include "jacobi_spectral/oracles.hpp"
#include "jacobi_spectral/params.hpp"
#include "jacobi_spectral/polynomial.hpp"
#include "jacobi_spectral/quadrature.hpp"
#include "jacobi_spectral/random.hpp"
#include "jacobi_spectral/serialization.hpp"
#include "jacobi_spectral/spectrum.hpp"
#include "jacobi_spectral/time_quadrature.hpp"
#include "jacobi_spectral/verify.hpp"
