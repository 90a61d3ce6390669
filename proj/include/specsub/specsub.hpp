#pragma once

// Umbrella header: a priori spectral-subspace perturbation bounds for
// Hermitian operators, with exact finite-dimensional verification.

#include "specsub/analyzer.hpp"
#include "specsub/bounds.hpp"
#include "specsub/errors.hpp"
#include "specsub/generators.hpp"
#include "specsub/hermitian.hpp"
#include "specsub/io.hpp"
#include "specsub/partition.hpp"
#include "specsub/tolerances.hpp"
