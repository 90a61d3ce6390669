#pragma once

namespace specsub {

/// Finite-precision knobs. The mathematics is exact; these defaults separate
/// genuine structure from double-precision eigensolver noise and are
/// overridable everywhere they are consumed.
struct Tolerances {
  double hermiticity = 1e-12;    // relative, input symmetrization residual
  double gram = 1e-10;           // eigenvector orthonormality deviation
  double reconstruction = 1e-10; // relative, ||A - U diag U^H||
  double degeneracy = 1e-9;      // relative, eigenvalue grouping slack
  double projection = 1e-10;     // ||P^2 - P||
  double offdiagonal = 1e-10;    // relative, ||VJ + JV|| detection cut
  double margin = 1e-8;          // certification slack on bound margins
  double neighborhood = 1e-12;   // closed-neighborhood boundary slack
  double real_fast_path = 1e-14; // max |Im| for the real-arithmetic path
};

}  // namespace specsub
