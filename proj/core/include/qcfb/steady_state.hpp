#pragma once

#include "qcfb/lindblad.hpp"

namespace qcfb {

struct SteadyStateOptions {
  /// Hilbert dimensions up to this use a dense SVD of the superoperator.
  Eigen::Index dense_max_dim = 20;
  /// Kernel is called degenerate when the second-smallest singular value (or
  /// eigenvalue magnitude) is below this times the generator norm.
  double degeneracy_tol = 1e-9;
  /// Required ||L rho|| / ||L||.
  double residual_tol = 1e-9;
  int max_iterations = 60;
};

struct SteadyStateInfo {
  double residual = 0.0;       // ||L rho_ss||_1 / ||L||
  double gap = 0.0;            // second kernel candidate, relative to ||L||
  bool dense = true;
};

/// Unique stationary state of `liou`. Throws NumericalError when the kernel is
/// not one-dimensional or the residual target is missed.
DensityMatrix steady_state(const Liouvillian& liou, const SteadyStateOptions& opts = {},
                           SteadyStateInfo* info = nullptr);

}  // namespace qcfb
