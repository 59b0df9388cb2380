#pragma once

#include <vector>

#include "qcfb/lindblad.hpp"

namespace qcfb {

struct IntegratorOptions {
  double atol = 1e-10;
  double rtol = 1e-8;
  double h_initial = 0.0;  // 0 picks from the generator norm
  double h_min = 1e-14;    // absolute floor on the step; below it the run aborts
  long max_steps = 50'000'000;
  /// Eigenvalue floor handling at output times: values in [-clip_floor, -1e-8)
  /// are clipped and the state renormalized; anything below aborts.
  double clip_floor = 1e-7;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  double h_smallest = 0.0;
  double h_largest = 0.0;
  double max_trace_drift = 0.0;      // |tr rho - 1| before any correction
  double min_eigenvalue = 1.0;       // smallest raw eigenvalue seen at outputs
  double max_hermiticity_error = 0.0;
  int clipped_outputs = 0;
};

/// Adaptive Dormand-Prince 5(4) on the matrix ODE d rho/dt = L rho.
class Integrator {
 public:
  explicit Integrator(IntegratorOptions opts = {}) : opts_(opts) {}

  /// rho(t_k) for every t_k in t_grid (strictly increasing, starting at 0).
  std::vector<DensityMatrix> integrate(const Liouvillian& liou, const DensityMatrix& rho0,
                                       const std::vector<double>& t_grid);

  /// Same stepping on an arbitrary (not necessarily physical) operator, no
  /// density-matrix checks. Used for regression-theorem seeds.
  std::vector<Matrix> propagate(const Liouvillian& liou, const Matrix& x0, const std::vector<double>& t_grid);

  const IntegratorStats& stats() const noexcept { return stats_; }

 private:
  template <class OnOutput>
  void run(const Liouvillian& liou, const Matrix& x0, const std::vector<double>& t_grid, OnOutput&& emit);

  IntegratorOptions opts_;
  IntegratorStats stats_;
};

/// Convenience wrapper with default options.
std::vector<DensityMatrix> integrate(const Liouvillian& liou, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid);

}  // namespace qcfb
