#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qcfb/integrator.hpp"
#include "qcfb/lindblad.hpp"

namespace qcfb {

/// First and second quadrature moments, x = (a + a^dag)/sqrt(2), p = (-i a + i a^dag)/sqrt(2).
struct MomentSet {
  std::array<double, 2> mean{};
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

/// Moments of `mode` in rho (which lives on the full registry).
MomentSet quadrature_moments(const Matrix& rho, const ModeRegistry& registry, std::size_t mode = 0);

double mean_photon_number(const Matrix& rho, const ModeRegistry& registry, std::size_t mode = 0);

/// Var(N)/<N>; nullopt when <N> vanishes.
std::optional<double> fano_factor(const Matrix& rho, const ModeRegistry& registry, std::size_t mode = 0);

/// Stationary g2(tau) by the regression theorem: propagate a rho_ss a^dag and
/// read tr(a^dag a X(tau)) / <a^dag a>^2.
std::vector<double> g2(const Liouvillian& liou, const DensityMatrix& rho_ss, const ModeRegistry& registry,
                       std::size_t mode, const std::vector<double>& tau_grid, IntegratorOptions opts = {});
std::vector<double> g2(const EffectiveModel& model, const DensityMatrix& rho_ss, const ModeRegistry& registry,
                       std::size_t mode, const std::vector<double>& tau_grid, IntegratorOptions opts = {});

struct GaussianReferenceInfo {
  double nbar = 0.0;
  double squeeze_r = 0.0;
  double angle = 0.0;
  double moment_error = 0.0;  // max deviation of sigma's moments from the target
};

/// Displaced squeezed thermal state of the reduced `mode` with rho's moments,
/// on the same truncation as that mode.
DensityMatrix gaussian_reference(const Matrix& rho, const ModeRegistry& registry, std::size_t mode = 0,
                                 GaussianReferenceInfo* info = nullptr);

/// tr[(rho - sigma)^2 / 2] / tr[rho^2] on the reduced mode, clamped to [0, 1].
double non_gaussianity(const Matrix& rho, const ModeRegistry& registry, std::size_t mode = 0);

/// Half the trace norm of the difference.
double trace_distance(const Matrix& x, const Matrix& y);

}  // namespace qcfb
