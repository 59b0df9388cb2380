#include "qcfb/integrator.hpp"

#include <spdlog/spdlog.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void check_grid(const std::vector<double>& t) {
  if (t.empty()) throw ValidationError("time grid is empty");
  if (t.front() != 0.0) throw ValidationError("time grid must start at 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ValidationError("time grid must be strictly increasing");
}

}  // namespace

template <class OnOutput>
void Integrator::run(const Liouvillian& liou, const Matrix& x0, const std::vector<double>& t_grid,
                     OnOutput&& emit) {
  check_grid(t_grid);
  stats_ = IntegratorStats{};
  stats_.h_smallest = std::numeric_limits<double>::infinity();
  const auto n = liou.dim();
  Matrix y = x0, k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n), ytmp(n, n), ynew(n, n);

  emit(0, y);
  double t = 0.0;
  double h = opts_.h_initial;
  liou.apply(y, k1);
  ++stats_.evaluations;
  if (h <= 0) {
    // rough guess from the derivative scale
    const double d0 = y.cwiseAbs().maxCoeff(), d1 = k1.cwiseAbs().maxCoeff();
    h = (d1 > 0 && d0 > 0) ? 0.01 * d0 / d1 : 1e-3;
    if (t_grid.size() > 1) h = std::min(h, t_grid[1]);
  }
  long steps = 0;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double t_end = t_grid[k];
    while (t < t_end) {
      if (++steps > opts_.max_steps) throw NumericalError("integrator exceeded max_steps");
      bool last = false;
      double hs = h;
      if (t + hs >= t_end) {
        hs = t_end - t;
        last = true;
      }
      ytmp = y + hs * a21 * k1;
      liou.apply(ytmp, k2);
      ytmp = y + hs * (a31 * k1 + a32 * k2);
      liou.apply(ytmp, k3);
      ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      liou.apply(ytmp, k4);
      ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      liou.apply(ytmp, k5);
      ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      liou.apply(ytmp, k6);
      ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      liou.apply(ynew, k7);
      stats_.evaluations += 6;

      // max-norm of the scaled error estimate
      double err = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
          const Complex e = hs * (e1 * k1(i, j) + e3 * k3(i, j) + e4 * k4(i, j) + e5 * k5(i, j) + e6 * k6(i, j) +
                                  e7 * k7(i, j));
          const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y(i, j)), std::abs(ynew(i, j)));
          err = std::max(err, std::abs(e) / sc);
        }
      if (!std::isfinite(err)) throw NumericalError("integrator produced non-finite values");

      if (err <= 1.0) {
        t = last ? t_end : t + hs;
        y.swap(ynew);
        k1.swap(k7);  // FSAL
        ++stats_.accepted;
        stats_.h_smallest = std::min(stats_.h_smallest, hs);
        stats_.h_largest = std::max(stats_.h_largest, hs);
        const double fac = err == 0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        // a step shortened to hit a grid point should not shrink the next one
        h = last ? std::max(h, hs * fac) : hs * fac;
      } else {
        ++stats_.rejected;
        h = hs * std::max(0.1, 0.9 * std::pow(err, -0.2));
      }
      if (h < opts_.h_min) throw NumericalError("integrator step size underflow at t = " + std::to_string(t));
    }
    emit(k, y);
  }
}

std::vector<DensityMatrix> Integrator::integrate(const Liouvillian& liou, const DensityMatrix& rho0,
                                                 const std::vector<double>& t_grid) {
  if (rho0.dim() != liou.dim()) throw ValidationError("initial state dimension does not match Liouvillian");
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  run(liou, rho0.matrix(), t_grid, [&](std::size_t k, const Matrix& y) {
    const double drift = std::abs(y.trace() - Complex(1.0, 0.0));
    const double herm = (y - y.adjoint()).cwiseAbs().maxCoeff();
    stats_.max_trace_drift = std::max(stats_.max_trace_drift, drift);
    stats_.max_hermiticity_error = std::max(stats_.max_hermiticity_error, herm);
    Matrix h = 0.5 * (y + y.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double lmin = es.eigenvalues().minCoeff();
    stats_.min_eigenvalue = std::min(stats_.min_eigenvalue, lmin);
    if (lmin < -opts_.clip_floor)
      throw NumericalError("negative eigenvalue " + std::to_string(lmin) + " at t = " + std::to_string(t_grid[k]) +
                           " exceeds the clipping floor");
    if (lmin < -1e-8) {
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      h = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
      h /= h.trace().real();
      ++stats_.clipped_outputs;
      spdlog::info("clipped eigenvalue {:.3e} at t = {}", lmin, t_grid[k]);
    }
    out.emplace_back(std::move(h));
  });
  return out;
}

std::vector<Matrix> Integrator::propagate(const Liouvillian& liou, const Matrix& x0,
                                          const std::vector<double>& t_grid) {
  std::vector<Matrix> out;
  out.reserve(t_grid.size());
  run(liou, x0, t_grid, [&](std::size_t, const Matrix& y) { out.push_back(y); });
  return out;
}

std::vector<DensityMatrix> integrate(const Liouvillian& liou, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid) {
  Integrator it;
  return it.integrate(liou, rho0, t_grid);
}

}  // namespace qcfb
