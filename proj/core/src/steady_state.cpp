#include "qcfb/steady_state.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {

Matrix unvec(const Vector& v, Eigen::Index n) {
  Matrix r = Eigen::Map<const Matrix>(v.data(), n, n);
  r = 0.5 * (r + r.adjoint()).eval();
  const Complex tr = r.trace();
  if (std::abs(tr) < 1e-300) throw NumericalError("steady state: kernel vector is traceless");
  return r / tr.real();
}

double residual(const Liouvillian& liou, const Matrix& rho, double lnorm) {
  const Matrix d = liou.apply(rho);
  return d.cwiseAbs().colwise().sum().maxCoeff() / std::max(lnorm, 1e-300);
}

Matrix dense_kernel(const Liouvillian& liou, const SteadyStateOptions& opts, SteadyStateInfo& info) {
  const auto n = liou.dim();
  const Matrix S = liou.dense_superoperator();
  Eigen::BDCSVD<Matrix> svd(S, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const auto m = sv.size();
  const double smax = sv(0);
  info.gap = m > 1 ? sv(m - 2) / smax : 1.0;
  info.dense = true;
  if (info.gap < opts.degeneracy_tol)
    throw NumericalError("steady state is not unique: second singular value " + std::to_string(info.gap) +
                         " relative to the generator norm");
  return unvec(svd.matrixV().col(m - 1), n);
}

Matrix sparse_kernel(const Liouvillian& liou, const SteadyStateOptions& opts, SteadyStateInfo& info) {
  const auto n = liou.dim();
  const auto N2 = n * n;
  const SparseMatrix S = liou.superoperator();
  const double lnorm = liou.norm();
  // shift-invert around a small positive shift; 0 maps to the dominant eigenvalue
  const double shift = 1e-8 * lnorm;
  SparseMatrix I(N2, N2);
  I.setIdentity();
  SparseMatrix A = S - Complex(shift, 0.0) * I;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw NumericalError("steady state: sparse factorization failed");

  // deterministic start: identity and a diagonal ramp
  Matrix X = Matrix::Zero(N2, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i * n + i, 0) = 1.0;
    X(i * n + i, 1) = double(i + 1) / n;
  }
  X.col(1)(1) = 0.5;
  Eigen::ComplexEigenSolver<Matrix> es;
  Matrix ritz;
  Eigen::Index best = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Matrix Y = lu.solve(X);
    Eigen::HouseholderQR<Matrix> qr(Y);
    X = qr.householderQ() * Matrix::Identity(N2, 2);
    Matrix T = X.adjoint() * (S * X);
    es.compute(T);
    const auto& ev = es.eigenvalues();
    best = std::abs(ev(0)) <= std::abs(ev(1)) ? 0 : 1;
    const double second = std::abs(ev(1 - best)) / lnorm;
    info.gap = second;
    ritz = X * es.eigenvectors().col(best);
    Matrix rho = unvec(ritz, n);
    if (residual(liou, rho, lnorm) < opts.residual_tol && it > 2) break;
  }
  info.dense = false;
  if (info.gap < opts.degeneracy_tol)
    throw NumericalError("steady state is not unique: second eigenvalue " + std::to_string(info.gap) +
                         " relative to the generator norm");
  return unvec(ritz, n);
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& liou, const SteadyStateOptions& opts, SteadyStateInfo* info_out) {
  SteadyStateInfo info;
  Matrix rho = liou.dim() <= opts.dense_max_dim ? dense_kernel(liou, opts, info) : sparse_kernel(liou, opts, info);
  info.residual = residual(liou, rho, liou.norm());
  if (info_out) *info_out = info;
  if (info.residual > opts.residual_tol)
    throw NumericalError("steady state residual " + std::to_string(info.residual) + " above tolerance");
  return DensityMatrix(std::move(rho));
}

}  // namespace qcfb
