#include "qcfb/observables.hpp"

#include <spdlog/spdlog.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {

Matrix reduce(const Matrix& rho, const ModeRegistry& registry, std::size_t mode) {
  if (registry.size() == 1) return rho;
  return partial_trace_keep(rho, registry, mode);
}

struct Ladder {
  Matrix a, a2, n;
};

Ladder single_mode_ops(int dim) {
  Ladder l{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
  for (int k = 1; k < dim; ++k) l.a(k - 1, k) = std::sqrt(double(k));
  for (int k = 2; k < dim; ++k) l.a2(k - 2, k) = std::sqrt(double(k) * (k - 1));
  for (int k = 0; k < dim; ++k) l.n(k, k) = k;
  return l;
}

Complex expect(const Matrix& op, const Matrix& rho) { return (op * rho).trace(); }

MomentSet moments_single(const Matrix& r) {
  const auto l = single_mode_ops(static_cast<int>(r.rows()));
  const Complex a = expect(l.a, r), a2 = expect(l.a2, r);
  const double n = expect(l.n, r).real();
  MomentSet m;
  const double s2 = std::sqrt(2.0);
  m.mean = {s2 * a.real(), s2 * a.imag()};
  // x^2 = (a^2 + a^dag^2 + 2 n + 1)/2, p^2 = (-a^2 - a^dag^2 + 2 n + 1)/2, sym(xp) = Im a^2
  m.cov(0, 0) = a2.real() + n + 0.5 - m.mean[0] * m.mean[0];
  m.cov(1, 1) = -a2.real() + n + 0.5 - m.mean[1] * m.mean[1];
  m.cov(0, 1) = m.cov(1, 0) = a2.imag() - m.mean[0] * m.mean[1];
  return m;
}

// exp(A) for anti-Hermitian A via the Hermitian iA
Matrix unitary_exp(const Matrix& A) {
  Matrix G = Complex(0, 1) * A;
  G = 0.5 * (G + G.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  Vector ph = (Complex(0, -1) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

MomentSet quadrature_moments(const Matrix& rho, const ModeRegistry& registry, std::size_t mode) {
  return moments_single(reduce(rho, registry, mode));
}

double mean_photon_number(const Matrix& rho, const ModeRegistry& registry, std::size_t mode) {
  const Matrix r = reduce(rho, registry, mode);
  double n = 0.0;
  for (Eigen::Index k = 0; k < r.rows(); ++k) n += k * r(k, k).real();
  return n;
}

std::optional<double> fano_factor(const Matrix& rho, const ModeRegistry& registry, std::size_t mode) {
  const Matrix r = reduce(rho, registry, mode);
  double n = 0.0, n2 = 0.0;
  for (Eigen::Index k = 0; k < r.rows(); ++k) {
    const double p = r(k, k).real();
    n += k * p;
    n2 += double(k) * k * p;
  }
  if (n < 1e-14) return std::nullopt;
  return (n2 - n * n) / n;
}

std::vector<double> g2(const Liouvillian& liou, const DensityMatrix& rho_ss, const ModeRegistry& registry,
                       std::size_t mode, const std::vector<double>& tau_grid, IntegratorOptions opts) {
  const auto reg = ModeRegistry::create(registry.modes());
  const std::string& label = registry.mode(mode).label;
  const Matrix a = to_matrix(OperatorExpr::annihilation(reg, label), registry);
  const Matrix n = a.adjoint() * a;
  const Matrix& rho = rho_ss.matrix();
  const double mean = (n * rho).trace().real();
  if (mean < 1e-14) throw ValidationError("g2 undefined: <a^dag a> = 0");
  const Matrix seed = a * rho * a.adjoint();
  Integrator integ(opts);
  const auto evolved = integ.propagate(liou, seed, tau_grid);
  std::vector<double> out;
  out.reserve(evolved.size());
  for (const auto& x : evolved) out.push_back((n * x).trace().real() / (mean * mean));
  return out;
}

std::vector<double> g2(const EffectiveModel& model, const DensityMatrix& rho_ss, const ModeRegistry& registry,
                       std::size_t mode, const std::vector<double>& tau_grid, IntegratorOptions opts) {
  return g2(build_liouvillian(model, registry), rho_ss, registry, mode, tau_grid, opts);
}

DensityMatrix gaussian_reference(const Matrix& rho, const ModeRegistry& registry, std::size_t mode,
                                 GaussianReferenceInfo* info) {
  const Matrix r = reduce(rho, registry, mode);
  const int dim = static_cast<int>(r.rows());
  const MomentSet target = moments_single(r);
  const double det = target.cov.determinant();
  if (!(det >= 0.25 - 1e-9)) throw ValidationError("covariance violates the uncertainty bound");
  const double nbar = std::max(0.0, std::sqrt(std::max(det, 0.25)) - 0.5);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ce(target.cov);
  const double lmin = ce.eigenvalues()(0), lmax = ce.eigenvalues()(1);
  const double sq = 0.25 * std::log(lmax / lmin);
  const Eigen::Vector2d vmin = ce.eigenvectors().col(0);
  const double angle = std::atan2(vmin(1), vmin(0));
  const Complex alpha(target.mean[0] / std::sqrt(2.0), target.mean[1] / std::sqrt(2.0));

  // build in a roomier space, then cut down
  const int big = std::max(2 * dim, dim + 120);
  const auto l = single_mode_ops(big);
  const Matrix ad = l.a.adjoint();
  Matrix sigma = thermal_state(big, nbar);
  if (sq > 0) {
    const Matrix S = unitary_exp(0.5 * sq * (l.a * l.a - ad * ad));
    sigma = S * sigma * S.adjoint();
  }
  if (angle != 0) {
    Vector ph(big);
    for (int k = 0; k < big; ++k) ph(k) = std::polar(1.0, angle * k);
    sigma = ph.asDiagonal() * sigma * ph.conjugate().asDiagonal();
  }
  if (std::abs(alpha) > 0) {
    const Matrix D = unitary_exp(alpha * ad - std::conj(alpha) * l.a);
    sigma = D * sigma * D.adjoint();
  }
  Matrix out = sigma.topLeftCorner(dim, dim);
  out = 0.5 * (out + out.adjoint()).eval();
  out /= out.trace().real();

  const MomentSet got = moments_single(out);
  double err = std::max(std::abs(got.mean[0] - target.mean[0]), std::abs(got.mean[1] - target.mean[1]));
  err = std::max(err, (got.cov - target.cov).cwiseAbs().maxCoeff());
  if (err > 1e-6)
    spdlog::warn("gaussian reference misses target moments by {:.2e} (truncation {} too small?)", err, dim);
  if (info) *info = {nbar, sq, angle, err};
  return DensityMatrix(std::move(out), false);
}

double non_gaussianity(const Matrix& rho, const ModeRegistry& registry, std::size_t mode) {
  const Matrix r = reduce(rho, registry, mode);
  const auto reg1 = ModeRegistry::create({{registry.mode(mode).label, static_cast<int>(r.rows())}});
  const Matrix sigma = gaussian_reference(r, *reg1, 0).matrix();
  const Matrix d = r - sigma;
  const double num = 0.5 * (d * d).trace().real();
  const double den = (r * r).trace().real();
  const double delta = num / den;
  if (delta < 0 || delta > 1) {
    spdlog::info("non-Gaussianity {} clamped to [0, 1]", delta);
    return std::clamp(delta, 0.0, 1.0);
  }
  return delta;
}

double trace_distance(const Matrix& x, const Matrix& y) {
  Matrix d = x - y;
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qcfb
