#include "qcfb/fock.hpp"

#include <cmath>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {

std::vector<int> dims_of(const ModeRegistry& r) {
  std::vector<int> d;
  for (const auto& m : r.modes()) d.push_back(m.truncation);
  return d;
}

// sqrt(n!/(n-k)!) for the ladder amplitude of k lowerings from n
double falling_sqrt(int n, int k) {
  double v = 1.0;
  for (int j = 0; j < k; ++j) v *= n - j;
  return std::sqrt(v);
}

}  // namespace

std::size_t basis_index(const ModeRegistry& registry, const std::vector<int>& occupation) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const int d = registry.mode(i).truncation;
    if (occupation.at(i) < 0 || occupation[i] >= d) throw ValidationError("occupation outside truncation");
    idx = idx * d + occupation[i];
  }
  return idx;
}

SparseMatrix to_sparse_matrix(const OperatorExpr& x, const ModeRegistry& registry) {
  if (!x.registry()->same_modes(registry))
    throw ValidationError("to_matrix: expression and registry have different modes");
  const auto dims = dims_of(registry);
  const std::size_t k = dims.size();
  const std::size_t dim = registry.hilbert_dim();
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(dim * x.size());
  std::vector<int> occ(k, 0);
  for (std::size_t col = 0; col < dim; ++col) {
    // decode col into occupations
    std::size_t rem = col;
    for (std::size_t i = k; i-- > 0;) {
      occ[i] = static_cast<int>(rem % dims[i]);
      rem /= dims[i];
    }
    for (const auto& [m, c] : x.terms()) {
      double amp = 1.0;
      std::size_t row = 0;
      bool alive = true;
      for (std::size_t i = 0; i < k && alive; ++i) {
        const int p = m[i].creation, q = m[i].annihilation;
        const int n = occ[i];
        if (q > n) { alive = false; break; }
        const int mid = n - q;
        const int out = mid + p;
        if (out >= dims[i]) { alive = false; break; }
        amp *= falling_sqrt(n, q) * falling_sqrt(out, p);
        row = row * dims[i] + out;
      }
      if (alive) trip.emplace_back(static_cast<int>(row), static_cast<int>(col), c * amp);
    }
  }
  SparseMatrix M(dim, dim);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  return M;
}

Matrix to_matrix(const OperatorExpr& x, const ModeRegistry& registry) {
  return Matrix(to_sparse_matrix(x, registry));
}

Matrix partial_trace_keep(const Matrix& rho, const ModeRegistry& registry, std::size_t keep) {
  const auto dims = dims_of(registry);
  const std::size_t dim = registry.hilbert_dim();
  if (static_cast<std::size_t>(rho.rows()) != dim || rho.cols() != rho.rows())
    throw ValidationError("partial trace: state dimension does not match registry");
  std::size_t inner = 1;
  for (std::size_t i = keep + 1; i < dims.size(); ++i) inner *= dims[i];
  const std::size_t d = dims.at(keep);
  const std::size_t outer = dim / (inner * d);
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t n = 0; n < inner; ++n)
          out(i, j) += rho((o * d + i) * inner + n, (o * d + j) * inner + n);
  return out;
}

Vector fock_ket(int dim, int n) {
  if (n < 0 || n >= dim) throw ValidationError("Fock level outside truncation");
  Vector v = Vector::Zero(dim);
  v(n) = 1.0;
  return v;
}

Vector coherent_ket(int dim, Complex alpha) {
  Vector v(dim);
  Complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    if (n > 0) term *= alpha / std::sqrt(double(n));
    v(n) = term;
  }
  return v / v.norm();
}

Matrix thermal_state(int dim, double nbar) {
  if (nbar < 0) throw ValidationError("thermal occupation must be >= 0");
  Matrix r = Matrix::Zero(dim, dim);
  if (nbar == 0) {
    r(0, 0) = 1.0;
    return r;
  }
  const double q = nbar / (1.0 + nbar);
  double p = 1.0, total = 0.0;
  for (int n = 0; n < dim; ++n, p *= q) {
    r(n, n) = p;
    total += p;
  }
  return r / total;
}

Matrix projector(const Vector& ket) { return ket * ket.adjoint(); }

Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

std::vector<double> truncation_leak(const Matrix& rho, const ModeRegistry& registry) {
  std::vector<double> out;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    Matrix r = registry.size() == 1 ? rho : partial_trace_keep(rho, registry, i);
    const auto d = r.rows();
    out.push_back(std::abs(r(d - 1, d - 1).real()) + std::abs(r(d - 2, d - 2).real()));
  }
  return out;
}

}  // namespace qcfb
