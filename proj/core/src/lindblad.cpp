#include "qcfb/lindblad.hpp"

#include <spdlog/spdlog.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "qcfb/errors.hpp"

namespace qcfb {

DensityMatrix::DensityMatrix(Matrix m, bool check) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ValidationError("density matrix must be square");
  if (check) validate();
}

DensityMatrix DensityMatrix::pure(const Vector& ket) { return DensityMatrix(projector(ket / ket.norm())); }

double DensityMatrix::min_eigenvalue() const {
  Matrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::trace_error() const { return std::abs(m_.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

void DensityMatrix::validate() const {
  if (hermiticity_error() > 1e-10) throw ValidationError("density matrix is not Hermitian");
  if (trace_error() > 1e-8) throw ValidationError("density matrix trace differs from 1");
  if (min_eigenvalue() < -1e-8) throw ValidationError("density matrix has a negative eigenvalue");
}

Liouvillian::Liouvillian(Eigen::Index dim) : dim_(dim), K_(dim, dim), Kd_(dim, dim) {}

void Liouvillian::add_hamiltonian(const SparseMatrix& H) {
  if (H.rows() != dim_) throw ValidationError("Hamiltonian dimension mismatch");
  K_ += Complex(0.0, -1.0) * H;
  Kd_ = K_.adjoint();
  labels_.push_back("hamiltonian");
}

void Liouvillian::add_vacuum(const SparseMatrix& L, double rate, std::string label) {
  if (L.rows() != dim_) throw ValidationError("channel dimension mismatch");
  SparseMatrix Ld = L.adjoint();
  K_ += Complex(-0.5 * rate, 0.0) * (Ld * L);
  Kd_ = K_.adjoint();
  jumps_.push_back({rate, L, Ld});
  labels_.push_back(std::move(label));
}

void Liouvillian::add_squeezed(const SparseMatrix& L, double N, Complex M, double rate, std::string label) {
  if (L.rows() != dim_) throw ValidationError("channel dimension mismatch");
  if (N < 0 || std::norm(M) > N * (N + 1) + 1e-9)
    throw ValidationError("squeezed bath violates |M|^2 <= N(N+1)");
  SparseMatrix Ld = L.adjoint();
  // (N+1) D[L] + N D[L^dag] + M^* (L r L - {L^2, r}/2) + M (L^dag r L^dag - {L^dag^2, r}/2)
  SparseMatrix G = Complex(N + 1, 0.0) * (Ld * L);
  G += Complex(N, 0.0) * (L * Ld);
  G += std::conj(M) * (L * L);
  G += M * (Ld * Ld);
  K_ += Complex(-0.5 * rate, 0.0) * G;
  Kd_ = K_.adjoint();
  if (N + 1 != 0) jumps_.push_back({rate * (N + 1), L, Ld});
  if (N != 0) jumps_.push_back({rate * N, Ld, L});
  if (M != Complex{}) {
    jumps_.push_back({rate * std::conj(M), L, L});
    jumps_.push_back({rate * M, Ld, Ld});
  }
  labels_.push_back(std::move(label));
}

Liouvillian& Liouvillian::operator+=(const Liouvillian& other) {
  if (other.dim_ != dim_) throw ValidationError("Liouvillian dimension mismatch");
  K_ += other.K_;
  Kd_ = K_.adjoint();
  jumps_.insert(jumps_.end(), other.jumps_.begin(), other.jumps_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
  return *this;
}

void Liouvillian::apply(const Matrix& rho, Matrix& out) const {
  out.noalias() = K_ * rho;
  out.noalias() += rho * Kd_;
  Matrix tmp(dim_, dim_);
  for (const auto& j : jumps_) {
    tmp.noalias() = j.left * rho;
    out.noalias() += j.coeff * (tmp * j.right);
  }
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  Matrix out(dim_, dim_);
  apply(rho, out);
  return out;
}

SparseMatrix Liouvillian::superoperator() const {
  SparseMatrix I(dim_, dim_);
  I.setIdentity();
  SparseMatrix Kc = SparseMatrix(K_.conjugate());
  SparseMatrix S = Eigen::kroneckerProduct(I, K_).eval();
  S += Eigen::kroneckerProduct(Kc, I).eval();
  for (const auto& j : jumps_) {
    SparseMatrix rt = SparseMatrix(j.right.transpose());
    S += j.coeff * SparseMatrix(Eigen::kroneckerProduct(rt, j.left).eval());
  }
  S.makeCompressed();
  return S;
}

Matrix Liouvillian::dense_superoperator() const { return Matrix(superoperator()); }

double Liouvillian::norm() const {
  const SparseMatrix S = superoperator();
  double best = 0.0;
  for (int k = 0; k < S.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(S, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

Liouvillian hamiltonian_generator(const SparseMatrix& H) {
  Liouvillian l(H.rows());
  l.add_hamiltonian(H);
  return l;
}

Liouvillian vacuum_dissipator(const SparseMatrix& L) {
  Liouvillian l(L.rows());
  l.add_vacuum(L);
  return l;
}

Liouvillian squeezed_dissipator(const SparseMatrix& L, double N, Complex M) {
  Liouvillian l(L.rows());
  l.add_squeezed(L, N, M);
  return l;
}

namespace {

void check_size(const ModeRegistry& registry, const BuildOptions& opts) {
  const std::size_t d = registry.hilbert_dim();
  if (d * d > opts.max_superop_dim)
    throw ValidationError("Hilbert dimension " + std::to_string(d) + " exceeds the superoperator cap (dim^2 <= " +
                          std::to_string(opts.max_superop_dim) + ")");
}

void warn_degree(const OperatorExpr& x, const char* what) {
  if (x.total_degree() > 8)
    spdlog::warn("{} has total degree {} (> 8); truncation effects may dominate", what, x.total_degree());
}

}  // namespace

Liouvillian build_liouvillian(const EffectiveModel& model, const ModeRegistry& registry, const BuildOptions& opts) {
  check_size(registry, opts);
  model.validate();
  const auto dim = static_cast<Eigen::Index>(registry.hilbert_dim());
  Liouvillian l(dim);
  warn_degree(model.H_eff, "effective Hamiltonian");
  l.add_hamiltonian(to_sparse_matrix(model.H_eff, registry));
  for (std::size_t i = 0; i < model.channels.size(); ++i) {
    const auto& ch = model.channels[i];
    warn_degree(ch.op, "channel operator");
    const SparseMatrix L = to_sparse_matrix(ch.op, registry);
    if (const auto* s = std::get_if<SqueezedBath>(&ch.bath))
      l.add_squeezed(L, s->N, s->M, ch.rate_prefactor, "squeezed#" + std::to_string(i));
    else
      l.add_vacuum(L, ch.rate_prefactor, "vacuum#" + std::to_string(i));
  }
  return l;
}

Liouvillian build_liouvillian(const SLHTriple& g, const ModeRegistry& registry, const BuildOptions& opts) {
  check_size(registry, opts);
  g.validate(1e-10);
  Liouvillian l(static_cast<Eigen::Index>(registry.hilbert_dim()));
  l.add_hamiltonian(to_sparse_matrix(g.H, registry));
  if (!g.L.is_zero()) l.add_vacuum(to_sparse_matrix(g.L, registry), 1.0, "output");
  return l;
}

}  // namespace qcfb
