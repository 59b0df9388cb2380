#pragma once

#include <string>
#include <vector>

#include "qcfb/feedback_loop.hpp"
#include "qcfb/fock.hpp"

namespace qcfb {

/// Checked density matrix: Hermitian within 1e-10, unit trace within 1e-8,
/// eigenvalues >= -1e-8.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m, bool check = true);
  static DensityMatrix pure(const Vector& ket);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double min_eigenvalue() const;
  double trace_error() const;
  double hermiticity_error() const;
  /// Throws ValidationError describing the first violated invariant.
  void validate() const;

 private:
  Matrix m_;
};

/// Master-equation generator kept in the form
///   d rho = K rho + rho K^dag + sum_k c_k A_k rho B_k
/// which covers both the commutator and every dissipator term.
class Liouvillian {
 public:
  explicit Liouvillian(Eigen::Index dim);

  struct Sandwich {
    Complex coeff;
    SparseMatrix left;
    SparseMatrix right;
  };

  Eigen::Index dim() const noexcept { return dim_; }
  const SparseMatrix& K() const noexcept { return K_; }
  const std::vector<Sandwich>& sandwiches() const noexcept { return jumps_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  void add_hamiltonian(const SparseMatrix& H);
  /// rate * D[L]
  void add_vacuum(const SparseMatrix& L, double rate = 1.0, std::string label = "vacuum");
  /// rate * D_s[L] with bath moments (N, M).
  void add_squeezed(const SparseMatrix& L, double N, Complex M, double rate = 1.0,
                    std::string label = "squeezed");

  Liouvillian& operator+=(const Liouvillian& other);

  Matrix apply(const Matrix& rho) const;
  void apply(const Matrix& rho, Matrix& out) const;

  /// Matrix acting on column-stacked vec(rho): vec(A rho B) = (B^T kron A) vec(rho).
  SparseMatrix superoperator() const;
  Matrix dense_superoperator() const;
  /// Induced 1-norm of the superoperator (max column sum).
  double norm() const;

 private:
  Eigen::Index dim_;
  SparseMatrix K_;
  SparseMatrix Kd_;
  std::vector<Sandwich> jumps_;
  std::vector<std::string> labels_;
};

Liouvillian hamiltonian_generator(const SparseMatrix& H);
Liouvillian vacuum_dissipator(const SparseMatrix& L);
/// Rejects |M|^2 > N(N+1) + 1e-9.
Liouvillian squeezed_dissipator(const SparseMatrix& L, double N, Complex M);

struct BuildOptions {
  /// Refuse superoperators with dim^2 above this.
  std::size_t max_superop_dim = 400u * 400u;
};

Liouvillian build_liouvillian(const EffectiveModel& model, const ModeRegistry& registry,
                              const BuildOptions& opts = {});

/// Vacuum-bath master equation of a plain SLH triple.
Liouvillian build_liouvillian(const SLHTriple& g, const ModeRegistry& registry, const BuildOptions& opts = {});

}  // namespace qcfb
