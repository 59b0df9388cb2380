#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "qcfb/mode_registry.hpp"
#include "qcfb/operator_expr.hpp"

namespace qcfb {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Fock-basis matrix of `x` on the truncations of `registry` (which must share
/// x's mode labels). Products are exact per basis vector: levels pushed above the
/// cutoff are dropped, so this is the polynomial's own matrix, not a product of
/// truncated ladder matrices.
SparseMatrix to_sparse_matrix(const OperatorExpr& x, const ModeRegistry& registry);
Matrix to_matrix(const OperatorExpr& x, const ModeRegistry& registry);

/// Flat index of an occupation tuple; the first mode is the most significant digit.
std::size_t basis_index(const ModeRegistry& registry, const std::vector<int>& occupation);

/// Reduced state of one mode.
Matrix partial_trace_keep(const Matrix& rho, const ModeRegistry& registry, std::size_t keep);

/// Single-mode state vectors / density matrices on `dim` levels.
Vector fock_ket(int dim, int n);
/// Truncated Poisson amplitudes, renormalized inside the cutoff.
Vector coherent_ket(int dim, Complex alpha);
Matrix thermal_state(int dim, double nbar);
Matrix projector(const Vector& ket);

/// Kronecker product, first argument most significant.
Matrix kron(const Matrix& x, const Matrix& y);

/// Population of the top two Fock levels of each mode.
std::vector<double> truncation_leak(const Matrix& rho, const ModeRegistry& registry);

}  // namespace qcfb
