#pragma once

#include "qcfb/operator_expr.hpp"

namespace qcfb {

/// Single-channel open node. S = exp(i theta) is kept as its phase so |S| = 1 by construction.
struct SLHTriple {
  double theta = 0.0;
  OperatorExpr L;
  OperatorExpr H;

  Complex S() const { return std::polar(1.0, theta); }
  const RegistryPtr& registry() const { return H.registry(); }

  /// Throws ValidationError when H is not Hermitian within `tol`.
  void validate(double tol = 1e-12) const;
};

/// Closed system with no coupling: (0, 0, H).
SLHTriple closed_system(const OperatorExpr& H);

/// g1 feeds g2: (S2 S1, L2 + S2 L1, H1 + H2 + (i/2)(L1^dag S2^* L2 - L2^dag S2 L1)).
SLHTriple series_product(const SLHTriple& g1, const SLHTriple& g2);

/// Output of g fed straight back into g. H is counted once, so this equals
/// series_product(g, g') where g' is g with its Hamiltonian removed.
SLHTriple self_feedback(const SLHTriple& g);

}  // namespace qcfb
