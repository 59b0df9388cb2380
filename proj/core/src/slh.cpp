#include "qcfb/slh.hpp"

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {
const Complex kHalfI{0.0, 0.5};
}

void SLHTriple::validate(double tol) const {
  if (!L.registry()->same_modes(*H.registry()))
    throw ValidationError("SLH triple: L and H use different mode registries");
  if (!H.is_hermitian(tol)) throw ValidationError("SLH triple: Hamiltonian is not Hermitian");
}

SLHTriple closed_system(const OperatorExpr& H) { return {0.0, OperatorExpr(H.registry()), H}; }

SLHTriple series_product(const SLHTriple& g1, const SLHTriple& g2) {
  const Complex s2 = g2.S();
  SLHTriple out{g1.theta + g2.theta, g2.L + s2 * g1.L, g1.H + g2.H};
  out.H += kHalfI * (g1.L.adjoint() * g2.L * std::conj(s2) - g2.L.adjoint() * g1.L * s2);
  return out;
}

SLHTriple self_feedback(const SLHTriple& g) {
  const Complex s = g.S();
  SLHTriple out{2.0 * g.theta, g.L + s * g.L, g.H};
  out.H += kHalfI * (std::conj(s) - s) * (g.L.adjoint() * g.L);
  return out;
}

}  // namespace qcfb
