#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcfb/operator_expr.hpp"
#include "qcfb/slh.hpp"

namespace qcfb {

/// Degenerate-parametric cavity used as the in-loop amplifier. Rates in rad/us.
class AmplifierParams {
 public:
  /// Rejects xi < 0, kappa <= 0 and (kappa - xi)/kappa < 1e-6.
  static AmplifierParams from_kappa_xi(double kappa, double xi);
  /// Inverts G0 = cosh^2(r0) at the given cavity linewidth.
  static AmplifierParams from_gain(double G0, double kappa);

  double kappa() const noexcept { return kappa_; }
  double xi() const noexcept { return xi_; }
  double r0() const noexcept { return r0_; }
  double G0() const;
  /// Closed form in kappa and xi; equals G0() analytically.
  double G0_closed_form() const;
  double N() const;
  double M() const;

 private:
  AmplifierParams(double kappa, double xi);
  double kappa_;
  double xi_;
  double r0_;
};

struct FeedbackLoopSpec {
  OperatorExpr plant_H;
  double theta = 0.0;
  OperatorExpr L;
  OperatorExpr L_f;
  AmplifierParams amp = AmplifierParams::from_kappa_xi(1.0, 0.0);
  double A = 0.0;    // drive amplitude, sqrt(rad/us)
  double phi = 0.0;  // drive phase
  std::string amp_mode = "c";

  Complex S() const { return std::polar(1.0, theta); }
  const RegistryPtr& registry() const { return plant_H.registry(); }
  /// Hermitian plant, A >= 0, and L, L_f free of the amplifier mode.
  void validate() const;
};

struct VacuumBath {
  friend bool operator==(const VacuumBath&, const VacuumBath&) = default;
};
struct SqueezedBath {
  double N = 0.0;
  Complex M{};
  friend bool operator==(const SqueezedBath&, const SqueezedBath&) = default;
};
using Bath = std::variant<VacuumBath, SqueezedBath>;

struct DissipationChannel {
  OperatorExpr op;
  Bath bath;
  double rate_prefactor = 1.0;

  bool squeezed() const { return std::holds_alternative<SqueezedBath>(bath); }
  /// |M|^2 <= N(N+1) + 1e-9, N >= 0, rate > 0.
  void validate() const;
};

struct EffectiveModel {
  OperatorExpr H_eff;
  std::vector<DissipationChannel> channels;
  /// Feedback-induced nonlinear part, filled only by high_gain_limit.
  std::optional<OperatorExpr> H_nl;

  const RegistryPtr& registry() const { return H_eff.registry(); }
  void validate(double tol = 1e-10) const;
};

/// (0, sqrt(kappa) c, (i xi/4)(c^dag^2 - c^2) + sqrt(kappa) A (e^{i phi} c + c^dag e^{-i phi})).
SLHTriple amplifier_slh(const AmplifierParams& amp, double A, double phi, const RegistryPtr& registry,
                        std::string_view mode = "c");

/// Plant -> amplifier -> feedback port, built by chained series products with
/// the plant Hamiltonian carried by the first stage only.
SLHTriple compose_loop_full(const FeedbackLoopSpec& spec);

/// Reduced plant model after removing the amplifier cavity (finite gain).
EffectiveModel eliminate_amplifier(const FeedbackLoopSpec& spec);

/// Large-G0 form of the reduced model.
EffectiveModel high_gain_limit(const FeedbackLoopSpec& spec);

/// The sqrt(G0)-weighted terms of the high-gain Hamiltonian that carry nonlinearity.
OperatorExpr feedback_nonlinearity(const FeedbackLoopSpec& spec);

/// Several loops hanging off one plant. Feedback terms add, channels concatenate,
/// and the plant Hamiltonian (taken from the first loop) is counted once.
EffectiveModel combine_loops(const std::vector<FeedbackLoopSpec>& loops, bool high_gain);

/// Remove the part of H_eff linear in the ladder operators.
EffectiveModel compensate_linear(EffectiveModel model);

}  // namespace qcfb
