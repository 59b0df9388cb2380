#include "qcfb/feedback_loop.hpp"

#include <cmath>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {

constexpr double kXiGuard = 1e-6;
const Complex kI{0.0, 1.0};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

AmplifierParams::AmplifierParams(double kappa, double xi) : kappa_(kappa), xi_(xi) {
  r0_ = std::log((kappa + xi) / (kappa - xi));
}

AmplifierParams AmplifierParams::from_kappa_xi(double kappa, double xi) {
  require_finite(kappa, "kappa");
  require_finite(xi, "xi");
  if (kappa <= 0) throw ValidationError("amplifier kappa must be positive");
  if (xi < 0) throw ValidationError("amplifier xi must be non-negative");
  if ((kappa - xi) / kappa < kXiGuard)
    throw ValidationError("amplifier xi too close to kappa: elimination is singular (r0 -> inf)");
  return AmplifierParams(kappa, xi);
}

AmplifierParams AmplifierParams::from_gain(double G0, double kappa) {
  require_finite(G0, "G0");
  if (G0 < 1) throw ValidationError("amplifier gain G0 must be >= 1");
  // cosh(r0) = sqrt(G0) and xi/kappa = tanh(r0/2)
  const double r0 = std::acosh(std::sqrt(G0));
  return from_kappa_xi(kappa, kappa * std::tanh(0.5 * r0));
}

double AmplifierParams::G0() const {
  const double c = std::cosh(r0_);
  return c * c;
}

double AmplifierParams::G0_closed_form() const {
  const double k2 = kappa_ * kappa_, x2 = xi_ * xi_;
  const double num = (k2 + x2) * (k2 + x2);
  const double den = (kappa_ - xi_) * (kappa_ - xi_) * (kappa_ + xi_) * (kappa_ + xi_);
  return num / den;
}

// (cosh 2r - 1)/2 and -sinh(2r)/2, written as sinh^2 r and -sinh r cosh r so that
// small r0 does not lose digits to cancellation
double AmplifierParams::N() const {
  const double s = std::sinh(r0_);
  return s * s;
}

double AmplifierParams::M() const { return -std::sinh(r0_) * std::cosh(r0_); }

void FeedbackLoopSpec::validate() const {
  if (!plant_H.is_hermitian(1e-12)) throw ValidationError("loop: plant Hamiltonian is not Hermitian");
  if (!L.registry()->same_modes(*plant_H.registry()) || !L_f.registry()->same_modes(*plant_H.registry()))
    throw ValidationError("loop: L, L_f and H use different mode registries");
  if (!(A >= 0)) throw ValidationError("loop: drive amplitude A must be >= 0");
  require_finite(theta, "theta");
  require_finite(phi, "phi");
  if (auto c = registry()->find(amp_mode)) {
    if (L.acts_on(*c) || L_f.acts_on(*c))
      throw ValidationError("loop: L and L_f must not act on the amplifier mode '" + amp_mode + "'");
  }
}

void DissipationChannel::validate() const {
  if (!(rate_prefactor > 0)) throw ValidationError("channel rate prefactor must be positive");
  if (auto* s = std::get_if<SqueezedBath>(&bath)) {
    if (s->N < 0) throw ValidationError("squeezed bath needs N >= 0");
    if (std::norm(s->M) > s->N * (s->N + 1) + 1e-9)
      throw ValidationError("squeezed bath violates |M|^2 <= N(N+1)");
  }
}

void EffectiveModel::validate(double tol) const {
  if (!H_eff.is_hermitian(tol)) throw ValidationError("effective Hamiltonian is not Hermitian");
  for (const auto& ch : channels) {
    if (!ch.op.registry()->same_modes(*registry()))
      throw ValidationError("channel operator uses a different mode registry");
    ch.validate();
  }
}

SLHTriple amplifier_slh(const AmplifierParams& amp, double A, double phi, const RegistryPtr& registry,
                        std::string_view mode) {
  if (!registry->find(mode))
    throw ValidationError("amplifier mode '" + std::string(mode) + "' is not registered");
  const auto c = OperatorExpr::annihilation(registry, mode);
  const auto cd = OperatorExpr::creation(registry, mode);
  const double sk = std::sqrt(amp.kappa());
  SLHTriple g{0.0, sk * c, OperatorExpr(registry)};
  g.H = Complex(0.0, amp.xi() / 4.0) * (cd * cd - c * c);
  g.H += sk * A * (std::polar(1.0, phi) * c + std::polar(1.0, -phi) * cd);
  return g;
}

SLHTriple compose_loop_full(const FeedbackLoopSpec& spec) {
  spec.validate();
  const auto& reg = spec.registry();
  SLHTriple plant{spec.theta, spec.L, spec.plant_H};
  SLHTriple amp = amplifier_slh(spec.amp, spec.A, spec.phi, reg, spec.amp_mode);
  SLHTriple back{spec.theta, spec.L_f, OperatorExpr(reg)};
  return series_product(series_product(plant, amp), back);
}

EffectiveModel eliminate_amplifier(const FeedbackLoopSpec& spec) {
  spec.validate();
  const auto& L = spec.L;
  const auto& Lf = spec.L_f;
  const Complex S = spec.S();
  const double ch = std::cosh(spec.amp.r0());
  const double sh = std::sinh(spec.amp.r0());

  const auto Ld = L.adjoint();
  const auto LfdS = Lf.adjoint() * S;
  const auto SdLf = std::conj(S) * Lf;

  OperatorExpr H = spec.plant_H;
  H += ch * Complex(0.0, 0.5) * (LfdS * L - Ld * SdLf);
  const auto sq = sh * Complex(0.0, -0.25) * ((Ld - LfdS) * (Ld + LfdS));
  H += sq + sq.adjoint();
  const auto drive = Complex(0.0, -0.5) * spec.A * std::polar(1.0, spec.phi) *
                     ((ch + 1.0) * (L + SdLf) + sh * (Ld + LfdS));
  H += drive + drive.adjoint();

  const auto J = L - SdLf;
  EffectiveModel m{H, {}, std::nullopt};
  if (!J.is_zero()) {
    m.channels.push_back({J, VacuumBath{}, 1.0});
    m.channels.push_back({J, SqueezedBath{spec.amp.N(), Complex(spec.amp.M(), 0.0)}, 1.0});
  }
  if (!m.H_eff.is_hermitian(1e-10))
    throw NumericalError("internal: eliminated Hamiltonian lost Hermiticity");
  return m;
}

OperatorExpr feedback_nonlinearity(const FeedbackLoopSpec& spec) {
  const auto& L = spec.L;
  const auto& Lf = spec.L_f;
  const Complex S = spec.S();
  const double g = std::sqrt(spec.amp.G0());
  const auto Ld = L.adjoint();
  const auto LfdS = Lf.adjoint() * S;
  const auto SdLf = std::conj(S) * Lf;
  const auto sq = g * Complex(0.0, -0.25) * ((Ld - LfdS) * (Ld + LfdS));
  return sq + sq.adjoint() + g * Complex(0.0, 0.5) * (LfdS * L - Ld * SdLf);
}

EffectiveModel high_gain_limit(const FeedbackLoopSpec& spec) {
  spec.validate();
  const auto& L = spec.L;
  const auto& Lf = spec.L_f;
  const Complex S = spec.S();
  const double G0 = spec.amp.G0();
  const double g = std::sqrt(G0);
  const auto Ld = L.adjoint();
  const auto LfdS = Lf.adjoint() * S;
  const auto SdLf = std::conj(S) * Lf;

  const auto nl = feedback_nonlinearity(spec);
  OperatorExpr H = spec.plant_H + nl;
  H += g * spec.A * std::cos(spec.phi) * (L + Ld + SdLf + LfdS);

  const auto op = 0.5 * (L - Ld + LfdS - SdLf);
  EffectiveModel m{H, {}, nl};
  if (!op.is_zero()) m.channels.push_back({op, VacuumBath{}, G0});
  if (!m.H_eff.is_hermitian(1e-10))
    throw NumericalError("internal: high-gain Hamiltonian lost Hermiticity");
  return m;
}

EffectiveModel combine_loops(const std::vector<FeedbackLoopSpec>& loops, bool high_gain) {
  if (loops.empty()) throw ValidationError("combine_loops needs at least one loop");
  EffectiveModel out{loops.front().plant_H, {}, std::nullopt};
  for (const auto& spec : loops) {
    auto m = high_gain ? high_gain_limit(spec) : eliminate_amplifier(spec);
    out.H_eff += m.H_eff - spec.plant_H;
    if (m.H_nl) out.H_nl = out.H_nl ? *out.H_nl + *m.H_nl : *m.H_nl;
    for (auto& ch : m.channels) out.channels.push_back(std::move(ch));
  }
  return out;
}

EffectiveModel compensate_linear(EffectiveModel model) {
  model.H_eff -= model.H_eff.homogeneous_part(1);
  return model;
}

}  // namespace qcfb
