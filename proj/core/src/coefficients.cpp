#include "qcfb/coefficients.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {
void nonneg(double v, const char* name) {
  if (!(v >= 0)) throw ValidationError(std::string(name) + " must be >= 0");
}
}  // namespace

double mhz_over_2pi_to_rad_per_us(double nu_mhz) { return 2.0 * std::numbers::pi * nu_mhz; }
double rad_per_us_to_mhz_over_2pi(double omega) { return omega / (2.0 * std::numbers::pi); }

KerrCoefficients kerr_coefficients(double G0, double gamma_a, double A_T) {
  nonneg(G0, "G0");
  nonneg(gamma_a, "gamma_a");
  nonneg(A_T, "A_T");
  return {2.0 * A_T * std::sqrt(G0 * gamma_a), 2.0 * std::sqrt(G0) * gamma_a};
}

double cross_kerr_coefficient(double G0, double gamma_a, double gamma_b) {
  nonneg(G0, "G0");
  nonneg(gamma_a, "gamma_a");
  nonneg(gamma_b, "gamma_b");
  return 2.0 * std::sqrt(G0 * gamma_a * gamma_b);
}

QuarticCoefficients quartic_coefficients(double G1, double G3, double gamma, double gamma1, double gamma2,
                                         double gamma3, double A1, double A3, double A4) {
  for (auto [v, n] : {std::pair{G1, "G1"}, {G3, "G3"}, {gamma, "gamma"}, {gamma1, "gamma1"},
                      {gamma2, "gamma2"}, {gamma3, "gamma3"}, {A1, "A1"}, {A3, "A3"}, {A4, "A4"}})
    nonneg(v, n);
  if (gamma1 == 0 && gamma2 > 0)
    throw ValidationError("quartic synthesis: gamma1 = 0 leaves A2 = A1 sqrt(gamma2/gamma1) undefined");
  QuarticCoefficients q{};
  q.chi1 = A4 * std::sqrt(2.0 * gamma);
  q.chi2 = 4.0 * A1 * std::sqrt(G1 * gamma1) - 2.0 * A3 * std::sqrt(G3 * gamma3);
  q.chi3 = 2.0 * std::sqrt(G3 * gamma * gamma3);
  q.chi4 = 2.0 * std::sqrt(G1 * gamma * gamma1);
  if (gamma2 > 0) {
    q.G2 = G1 * gamma1 / gamma2;
    q.A2 = A1 * std::sqrt(gamma2 / gamma1);
  } else {
    // loop 2 switched off
    q.G2 = 0.0;
    q.A2 = 0.0;
  }
  return q;
}

double gamma_a_from_circuit(double eta_T, double eta_in, double Phi0) {
  if (!(Phi0 > 0)) throw ValidationError("Phi0 must be positive");
  const double pi6 = std::pow(std::numbers::pi, 6);
  return pi6 * std::pow(eta_T, 4) * eta_in * eta_in / std::pow(Phi0, 6);
}

}  // namespace qcfb
