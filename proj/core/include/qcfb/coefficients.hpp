#pragma once

namespace qcfb {

// Unit helpers. Internally every rate is an angular frequency in rad/us;
// "MHz over 2 pi" means the quoted number is nu = omega / 2pi in MHz.
double mhz_over_2pi_to_rad_per_us(double nu_mhz);
double rad_per_us_to_mhz_over_2pi(double omega);

struct KerrCoefficients {
  double delta;  // drive-induced frequency shift
  double chi;    // Kerr strength
};

/// delta = 2 A_T sqrt(G0 gamma_a), chi = 2 sqrt(G0) gamma_a.
KerrCoefficients kerr_coefficients(double G0, double gamma_a, double A_T);

/// chi_ab = 2 sqrt(G0 gamma_a gamma_b).
double cross_kerr_coefficient(double G0, double gamma_a, double gamma_b);

struct QuarticCoefficients {
  double chi1, chi2, chi3, chi4;
  double G2, A2;  // second-loop settings forced by the other inputs
};

/// Three-loop quartic synthesis. gamma1 == 0 with gamma2 > 0 is rejected.
QuarticCoefficients quartic_coefficients(double G1, double G3, double gamma, double gamma1, double gamma2,
                                         double gamma3, double A1, double A3, double A4);

/// pi^6 eta_T^4 eta_in^2 / Phi0^6.
double gamma_a_from_circuit(double eta_T, double eta_in, double Phi0);

}  // namespace qcfb
