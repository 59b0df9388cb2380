#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcfb/coefficients.hpp"
#include "qcfb/errors.hpp"
#include "qcfb/feedback_loop.hpp"

using namespace qcfb;
using cd = std::complex<double>;
using oracle::Mat;
using std::numbers::pi;

namespace {

RegistryPtr plant_reg() { return ModeRegistry::create({{"a", 8}}); }

FeedbackLoopSpec random_spec(const RegistryPtr& reg, std::mt19937& rng, double r0, bool drive) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double kappa = 1.0 + u(rng);
  FeedbackLoopSpec s{hermitian_part(oracle::random_expr(reg, rng, 2, 3)), 2 * pi * u(rng),
                     oracle::random_expr(reg, rng, 2, 2), oracle::random_expr(reg, rng, 2, 2),
                     AmplifierParams::from_kappa_xi(kappa, kappa * std::tanh(r0 / 2))};
  if (drive) {
    s.A = u(rng);
    s.phi = 2 * pi * u(rng) - pi;
  }
  return s;
}

// Relative max-norm gap between the feedback-induced parts of two Hamiltonians.
double relative_gap(const OperatorExpr& x, const OperatorExpr& y, const OperatorExpr& H) {
  const double scale = std::max((y - H).max_norm(), 1e-300);
  return max_abs_difference(x, y) / scale;
}

}  // namespace

TEST(Eliminate, UnsqueezedLimit) {
  auto reg = plant_reg();
  auto a = OperatorExpr::annihilation(reg, "a");
  auto n = OperatorExpr::number(reg, "a");
  FeedbackLoopSpec s{n, 0.3, 0.8 * a, 0.5 * a, AmplifierParams::from_kappa_xi(2.0, 0.0)};
  auto m = eliminate_amplifier(s);
  ASSERT_EQ(m.channels.size(), 2u);
  const cd S = s.S();
  auto J = s.L - std::conj(S) * s.L_f;
  EXPECT_FALSE(m.channels[0].squeezed());
  ASSERT_TRUE(m.channels[1].squeezed());
  auto sq = std::get<SqueezedBath>(m.channels[1].bath);
  EXPECT_EQ(sq.N, 0.0);
  EXPECT_EQ(std::abs(sq.M), 0.0);
  EXPECT_LE(max_abs_difference(m.channels[0].op, J), 1e-15);
  auto expect = n + cd(0, 0.5) * (s.L_f.adjoint() * S * s.L - s.L.adjoint() * std::conj(S) * s.L_f);
  EXPECT_LE(max_abs_difference(m.H_eff, expect), 1e-14);
}

TEST(Eliminate, DissipationFreeWhenJVanishes) {
  auto reg = plant_reg();
  auto a = OperatorExpr::annihilation(reg, "a");
  FeedbackLoopSpec s{OperatorExpr(reg), 0.7, OperatorExpr(reg), a, AmplifierParams::from_kappa_xi(2.0, 1.0)};
  s.L = std::conj(s.S()) * a;
  EXPECT_TRUE(eliminate_amplifier(s).channels.empty());
}

TEST(Eliminate, ChannelsDependOnlyOnJ) {
  auto reg = plant_reg();
  std::mt19937 rng(17);
  for (int i = 0; i < 10; ++i) {
    auto s1 = random_spec(reg, rng, 0.7, true);
    auto s2 = s1;
    auto shift = oracle::random_expr(reg, rng, 2, 2);
    s2.L = s1.L + shift;
    s2.L_f = s1.L_f + s1.S() * shift;
    auto m1 = eliminate_amplifier(s1);
    auto m2 = eliminate_amplifier(s2);
    ASSERT_EQ(m1.channels.size(), m2.channels.size());
    for (std::size_t k = 0; k < m1.channels.size(); ++k) {
      EXPECT_LE(max_abs_difference(m1.channels[k].op, m2.channels[k].op), 1e-13);
      EXPECT_EQ(m1.channels[k].bath, m2.channels[k].bath);
      EXPECT_EQ(m1.channels[k].rate_prefactor, m2.channels[k].rate_prefactor);
    }
  }
}

TEST(Eliminate, HermitianAndLinearStaysLinear) {
  auto reg = plant_reg();
  std::mt19937 rng(23);
  for (int i = 0; i < 30; ++i) {
    auto s = random_spec(reg, rng, 1.3, true);
    EXPECT_TRUE(eliminate_amplifier(s).H_eff.is_hermitian(1e-10));
    EXPECT_TRUE(high_gain_limit(s).H_eff.is_hermitian(1e-10));
    // linear couplings and quadratic plant
    s.L = s.L.homogeneous_part(1);
    s.L_f = s.L_f.homogeneous_part(1);
    EXPECT_LE(eliminate_amplifier(s).H_eff.total_degree(), 2);
    EXPECT_LE(high_gain_limit(s).H_eff.total_degree(), 2);
  }
  FeedbackLoopSpec bad{OperatorExpr::annihilation(reg, "a"), 0.0, OperatorExpr(reg), OperatorExpr(reg),
                       AmplifierParams::from_kappa_xi(1.0, 0.0)};
  EXPECT_THROW(eliminate_amplifier(bad), ValidationError);
}

TEST(Eliminate, ApproachesHighGainLimitWithoutDrive) {
  auto reg = plant_reg();
  std::mt19937 rng(31);
  for (int i = 0; i < 20; ++i) {
    auto base = random_spec(reg, rng, 1.0, false);
    double prev = std::numeric_limits<double>::infinity();
    for (double G0 : {1e2, 1e4, 1e6}) {
      auto s = base;
      s.amp = AmplifierParams::from_gain(G0, 1.0);
      const double gap = relative_gap(eliminate_amplifier(s).H_eff, high_gain_limit(s).H_eff, s.plant_H);
      EXPECT_LT(gap, prev) << "G0=" << G0;
      prev = gap;
    }
    EXPECT_LT(prev, 1e-5);
  }
}

// The exact drive term carries e^{i phi} through -(i/2)(...) + h.c., which tends
// to sqrt(G0) A sin(phi) (...), while the high-gain form is written with cos(phi).
// At phi = 0 the two disagree at O(1) however large the gain.
TEST(Eliminate, DrivePhaseConventionsDiffer) {
  auto reg = plant_reg();
  auto n = OperatorExpr::number(reg, "a");
  FeedbackLoopSpec s{OperatorExpr(reg), pi / 2, n, n, AmplifierParams::from_gain(1e6, 1.0), 1.0, 0.0};
  auto exact = eliminate_amplifier(s).H_eff;
  auto limit = high_gain_limit(s).H_eff;
  const auto pe = number_polynomial(exact, 0);
  const auto pl = number_polynomial(limit, 0);
  // exact: only the O(1) mismatch sinh - cosh - 1 survives at phi = 0; limit: 2 sqrt(G0) A
  const double r0 = s.amp.r0();
  EXPECT_NEAR(pe.at(1).real(), std::sinh(r0) - std::cosh(r0) - 1.0, 1e-9);
  EXPECT_NEAR(pl.at(1).real(), 2.0 * 1e3, 1e-6);
  s.phi = pi / 2;
  const auto pe2 = number_polynomial(eliminate_amplifier(s).H_eff, 0);
  EXPECT_NEAR(pe2.at(1).real() / (2.0 * 1e3), 1.0, 1e-3);
}

namespace {

// Effective Hamiltonian of the large-gain form evaluated with plain matrices.
Mat high_gain_matrix(const Mat& H, const Mat& L, const Mat& Lf, cd S, double G0, double A, double phi) {
  const double g = std::sqrt(G0);
  Mat Ld = L.adjoint(), Lfd = Lf.adjoint();
  Mat X = cd(0, -0.25) * (Ld - Lfd * S) * (Ld + Lfd * S);
  return H + g * (cd(0, 0.5) * Lfd * S * L - cd(0, 0.5) * Ld * std::conj(S) * Lf) + g * (X + X.adjoint()) +
         g * A * std::cos(phi) * (L + Ld + std::conj(S) * Lf + Lfd * S);
}

}  // namespace

TEST(HighGain, KerrSpecAgainstMatrixOracle) {
  const int dim = 10;
  auto reg = ModeRegistry::create({{"a", dim}});
  const double G0 = 100, gamma_a = 2 * pi, A_T = std::sqrt(2 * pi * 576), omega = 2 * pi * 500;
  auto n = OperatorExpr::number(reg, "a");
  auto L = std::sqrt(gamma_a) * n;
  FeedbackLoopSpec s{omega * n, pi / 2, L, L, AmplifierParams::from_gain(G0, 1e3), A_T, pi};
  auto m = high_gain_limit(s);
  auto poly = number_polynomial(m.H_eff, 0);
  ASSERT_EQ(poly.size(), 3u);

  Mat N = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) N(k, k) = k;
  Mat Hm = high_gain_matrix(omega * N, std::sqrt(gamma_a) * N, std::sqrt(gamma_a) * N, cd(0, 1), G0, A_T, pi);
  const cd c2 = (Hm(2, 2) - 2.0 * Hm(1, 1) + Hm(0, 0)) / 2.0;
  const cd c1 = Hm(1, 1) - Hm(0, 0) - c2;
  EXPECT_NEAR(std::abs(poly[2] - c2) / std::abs(c2), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(poly[1] - c1) / std::abs(c1), 0.0, 1e-12);
  // with S = i and Hermitian L = L_f the squeezing bracket cancels and the
  // cross term leaves -sqrt(G0) gamma_a N^2
  EXPECT_NEAR(poly[2].real(), -std::sqrt(G0) * gamma_a, 1e-9);
  // linear term: omega - delta with the closed-form delta
  const auto k = kerr_coefficients(G0, gamma_a, A_T);
  EXPECT_NEAR(poly[1].real() / (omega - k.delta), 1.0, 1e-12);
  // dephasing channel i sqrt(gamma_a) N at rate G0
  ASSERT_EQ(m.channels.size(), 1u);
  EXPECT_NEAR(m.channels[0].rate_prefactor / G0, 1.0, 1e-12);
  EXPECT_LE(max_abs_difference(m.channels[0].op, cd(0, 1) * L), 1e-14);
  ASSERT_TRUE(m.H_nl.has_value());
  EXPECT_LE(max_abs_difference(*m.H_nl, -std::sqrt(G0) * gamma_a * n * n), 1e-9);
}

TEST(HighGain, CrossKerrAgainstMatrixOracle) {
  const int d = 5;
  auto reg = ModeRegistry::create({{"a", d}, {"b", d}});
  const double G0 = 100, ga = 2 * pi, gb = 2 * pi * 1.7;
  auto La = std::sqrt(ga) * OperatorExpr::number(reg, "a");
  auto Lb = std::sqrt(gb) * OperatorExpr::number(reg, "b");
  FeedbackLoopSpec s{OperatorExpr(reg), pi / 2, La, Lb, AmplifierParams::from_gain(G0, 1e3)};
  auto H = high_gain_limit(s).H_eff;
  Monomial ab(2);
  ab[0] = {1, 1};
  ab[1] = {1, 1};
  const cd coef = H.coefficient(ab);

  Mat Na = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) Na(k, k) = k;
  Mat I = Mat::Identity(d, d);
  Mat A = std::sqrt(ga) * oracle::kron(Na, I), B = std::sqrt(gb) * oracle::kron(I, Na);
  Mat Hm = high_gain_matrix(Mat::Zero(d * d, d * d), A, B, cd(0, 1), G0, 0.0, 0.0);
  // |1,1> minus the single-excitation and vacuum diagonal pieces isolates the na nb term
  auto idx = [&](int i, int j) { return i * d + j; };
  const cd mixed = Hm(idx(1, 1), idx(1, 1)) - Hm(idx(1, 0), idx(1, 0)) - Hm(idx(0, 1), idx(0, 1)) +
                   Hm(idx(0, 0), idx(0, 0));
  EXPECT_NEAR(std::abs(coef - mixed) / std::abs(mixed), 0.0, 1e-12);
  EXPECT_NEAR(coef.real(), -std::sqrt(G0 * ga * gb), 1e-9);
}

TEST(CombineLoops, PlantCountedOnce) {
  auto reg = plant_reg();
  auto n = OperatorExpr::number(reg, "a");
  auto x = OperatorExpr::position(reg, "a");
  FeedbackLoopSpec s1{n, pi / 2, x * x, n, AmplifierParams::from_gain(10, 1.0)};
  FeedbackLoopSpec s2 = s1;
  s2.L_f = x;
  auto m = combine_loops({s1, s2}, true);
  auto expect = n + (high_gain_limit(s1).H_eff - n) + (high_gain_limit(s2).H_eff - n);
  EXPECT_LE(max_abs_difference(m.H_eff, expect), 1e-12);
  EXPECT_EQ(m.channels.size(), 2u);
  auto c = compensate_linear(m);
  EXPECT_TRUE(c.H_eff.homogeneous_part(1).is_zero());
}
