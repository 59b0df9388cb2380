#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "qcfb/errors.hpp"
#include "qcfb/observables.hpp"
#include "qcfb/validation_oracle.hpp"

using namespace qcfb;
using cd = std::complex<double>;
using oracle::Mat;
using std::numbers::pi;

namespace {

RegistryPtr two_mode() { return ModeRegistry::create({{"a", 6}, {"c", 10}}); }

FeedbackLoopSpec linear_loop(const RegistryPtr& reg, double gamma, double omega, double kappa, double r0) {
  auto a = OperatorExpr::annihilation(reg, "a");
  return {omega * OperatorExpr::number(reg, "a"), pi / 2, std::sqrt(gamma) * a, std::sqrt(gamma) * a,
          AmplifierParams::from_kappa_xi(kappa, kappa * std::tanh(r0 / 2))};
}

OracleConfig small_config(Complex alpha) {
  OracleConfig cfg;
  cfg.plant_truncation = 6;
  cfg.amp_truncation = 10;
  cfg.plant_initial = projector(coherent_ket(6, alpha));
  cfg.leak_threshold = 1e-2;
  return cfg;
}

Complex mean_a(const Matrix& rho) {
  Complex s = 0;
  for (Eigen::Index n = 1; n < rho.rows(); ++n) s += std::sqrt(double(n)) * rho(n, n - 1);
  return s;
}

// Heisenberg drift of <X> for a vacuum-input triple, restricted to linear terms:
// d<X>/dt = <i[H,X] + (L^dag [X,L] + [L^dag,X] L)/2>.
Eigen::Matrix4cd linear_drift(const SLHTriple& g, const RegistryPtr& reg) {
  std::vector<OperatorExpr> basis{OperatorExpr::annihilation(reg, "a"), OperatorExpr::creation(reg, "a"),
                                  OperatorExpr::annihilation(reg, "c"), OperatorExpr::creation(reg, "c")};
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  const auto Ld = g.L.adjoint();
  for (int r = 0; r < 4; ++r) {
    const auto& X = basis[r];
    auto G = cd(0, 1) * commutator(g.H, X) + 0.5 * (Ld * commutator(X, g.L) + commutator(Ld, X) * g.L);
    for (int k = 0; k < 4; ++k) {
      const auto& mono = basis[k].terms().begin()->first;
      M(r, k) = G.coefficient(mono);
    }
  }
  return M;
}

}  // namespace

TEST(Oracle, DecoupledPlantFollowsItsHamiltonian) {
  auto reg = two_mode();
  const double omega = 1.3;
  FeedbackLoopSpec s{omega * OperatorExpr::number(reg, "a"), 0.2, OperatorExpr(reg), OperatorExpr(reg),
                     AmplifierParams::from_kappa_xi(5.0, 0.0)};
  auto cfg = small_config(cd(0.8, 0));
  auto out = full_loop_simulate(s, cfg, {0.0, 0.7, 1.4});
  for (double t : {0.7, 1.4}) {
    const Matrix expect = projector(coherent_ket(6, std::polar(0.8, -omega * t)));
    const auto& got = out[t == 0.7 ? 1 : 2].matrix();
    EXPECT_LT(trace_distance(got, expect), 1e-7);
  }
}

TEST(Oracle, EliminatedModelIsKappaFreeAtFixedR0) {
  auto reg = two_mode();
  auto m1 = eliminate_amplifier(linear_loop(reg, 1.0, 0.5, 10.0, 0.5));
  auto m2 = eliminate_amplifier(linear_loop(reg, 1.0, 0.5, 1000.0, 0.5));
  EXPECT_LE(max_abs_difference(m1.H_eff, m2.H_eff), 1e-12);
  ASSERT_EQ(m1.channels.size(), m2.channels.size());
  for (std::size_t k = 0; k < m1.channels.size(); ++k) {
    EXPECT_LE(max_abs_difference(m1.channels[k].op, m2.channels[k].op), 1e-12);
    if (m1.channels[k].squeezed()) {
      auto b1 = std::get<SqueezedBath>(m1.channels[k].bath), b2 = std::get<SqueezedBath>(m2.channels[k].bath);
      EXPECT_NEAR(b1.N, b2.N, 1e-12);
      EXPECT_NEAR(std::abs(b1.M - b2.M), 0.0, 1e-12);
    }
  }
}

TEST(Oracle, ReducedStatesAreValidAndRunsDeterministic) {
  auto reg = two_mode();
  auto s = linear_loop(reg, 1.0, 1.0, 10.0, 0.5);
  auto cfg = small_config(cd(0.5, 0));
  auto t1 = elimination_error(s, 1.0, {10.0}, 0.5, cfg);
  EXPECT_EQ(t1.verdict, "insufficient");
  ASSERT_EQ(t1.rows.size(), 1u);
  auto t2 = elimination_error(s, 1.0, {10.0}, 0.5, cfg);
  EXPECT_EQ(t1.rows, t2.rows);
  auto out = full_loop_simulate(s, cfg, {0.0, 0.5});
  EXPECT_NEAR(std::abs(out.back().matrix().trace() - cd(1, 0)), 0.0, 1e-9);
  EXPECT_LT(out.back().hermiticity_error(), 1e-10);
  EXPECT_THROW(elimination_error(s, 1.0, {10.0, 5.0}, 0.5, cfg), ValidationError);
}

TEST(Oracle, LeakIsReported) {
  auto reg = two_mode();
  auto s = linear_loop(reg, 1.0, 1.0, 10.0, 0.5);
  auto cfg = small_config(cd(1.5, 0));
  cfg.leak_threshold = 1e-6;
  EXPECT_THROW(full_loop_simulate(s, cfg, {0.0, 0.1}), NumericalError);
}

// For a linear loop the first moments obey closed linear equations. Eliminating
// the fast amplifier block of the composite drift matrix gives the exact slow
// dynamics of <a>; the full simulation must approach it as kappa grows.
TEST(Oracle, FullModelApproachesLinearAdiabaticLimit) {
  auto reg = two_mode();
  const double gamma = 1.0, omega = 1.0, r0 = 0.5, t = 1.0;
  const cd alpha(0.5, 0);
  auto cfg = small_config(alpha);
  double prev = 1e9;
  cd limit_prev;
  for (double ratio : {10.0, 40.0}) {
    auto s = linear_loop(reg, gamma, omega, ratio * gamma, r0);
    Eigen::Matrix4cd M = linear_drift(compose_loop_full(s), reg);
    Eigen::Matrix2cd Mpp = M.topLeftCorner(2, 2), Mpq = M.topRightCorner(2, 2), Mqp = M.bottomLeftCorner(2, 2),
                     Mqq = M.bottomRightCorner(2, 2);
    Eigen::Matrix2cd Meff = Mpp - Mpq * Mqq.inverse() * Mqp;
    Eigen::Vector2cd v0(alpha, std::conj(alpha));
    Eigen::Vector2cd vt = (Meff * t).exp() * v0;
    // the slow generator is kappa-independent at fixed r0
    if (ratio > 10.0) {
      EXPECT_NEAR(std::abs(vt(0) - limit_prev), 0.0, 1e-9);
    }
    limit_prev = vt(0);
    const cd full = mean_a(full_loop_simulate(s, cfg, {0.0, t}).back().matrix());
    const double gap = std::abs(full - vt(0));
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 0.02);
}
