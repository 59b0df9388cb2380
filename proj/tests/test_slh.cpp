#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcfb/errors.hpp"
#include "qcfb/feedback_loop.hpp"
#include "qcfb/slh.hpp"

using namespace qcfb;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

SLHTriple random_triple(const RegistryPtr& reg, std::mt19937& rng) {
  std::uniform_real_distribution<double> th(-pi, pi);
  auto h = oracle::random_expr(reg, rng, 2, 3);
  return {th(rng), oracle::random_expr(reg, rng, 2, 3), hermitian_part(h)};
}

void expect_triples_near(const SLHTriple& x, const SLHTriple& y, double tol) {
  EXPECT_NEAR(std::remainder(x.theta - y.theta, 2 * pi), 0.0, tol);
  EXPECT_LE(max_abs_difference(x.L, y.L), tol);
  EXPECT_LE(max_abs_difference(x.H, y.H), tol);
}

}  // namespace

TEST(SeriesProduct, ClosedSystemsAdd) {
  auto reg = ModeRegistry::create({{"a", 4}});
  auto n = OperatorExpr::number(reg, "a");
  auto x = OperatorExpr::position(reg, "a");
  auto g = series_product(closed_system(n), closed_system(x * x));
  EXPECT_TRUE(g.L.is_zero());
  EXPECT_EQ(g.H, n + x * x);
}

TEST(SeriesProduct, IdentitySecondStageAndDoubledCoupling) {
  auto reg = ModeRegistry::create({{"a", 4}});
  const double gamma = 0.7;
  auto L = std::sqrt(gamma) * OperatorExpr::annihilation(reg, "a");
  SLHTriple g{0.0, L, OperatorExpr(reg)};
  auto r = series_product(g, closed_system(OperatorExpr(reg)));
  EXPECT_EQ(r.L, L);
  EXPECT_TRUE(r.H.is_zero());
  auto d = series_product(g, g);
  EXPECT_LE(max_abs_difference(d.L, 2.0 * L), 1e-15);
  EXPECT_TRUE(d.H.is_zero());
}

TEST(SelfFeedback, PhaseFreeAndQuarterTurn) {
  auto reg = ModeRegistry::create({{"a", 4}});
  auto n = OperatorExpr::number(reg, "a");
  auto L = OperatorExpr::annihilation(reg, "a");
  auto r0 = self_feedback({0.0, L, n});
  EXPECT_EQ(r0.L, 2.0 * L);
  EXPECT_EQ(r0.H, n);

  const double gamma = 2.5;
  auto H = OperatorExpr::position(reg, "a");
  auto r = self_feedback({pi / 2, std::sqrt(gamma) * L, H});
  EXPECT_NEAR(r.theta, pi, 1e-15);
  EXPECT_LE(max_abs_difference(r.L, cd(1, 1) * std::sqrt(gamma) * L), 1e-15);
  EXPECT_LE(max_abs_difference(r.H, H + gamma * n), 1e-14);
}

TEST(SeriesProduct, AssociativeAndSelfFeedbackConsistent) {
  auto reg = ModeRegistry::create({{"a", 4}, {"b", 4}});
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    auto g1 = random_triple(reg, rng);
    auto g2 = random_triple(reg, rng);
    auto g3 = random_triple(reg, rng);
    expect_triples_near(series_product(series_product(g1, g2), g3),
                        series_product(g1, series_product(g2, g3)), 1e-12);
    SLHTriple bare{g1.theta, g1.L, OperatorExpr(reg)};
    expect_triples_near(self_feedback(g1), series_product(g1, bare), 1e-12);
    EXPECT_TRUE(series_product(g1, g2).H.is_hermitian(1e-12));
  }
}

TEST(AmplifierParams, Identities) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double kappa = 0.01 + 100 * u(rng);
    const double xi = 0.999 * kappa * u(rng);
    auto amp = AmplifierParams::from_kappa_xi(kappa, xi);
    EXPECT_NEAR(amp.G0() / amp.G0_closed_form(), 1.0, 1e-12);
    const double nn1 = amp.N() * (amp.N() + 1);
    if (nn1 > 0) {
      EXPECT_NEAR(amp.M() * amp.M() / nn1, 1.0, 1e-10);
    }
    EXPECT_GE(amp.G0(), 1.0);
  }
}

TEST(AmplifierParams, Rejections) {
  EXPECT_THROW(AmplifierParams::from_kappa_xi(1.0, 1.0), ValidationError);
  EXPECT_THROW(AmplifierParams::from_kappa_xi(1.0, 1.0 - 1e-7), ValidationError);
  EXPECT_THROW(AmplifierParams::from_kappa_xi(0.0, 0.0), ValidationError);
  EXPECT_THROW(AmplifierParams::from_kappa_xi(1.0, -0.1), ValidationError);
  EXPECT_THROW(AmplifierParams::from_gain(0.5, 1.0), ValidationError);
  auto a = AmplifierParams::from_gain(100.0, 3.0);
  EXPECT_NEAR(a.G0(), 100.0, 1e-9);
  EXPECT_NEAR(a.kappa(), 3.0, 0);
  // r0 = 0.5 sits at xi/kappa = tanh(0.25)
  auto b = AmplifierParams::from_kappa_xi(1.0, std::tanh(0.25));
  EXPECT_NEAR(b.r0(), 0.5, 1e-14);
}

TEST(AmplifierSLH, Forms) {
  auto reg = ModeRegistry::create({{"a", 4}, {"c", 4}});
  auto c = OperatorExpr::annihilation(reg, "c");
  auto cdg = OperatorExpr::creation(reg, "c");
  auto amp = AmplifierParams::from_kappa_xi(4.0, 1.2);
  auto g = amplifier_slh(amp, 0.0, 0.3, reg);
  EXPECT_EQ(g.theta, 0.0);
  EXPECT_LE(max_abs_difference(g.L, 2.0 * c), 1e-15);
  EXPECT_LE(max_abs_difference(g.H, cd(0, 0.3) * (cdg * cdg - c * c)), 1e-15);

  auto plain = amplifier_slh(AmplifierParams::from_kappa_xi(4.0, 0.0), 0.0, 0.0, reg);
  EXPECT_TRUE(plain.H.is_zero());

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    auto gi = amplifier_slh(AmplifierParams::from_kappa_xi(1 + u(rng), u(rng)), 3 * u(rng),
                            2 * pi * u(rng), reg);
    EXPECT_TRUE(gi.H.is_hermitian(1e-14));
  }
  auto noc = ModeRegistry::create({{"a", 4}});
  EXPECT_THROW(amplifier_slh(amp, 0.0, 0.0, noc), ValidationError);
}

namespace {

FeedbackLoopSpec random_spec(const RegistryPtr& reg, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // L, L_f on the plant mode only (first registered mode)
  auto plant_only = ModeRegistry::create({{reg->mode(0).label, 4}});
  auto lift = [&](const OperatorExpr& e) {
    OperatorExpr out(reg);
    for (const auto& [m, c] : e.terms()) {
      Monomial mm(reg->size());
      mm[0] = m[0];
      out += OperatorExpr::term(reg, mm, c);
    }
    return out;
  };
  FeedbackLoopSpec s{hermitian_part(lift(oracle::random_expr(plant_only, rng, 2, 3))),
                     2 * pi * u(rng),
                     lift(oracle::random_expr(plant_only, rng, 2, 2)),
                     lift(oracle::random_expr(plant_only, rng, 2, 2)),
                     AmplifierParams::from_kappa_xi(1 + 5 * u(rng), 0.9 * u(rng)),
                     2 * u(rng),
                     2 * pi * u(rng) - pi};
  return s;
}

// Composite triple written out term by term, independent of series_product.
SLHTriple literal_composite(const FeedbackLoopSpec& s) {
  const auto& reg = s.registry();
  auto c = OperatorExpr::annihilation(reg, s.amp_mode);
  auto cdg = OperatorExpr::creation(reg, s.amp_mode);
  const cd S = std::polar(1.0, s.theta);
  const double sk = std::sqrt(s.amp.kappa());
  auto Hc = cd(0, s.amp.xi() / 4) * (cdg * cdg - c * c) +
            sk * s.A * (std::polar(1.0, s.phi) * c + std::polar(1.0, -s.phi) * cdg);
  auto Ld = s.L.adjoint();
  auto L_out = s.L_f + S * (sk * c + s.L);
  auto H = s.plant_H + Hc + cd(0, 0.5) * sk * (Ld * c - cdg * s.L) +
           cd(0, 0.5) * ((Ld + sk * cdg) * std::conj(S) * s.L_f - s.L_f.adjoint() * S * (s.L + sk * c));
  return {2 * s.theta, L_out, H};
}

}  // namespace

TEST(ComposeLoop, MatchesLiteralComposite) {
  auto reg = ModeRegistry::create({{"a", 4}, {"c", 4}});
  std::mt19937 rng(99);
  for (int i = 0; i < 20; ++i) {
    auto s = random_spec(reg, rng);
    expect_triples_near(compose_loop_full(s), literal_composite(s), 1e-12);
  }
}

TEST(ComposeLoop, DecoupledPlant) {
  auto reg = ModeRegistry::create({{"a", 4}, {"c", 4}});
  auto H = OperatorExpr::number(reg, "a");
  FeedbackLoopSpec s{H, 0.4, OperatorExpr(reg), OperatorExpr(reg), AmplifierParams::from_kappa_xi(9.0, 0.0)};
  auto g = compose_loop_full(s);
  EXPECT_NEAR(g.theta, 0.8, 1e-15);
  EXPECT_LE(max_abs_difference(g.L, std::polar(1.0, 0.4) * 3.0 * OperatorExpr::annihilation(reg, "c")), 1e-15);
  EXPECT_EQ(g.H, H);
}

TEST(ComposeLoop, KerrCircuitCrossTerm) {
  auto reg = ModeRegistry::create({{"a", 4}, {"c", 4}});
  const double ga = 0.3, kappa = 5.0;
  auto L = std::sqrt(ga) * OperatorExpr::number(reg, "a");
  FeedbackLoopSpec s{OperatorExpr(reg), pi / 2, L, L, AmplifierParams::from_kappa_xi(kappa, 1.0)};
  auto g = compose_loop_full(s);
  const cd S = s.S();
  auto c = OperatorExpr::annihilation(reg, "c");
  auto cross = cd(0, 0.5) * std::sqrt(kappa) * (c.adjoint() * std::conj(S) * L - L.adjoint() * S * c);
  // every monomial of the cross term must appear in H with that coefficient
  for (const auto& [m, coef] : cross.terms()) {
    bool on_c_only_linear = m[1].creation + m[1].annihilation == 1;
    ASSERT_TRUE(on_c_only_linear);
  }
  auto other = cd(0, 0.5) * std::sqrt(kappa) * (L.adjoint() * c - c.adjoint() * L);
  EXPECT_LE(max_abs_difference(g.H.homogeneous_part(3), (cross + other).homogeneous_part(3)), 1e-14);
}

TEST(ComposeLoop, RejectsLoopOperatorsOnAmplifier) {
  auto reg = ModeRegistry::create({{"a", 4}, {"c", 4}});
  FeedbackLoopSpec s{OperatorExpr(reg), 0.0, OperatorExpr::annihilation(reg, "c"), OperatorExpr(reg),
                     AmplifierParams::from_kappa_xi(1.0, 0.0)};
  EXPECT_THROW(compose_loop_full(s), ValidationError);
  s.L = OperatorExpr(reg);
  s.plant_H = OperatorExpr::annihilation(reg, "a");
  EXPECT_THROW(compose_loop_full(s), ValidationError);
}
