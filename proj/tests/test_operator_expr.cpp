#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qcfb/errors.hpp"
#include "qcfb/mode_registry.hpp"
#include "qcfb/operator_expr.hpp"

using namespace qcfb;
using cd = std::complex<double>;

namespace {

RegistryPtr one_mode(int trunc = 12) { return ModeRegistry::create({{"a", trunc}}); }

Monomial mono(std::initializer_list<ModePower> p) { return Monomial(std::vector<ModePower>(p)); }


}  // namespace

TEST(ModeRegistry, RejectsBadModes) {
  EXPECT_THROW(ModeRegistry::create({{"a", 3}, {"a", 4}}), ValidationError);
  EXPECT_THROW(ModeRegistry::create({{"a", 1}}), ValidationError);
  EXPECT_THROW(ModeRegistry::create({{"", 3}}), ValidationError);
  auto r = ModeRegistry::create({{"a", 3}, {"b", 4}});
  EXPECT_EQ(r->hilbert_dim(), 12u);
  EXPECT_EQ(r->index("b"), 1u);
  EXPECT_FALSE(r->find("c"));
  EXPECT_THROW(r->index("c"), ValidationError);
  auto r2 = r->with_truncation("b", 7);
  EXPECT_TRUE(r->same_modes(*r2));
  EXPECT_FALSE(*r == *r2);
}

TEST(OperatorExpr, AddIdentityAndCancellation) {
  auto reg = one_mode();
  auto n = OperatorExpr::number(reg, "a");
  EXPECT_EQ(n + OperatorExpr(reg), n);
  auto s = OperatorExpr::annihilation(reg, "a") + OperatorExpr::creation(reg, "a");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.coefficient(mono({{1, 0}})), cd(1, 0));
  EXPECT_EQ(s.coefficient(mono({{0, 1}})), cd(1, 0));
  EXPECT_TRUE((n * cd(2, 0) + n * cd(-2, 0)).is_zero());
}

TEST(OperatorExpr, SingleCommutatorProduct) {
  auto reg = one_mode();
  auto a = OperatorExpr::annihilation(reg, "a");
  auto ad = OperatorExpr::creation(reg, "a");
  EXPECT_EQ(a * ad, OperatorExpr::number(reg, "a") + OperatorExpr::identity(reg));
}

TEST(OperatorExpr, ProductsAgainstMatrixOracle) {
  auto reg = one_mode();
  auto a = OperatorExpr::annihilation(reg, "a");
  auto ad = OperatorExpr::creation(reg, "a");
  auto n = OperatorExpr::number(reg, "a");

  auto p1 = (a * a) * (ad * ad);
  EXPECT_EQ(p1.coefficient(mono({{2, 2}})), cd(1, 0));
  EXPECT_EQ(p1.coefficient(mono({{1, 1}})), cd(4, 0));
  EXPECT_EQ(p1.coefficient(mono({{0, 0}})), cd(2, 0));
  EXPECT_EQ(p1.size(), 3u);

  auto p2 = n * n;
  EXPECT_EQ(p2.coefficient(mono({{2, 2}})), cd(1, 0));
  EXPECT_EQ(p2.coefficient(mono({{1, 1}})), cd(1, 0));
  EXPECT_EQ(p2.size(), 2u);

  // dim-12 brute-force product; compare on levels unaffected by truncation
  const int dim = 12;
  auto A = oracle::ladder(dim);
  oracle::Mat lhs = A * A * A.adjoint() * A.adjoint();
  oracle::Mat rhs = oracle::evaluate(p1, {dim});
  EXPECT_LT((lhs - rhs).topLeftCorner(dim - 2, dim - 2).cwiseAbs().maxCoeff(), 1e-10);
  oracle::Mat nn = A.adjoint() * A * A.adjoint() * A;
  EXPECT_LT((nn - oracle::evaluate(p2, {dim})).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(OperatorExpr, Adjoint) {
  auto reg = one_mode();
  auto a = OperatorExpr::annihilation(reg, "a");
  auto ad = OperatorExpr::creation(reg, "a");
  EXPECT_EQ(a.adjoint(), ad);
  EXPECT_EQ((cd(0, 1) * ad * ad).adjoint(), cd(0, -1) * a * a);
  auto n = OperatorExpr::number(reg, "a");
  EXPECT_EQ(n.adjoint(), n);
}

TEST(OperatorExpr, Commutators) {
  auto reg = one_mode();
  auto a = OperatorExpr::annihilation(reg, "a");
  auto ad = OperatorExpr::creation(reg, "a");
  auto n = OperatorExpr::number(reg, "a");
  EXPECT_EQ(commutator(a, ad), OperatorExpr::identity(reg));
  EXPECT_EQ(commutator(n, a), -a);
  auto x = OperatorExpr::position(reg, "a");
  auto p = OperatorExpr::momentum(reg, "a");
  auto c = commutator(x, p);
  EXPECT_TRUE(c.is_scalar());
  EXPECT_NEAR(std::abs(c.scalar_part() - cd(0, 1)), 0.0, 1e-15);
  // matrix oracle: [x,p] = i away from the truncation edge
  const int dim = 12;
  auto A = oracle::ladder(dim);
  oracle::Mat X = (A + A.adjoint()) / std::sqrt(2.0);
  oracle::Mat P = (cd(0, -1) * A + cd(0, 1) * A.adjoint()) / std::sqrt(2.0);
  oracle::Mat C = X * P - P * X;
  oracle::Mat expect = cd(0, 1) * oracle::Mat::Identity(dim, dim);
  EXPECT_LT((C - expect).topLeftCorner(dim - 1, dim - 1).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OperatorExpr, Hermiticity) {
  auto reg = one_mode();
  auto a = OperatorExpr::annihilation(reg, "a");
  auto ad = OperatorExpr::creation(reg, "a");
  EXPECT_TRUE(is_hermitian(OperatorExpr::number(reg, "a"), 0.0));
  EXPECT_FALSE(is_hermitian(a, 0.0));
  EXPECT_TRUE(is_hermitian(cd(0, 1) * (ad * ad - a * a), 0.0));
}

TEST(OperatorExpr, RegistryMismatch) {
  auto r1 = ModeRegistry::create({{"a", 3}});
  auto r2 = ModeRegistry::create({{"b", 3}});
  auto x = OperatorExpr::annihilation(r1, "a");
  auto y = OperatorExpr::annihilation(r2, "b");
  EXPECT_THROW(x + y, ValidationError);
  EXPECT_THROW(x * y, ValidationError);
  EXPECT_THROW(commutator(x, y), ValidationError);
  // truncation differences do not matter to the algebra
  auto r3 = r1->with_truncation("a", 9);
  EXPECT_NO_THROW(x + OperatorExpr::creation(r3, "a"));
}

TEST(OperatorExpr, AssociativityAndAntihomomorphism) {
  auto reg = ModeRegistry::create({{"a", 10}, {"b", 10}});
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto x = oracle::random_expr(reg, rng, 3, 4);
    auto y = oracle::random_expr(reg, rng, 3, 4);
    auto z = oracle::random_expr(reg, rng, 3, 4);
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ((x * y).adjoint(), y.adjoint() * x.adjoint());
    EXPECT_EQ(x.adjoint().adjoint(), x);
  }
}

TEST(OperatorExpr, MatrixHomomorphism) {
  const int dim = 10;
  auto reg = ModeRegistry::create({{"a", dim}});
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = oracle::random_expr(reg, rng, 3, 4);
    auto y = oracle::random_expr(reg, rng, 3, 4);
    const int deg = x.total_degree() + y.total_degree();
    const int safe = dim - deg;
    if (safe <= 0) continue;
    oracle::Mat lhs = oracle::evaluate(x * y, {dim});
    oracle::Mat rhs = oracle::evaluate(x, {dim}) * oracle::evaluate(y, {dim});
    EXPECT_LT((lhs - rhs).topLeftCorner(safe, safe).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(OperatorExpr, CanonicalText) {
  auto reg = ModeRegistry::create({{"a", 4}, {"b", 4}});
  EXPECT_EQ(OperatorExpr(reg).to_string(), "0");
  EXPECT_EQ(OperatorExpr::identity(reg).to_string(), "(1,0)");
  auto ad = OperatorExpr::creation(reg, "a");
  auto t = cd(0, 1) * ad * ad * OperatorExpr::annihilation(reg, "a");
  EXPECT_EQ(t.to_string(), "(0,1)*[ad^2 a^1]@a");
  auto ab = OperatorExpr::number(reg, "a") * OperatorExpr::annihilation(reg, "b");
  EXPECT_EQ(ab.to_string(), "(1,0)*[ad^1 a^1]@a*[ad^0 a^1]@b");
}

TEST(OperatorExpr, NumberPolynomial) {
  auto reg = one_mode();
  auto n = OperatorExpr::number(reg, "a");
  auto poly = number_polynomial(cd(3, 0) * n * n + cd(-2, 0) * n + OperatorExpr::identity(reg, 5.0), 0);
  ASSERT_EQ(poly.size(), 3u);
  EXPECT_NEAR(poly[0].real(), 5.0, 1e-14);
  EXPECT_NEAR(poly[1].real(), -2.0, 1e-14);
  EXPECT_NEAR(poly[2].real(), 3.0, 1e-14);
}

TEST(OperatorExpr, DropTolerance) {
  auto reg = one_mode();
  auto n = OperatorExpr::number(reg, "a");
  EXPECT_TRUE((n * cd(1e-15, 0)).is_zero());
  auto almost = n * cd(1.0 + 1e-16, 0) - n;
  EXPECT_TRUE(almost.is_zero());
}
