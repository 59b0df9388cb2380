#pragma once
// Brute-force reference helpers shared by the tests. Deliberately independent of
// the library's own Fock realization so they can act as oracles for it.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>

#include "qcfb/operator_expr.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Mat ladder(int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

inline Mat matpow(const Mat& m, int k) {
  Mat r = Mat::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

// Evaluate an OperatorExpr by multiplying raw ladder matrices (no closed-form
// matrix elements), first mode most significant.
inline Mat evaluate(const qcfb::OperatorExpr& x, const std::vector<int>& dims) {
  int total = 1;
  for (int d : dims) total *= d;
  Mat out = Mat::Zero(total, total);
  for (const auto& [m, c] : x.terms()) {
    Mat t = Mat::Identity(1, 1);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      Mat a = ladder(dims[i]);
      Mat f = matpow(a.adjoint(), m[i].creation) * matpow(a, m[i].annihilation);
      t = kron(t, f);
    }
    out += c * t;
  }
  return out;
}

// Random expression with small dyadic coefficients so floating sums stay exact.
inline qcfb::OperatorExpr random_expr(const qcfb::RegistryPtr& reg, std::mt19937& rng, int max_degree,
                                      int n_terms) {
  std::uniform_int_distribution<int> coef(-8, 8);
  qcfb::OperatorExpr e(reg);
  for (int t = 0; t < n_terms; ++t) {
    qcfb::Monomial m(reg->size());
    int budget = std::uniform_int_distribution<int>(0, max_degree)(rng);
    while (budget > 0) {
      std::size_t mode = std::uniform_int_distribution<std::size_t>(0, reg->size() - 1)(rng);
      if (rng() % 2) ++m[mode].creation; else ++m[mode].annihilation;
      --budget;
    }
    e += qcfb::OperatorExpr::term(reg, m, cd(coef(rng) / 4.0, coef(rng) / 4.0));
  }
  return e;
}

}  // namespace oracle

namespace oracle {

inline double trace_distance(const Mat& x, const Mat& y) {
  Mat d = x - y;
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline Mat random_density(int dim, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = cd(g(rng), g(rng));
  Mat r = G * G.adjoint();
  return r / r.trace().real();
}

inline Eigen::VectorXcd random_ket(int dim, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cd(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace oracle
