#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qcfb/mode_registry.hpp"

namespace qcfb {

using Complex = std::complex<double>;

/// Coefficients below this magnitude are dropped after every arithmetic op.
inline constexpr double kDropTolerance = 1e-14;

/// Exponents of one mode inside a normal-ordered monomial: (a^dag)^creation a^annihilation.
struct ModePower {
  std::uint16_t creation = 0;
  std::uint16_t annihilation = 0;

  friend auto operator<=>(const ModePower&, const ModePower&) = default;
};

/// Normal-ordered product over all registered modes. All-zero powers is the identity.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t num_modes) : powers_(num_modes) {}
  explicit Monomial(std::vector<ModePower> powers) : powers_(std::move(powers)) {}

  std::size_t num_modes() const noexcept { return powers_.size(); }
  const ModePower& operator[](std::size_t mode) const { return powers_[mode]; }
  ModePower& operator[](std::size_t mode) { return powers_[mode]; }
  const std::vector<ModePower>& powers() const noexcept { return powers_; }

  int degree() const noexcept;
  bool is_identity() const noexcept { return degree() == 0; }
  /// Creation and annihilation powers swapped on every mode.
  Monomial adjoint() const;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;

 private:
  std::vector<ModePower> powers_;
};

/// Complex polynomial in the creation/annihilation operators of a ModeRegistry,
/// kept in normal order with no duplicate monomials and no negligible terms.
class OperatorExpr {
 public:
  using TermMap = std::map<Monomial, Complex>;

  /// The zero operator.
  explicit OperatorExpr(RegistryPtr registry);

  static OperatorExpr identity(RegistryPtr registry, Complex scale = 1.0);
  static OperatorExpr term(RegistryPtr registry, Monomial monomial, Complex coefficient);
  static OperatorExpr annihilation(RegistryPtr registry, std::string_view mode);
  static OperatorExpr creation(RegistryPtr registry, std::string_view mode);
  static OperatorExpr number(RegistryPtr registry, std::string_view mode);
  /// x = (a + a^dag)/sqrt(2)
  static OperatorExpr position(RegistryPtr registry, std::string_view mode);
  /// p = (-i a + i a^dag)/sqrt(2)
  static OperatorExpr momentum(RegistryPtr registry, std::string_view mode);

  const RegistryPtr& registry() const noexcept { return registry_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  Complex coefficient(const Monomial& monomial) const;
  /// Coefficient of the identity term.
  Complex scalar_part() const;
  /// True if every term is the identity (or the expression is zero).
  bool is_scalar() const;
  int total_degree() const noexcept;
  /// Max over terms of the degree restricted to one mode.
  int mode_degree(std::size_t mode) const noexcept;
  bool acts_on(std::size_t mode) const noexcept { return mode_degree(mode) > 0; }

  /// Terms whose total degree equals `degree`.
  OperatorExpr homogeneous_part(int degree) const;

  OperatorExpr adjoint() const;
  bool is_hermitian(double tol) const;
  /// Largest coefficient magnitude; the max-norm used by tolerance checks.
  double max_norm() const noexcept;

  /// Canonical text form, e.g. "(0,1)*[ad^2 a^1]@a + (2,0)".
  std::string to_string() const;

  OperatorExpr& operator+=(const OperatorExpr& other);
  OperatorExpr& operator-=(const OperatorExpr& other);
  OperatorExpr& operator*=(Complex scale);

  friend OperatorExpr operator+(OperatorExpr x, const OperatorExpr& y) { return x += y; }
  friend OperatorExpr operator-(OperatorExpr x, const OperatorExpr& y) { return x -= y; }
  friend OperatorExpr operator*(const OperatorExpr& x, const OperatorExpr& y);
  friend OperatorExpr operator*(OperatorExpr x, Complex s) { return x *= s; }
  friend OperatorExpr operator*(Complex s, OperatorExpr x) { return x *= s; }
  friend OperatorExpr operator-(OperatorExpr x) { return x *= -1.0; }

  /// Exact equality of term maps (registries must share mode labels).
  friend bool operator==(const OperatorExpr& x, const OperatorExpr& y);

 private:
  void require_compatible(const OperatorExpr& other) const;
  void prune();

  RegistryPtr registry_;
  TermMap terms_;
};

OperatorExpr add(const OperatorExpr& x, const OperatorExpr& y);
OperatorExpr multiply(const OperatorExpr& x, const OperatorExpr& y);
OperatorExpr adjoint(const OperatorExpr& x);
OperatorExpr commutator(const OperatorExpr& x, const OperatorExpr& y);
bool is_hermitian(const OperatorExpr& x, double tol);
/// Hermitian part (x + x^dag)/2.
OperatorExpr hermitian_part(const OperatorExpr& x);
/// Integer power by repeated multiplication; power 0 is the identity.
OperatorExpr pow(const OperatorExpr& x, int power);

/// Same expression on another registry, matching modes by label. Throws
/// ValidationError if x acts on a mode the target lacks.
OperatorExpr remap(const OperatorExpr& x, const RegistryPtr& target);

/// Max-norm distance between two expressions over the same modes.
double max_abs_difference(const OperatorExpr& x, const OperatorExpr& y);

/// Diagonal (number-conserving, single-mode) part of `x` on `mode`, written as
/// polynomial coefficients c_k of N^k, N = a^dag a. Terms touching other modes
/// or changing photon number are ignored.
std::vector<Complex> number_polynomial(const OperatorExpr& x, std::size_t mode);

}  // namespace qcfb
