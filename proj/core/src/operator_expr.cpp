#include "qcfb/operator_expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "qcfb/errors.hpp"

namespace qcfb {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// One mode: (ad^p1 a^q1)(ad^p2 a^q2) = sum_k C(q1,k) C(p2,k) k! ad^(p1+p2-k) a^(q1+q2-k)
struct WickTerm {
  ModePower power;
  double weight;
};

std::vector<WickTerm> wick(const ModePower& x, const ModePower& y) {
  const int kmax = std::min<int>(x.annihilation, y.creation);
  std::vector<WickTerm> out;
  out.reserve(kmax + 1);
  double fact = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) fact *= k;
    ModePower p;
    p.creation = static_cast<std::uint16_t>(x.creation + y.creation - k);
    p.annihilation = static_cast<std::uint16_t>(x.annihilation + y.annihilation - k);
    out.push_back({p, binom(x.annihilation, k) * binom(y.creation, k) * fact});
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int Monomial::degree() const noexcept {
  int d = 0;
  for (const auto& p : powers_) d += p.creation + p.annihilation;
  return d;
}

Monomial Monomial::adjoint() const {
  Monomial m = *this;
  for (auto& p : m.powers_) std::swap(p.creation, p.annihilation);
  return m;
}

OperatorExpr::OperatorExpr(RegistryPtr registry) : registry_(std::move(registry)) {
  if (!registry_) throw ValidationError("operator expression needs a mode registry");
}

OperatorExpr OperatorExpr::identity(RegistryPtr registry, Complex scale) {
  const auto n = registry ? registry->size() : 0;
  return term(std::move(registry), Monomial(n), scale);
}

OperatorExpr OperatorExpr::term(RegistryPtr registry, Monomial monomial, Complex coefficient) {
  OperatorExpr e(std::move(registry));
  if (monomial.num_modes() != e.registry_->size())
    throw ValidationError("monomial has " + std::to_string(monomial.num_modes()) +
                          " modes, registry has " + std::to_string(e.registry_->size()));
  if (std::abs(coefficient) >= kDropTolerance) e.terms_.emplace(std::move(monomial), coefficient);
  return e;
}

OperatorExpr OperatorExpr::annihilation(RegistryPtr registry, std::string_view mode) {
  const auto i = registry->index(mode);
  Monomial m(registry->size());
  m[i].annihilation = 1;
  return term(std::move(registry), std::move(m), 1.0);
}

OperatorExpr OperatorExpr::creation(RegistryPtr registry, std::string_view mode) {
  const auto i = registry->index(mode);
  Monomial m(registry->size());
  m[i].creation = 1;
  return term(std::move(registry), std::move(m), 1.0);
}

OperatorExpr OperatorExpr::number(RegistryPtr registry, std::string_view mode) {
  const auto i = registry->index(mode);
  Monomial m(registry->size());
  m[i] = {1, 1};
  return term(std::move(registry), std::move(m), 1.0);
}

OperatorExpr OperatorExpr::position(RegistryPtr registry, std::string_view mode) {
  const double s = 1.0 / std::sqrt(2.0);
  return (annihilation(registry, mode) + creation(registry, mode)) * Complex(s, 0.0);
}

OperatorExpr OperatorExpr::momentum(RegistryPtr registry, std::string_view mode) {
  const double s = 1.0 / std::sqrt(2.0);
  return annihilation(registry, mode) * Complex(0.0, -s) + creation(registry, mode) * Complex(0.0, s);
}

Complex OperatorExpr::coefficient(const Monomial& monomial) const {
  auto it = terms_.find(monomial);
  return it == terms_.end() ? Complex{} : it->second;
}

Complex OperatorExpr::scalar_part() const { return coefficient(Monomial(registry_->size())); }

bool OperatorExpr::is_scalar() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_identity());
}

int OperatorExpr::total_degree() const noexcept {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int OperatorExpr::mode_degree(std::size_t mode) const noexcept {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[mode].creation + m[mode].annihilation);
  return d;
}

OperatorExpr OperatorExpr::homogeneous_part(int degree) const {
  OperatorExpr out(registry_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == degree) out.terms_.emplace(m, c);
  return out;
}

OperatorExpr OperatorExpr::adjoint() const {
  OperatorExpr out(registry_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m.adjoint(), std::conj(c));
  return out;
}

bool OperatorExpr::is_hermitian(double tol) const {
  // (x - x^dag) at monomial m is c_m - conj(c_{m^dag}); every nonzero entry sits on a key of x
  for (const auto& [m, c] : terms_)
    if (std::abs(c - std::conj(coefficient(m.adjoint()))) > tol) return false;
  return true;
}

double OperatorExpr::max_norm() const noexcept {
  double r = 0.0;
  for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
  return r;
}

std::string OperatorExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += "(" + format_number(c.real()) + "," + format_number(c.imag()) + ")";
    for (std::size_t i = 0; i < m.num_modes(); ++i) {
      if (m[i].creation == 0 && m[i].annihilation == 0) continue;
      out += "*[ad^" + std::to_string(m[i].creation) + " a^" + std::to_string(m[i].annihilation) +
             "]@" + registry_->mode(i).label;
    }
  }
  return out;
}

void OperatorExpr::require_compatible(const OperatorExpr& other) const {
  if (registry_ == other.registry_) return;
  if (!registry_->same_modes(*other.registry_))
    throw ValidationError("operator expressions live on different mode registries");
}

void OperatorExpr::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kDropTolerance; });
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& other) {
  require_compatible(other);
  for (const auto& [m, c] : other.terms_) terms_[m] += c;
  prune();
  return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& other) {
  require_compatible(other);
  for (const auto& [m, c] : other.terms_) terms_[m] -= c;
  prune();
  return *this;
}

OperatorExpr& OperatorExpr::operator*=(Complex scale) {
  for (auto& [m, c] : terms_) c *= scale;
  prune();
  return *this;
}

OperatorExpr operator*(const OperatorExpr& x, const OperatorExpr& y) {
  x.require_compatible(y);
  OperatorExpr out(x.registry_);
  const std::size_t n = x.registry_->size();
  std::vector<std::vector<WickTerm>> per_mode(n);
  for (const auto& [mx, cx] : x.terms_) {
    for (const auto& [my, cy] : y.terms_) {
      for (std::size_t i = 0; i < n; ++i) per_mode[i] = wick(mx[i], my[i]);
      // cartesian product over modes
      std::vector<std::size_t> idx(n, 0);
      while (true) {
        Monomial m(n);
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          m[i] = per_mode[i][idx[i]].power;
          w *= per_mode[i][idx[i]].weight;
        }
        out.terms_[m] += cx * cy * w;
        std::size_t i = 0;
        for (; i < n; ++i) {
          if (++idx[i] < per_mode[i].size()) break;
          idx[i] = 0;
        }
        if (i == n) break;
      }
    }
  }
  out.prune();
  return out;
}

bool operator==(const OperatorExpr& x, const OperatorExpr& y) {
  if (x.registry_ != y.registry_ && !x.registry_->same_modes(*y.registry_)) return false;
  return x.terms_ == y.terms_;
}

OperatorExpr add(const OperatorExpr& x, const OperatorExpr& y) { return x + y; }
OperatorExpr multiply(const OperatorExpr& x, const OperatorExpr& y) { return x * y; }
OperatorExpr adjoint(const OperatorExpr& x) { return x.adjoint(); }
OperatorExpr commutator(const OperatorExpr& x, const OperatorExpr& y) { return x * y - y * x; }
bool is_hermitian(const OperatorExpr& x, double tol) { return x.is_hermitian(tol); }

OperatorExpr hermitian_part(const OperatorExpr& x) { return (x + x.adjoint()) * Complex(0.5, 0.0); }

OperatorExpr pow(const OperatorExpr& x, int power) {
  if (power < 0) throw ValidationError("negative operator power");
  OperatorExpr r = OperatorExpr::identity(x.registry());
  for (int k = 0; k < power; ++k) r = r * x;
  return r;
}

OperatorExpr remap(const OperatorExpr& x, const RegistryPtr& target) {
  const auto& src = *x.registry();
  std::vector<std::optional<std::size_t>> where(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) where[i] = target->find(src.mode(i).label);
  OperatorExpr out(target);
  for (const auto& [m, c] : x.terms()) {
    Monomial mm(target->size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (m[i].creation == 0 && m[i].annihilation == 0) continue;
      if (!where[i]) throw ValidationError("operator acts on mode '" + src.mode(i).label + "' missing from target");
      mm[*where[i]] = m[i];
    }
    out += OperatorExpr::term(target, mm, c);
  }
  return out;
}

double max_abs_difference(const OperatorExpr& x, const OperatorExpr& y) {
  return (x - y).max_norm();
}

std::vector<Complex> number_polynomial(const OperatorExpr& x, std::size_t mode) {
  // ad^k a^k = N(N-1)...(N-k+1); expand the falling factorial into powers of N
  std::vector<Complex> out;
  for (const auto& [m, c] : x.terms()) {
    bool other = false;
    for (std::size_t i = 0; i < m.num_modes(); ++i)
      if (i != mode && (m[i].creation || m[i].annihilation)) other = true;
    if (other || m[mode].creation != m[mode].annihilation) continue;
    const int k = m[mode].creation;
    std::vector<double> poly{1.0};
    for (int j = 0; j < k; ++j) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d + 1] += poly[d];
        next[d] -= j * poly[d];
      }
      poly = std::move(next);
    }
    if (out.size() < poly.size()) out.resize(poly.size());
    for (std::size_t d = 0; d < poly.size(); ++d) out[d] += c * poly[d];
  }
  return out;
}

}  // namespace qcfb
