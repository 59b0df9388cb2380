#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qcfb/coefficients.hpp"
#include "qcfb/feedback_loop.hpp"

namespace qcfb::netlist {

struct Location {
  int line = 0;
  int column = 0;
};

std::string to_string(const Location& loc);

/// Expression tree for values. Locations are carried for diagnostics and are
/// ignored by operator==.
struct Expr {
  enum class Kind {
    Number,     // value [unit]
    Imaginary,  // value i [unit]
    Constant,   // pi
    Ladder,     // a, ad, x, p, n, optionally @mode
    Monomial,   // [ad^p a^q]@mode
    Pair,       // (re, im)
    Sqrt,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
  };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string unit;
  std::string name;  // Constant or Ladder symbol
  std::string mode;
  int creation = 0;
  int annihilation = 0;
  int exponent = 0;
  std::vector<Expr> args;
  Location loc;

  friend bool operator==(const Expr& x, const Expr& y);
};

/// Expressions for physical quantities; plain text for words, flags and lists.
struct Entry {
  std::string key;
  std::variant<Expr, std::string> value;
  Location loc;

  const Expr* expr() const { return std::get_if<Expr>(&value); }
  friend bool operator==(const Entry& x, const Entry& y) { return x.key == y.key && x.value == y.value; }
};

struct Section {
  std::string kind;  // modes, plant, loop, channel, quartic, run
  std::string name;  // loop and channel ids
  std::vector<Entry> entries;
  Location loc;

  const Entry* find(std::string_view key) const;
  friend bool operator==(const Section& x, const Section& y) {
    return x.kind == y.kind && x.name == y.name && x.entries == y.entries;
  }
};

struct Netlist {
  std::vector<Section> sections;

  const Section* find(std::string_view kind, std::string_view name = {}) const;
  Section* find(std::string_view kind, std::string_view name = {});
  friend bool operator==(const Netlist&, const Netlist&) = default;
};

/// Parse netlist text. Syntax, unknown keys or mode labels, duplicate ids and
/// dimensional errors (including a missing unit suffix) raise ParseError.
Netlist parse(std::string_view text);

/// Canonical text form; parse(print(n)) == n.
std::string print(const Netlist& n);
std::string print(const Expr& e);

/// Replace the first numeric literal of section[.name].key, keeping its unit.
void override_value(Netlist& n, std::string_view path, double value);

/// Change a declared mode's truncation.
void override_truncation(Netlist& n, std::string_view label, int levels);

struct InitialState {
  enum class Kind { Vacuum, Fock, Coherent, Thermal } kind = Kind::Vacuum;
  int n = 0;
  Complex alpha{};
  double nbar = 0.0;
};

struct RunConfig {
  std::vector<std::string> tasks;
  double t_max = 0.0;  // us
  int n_points = 101;
  InitialState initial;
  bool compensate_linear = false;
  bool high_gain = false;
  std::string observe;  // mode for single-mode observables
  double tau_max = 0.0;
  int tau_points = 101;
  std::vector<double> kappa_ratios;
  double gamma_ref = 0.0;  // rad/us
  double t_probe = 0.0;    // us; 0 picks 3 / gamma_ref
  int plant_truncation = 15;
  int amp_truncation = 20;
  double leak_threshold = 1e-6;
  Location loc;
};

struct QuarticSynthesis {
  std::string mode;
  double G1 = 0, G3 = 0, gamma = 0, gamma1 = 0, gamma2 = 0, gamma3 = 0, A1 = 0, A3 = 0, A4 = 0;
  QuarticCoefficients coeffs{};
  Location loc;

  /// chi1 x + chi2 x^2 + chi3 x^3 + chi4 x^4 on `mode`.
  OperatorExpr hamiltonian(const RegistryPtr& reg) const;
};

struct NamedLoop {
  std::string id;
  FeedbackLoopSpec spec;
  bool from_gain = false;
  Location loc;
};

struct NamedChannel {
  std::string id;
  DissipationChannel channel;
  Location loc;
};

/// Netlist with every literal evaluated (rates in rad/us, times in us).
struct Resolved {
  explicit Resolved(RegistryPtr reg) : registry(reg), plant_H(reg) {}

  RegistryPtr registry;
  OperatorExpr plant_H;  // includes any quartic synthesis
  std::vector<NamedLoop> loops;
  std::vector<NamedChannel> channels;
  std::optional<QuarticSynthesis> quartic;
  RunConfig run;

  /// Loops eliminated (exact or high-gain per run.high_gain), plus explicit
  /// channels, plus optional linear compensation.
  EffectiveModel model() const;
};

/// Physics checks raise ValidationError prefixed with the offending location.
Resolved resolve(const Netlist& n);

inline Resolved load(std::string_view text) { return resolve(parse(text)); }

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace qcfb::netlist
