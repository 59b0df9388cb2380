#include <algorithm>
#include <cmath>
#include <map>

#include "qcfb/errors.hpp"
#include "qcfb/netlist.hpp"

namespace qcfb::netlist {

namespace {

[[noreturn]] void invalid(const std::string& msg, Location loc) {
  throw ValidationError(to_string(loc) + ": " + msg);
}

// Run f, prefixing any library validation error with the netlist location.
template <class F>
auto at(Location loc, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(to_string(loc) + ": " + e.what());
  }
}

struct Value {
  bool is_op = false;
  Complex s{};
  std::optional<OperatorExpr> op;

  OperatorExpr as_op(const RegistryPtr& reg) const { return is_op ? *op : OperatorExpr::identity(reg, s); }
};

const std::map<std::string, double, std::less<>> kScale{
    {"MHz_over_2pi", 2.0 * M_PI}, {"rad_per_us", 1.0}, {"us", 1.0}, {"ns", 1e-3}};

class Evaluator {
 public:
  explicit Evaluator(RegistryPtr reg) : reg_(std::move(reg)) {}

  Value eval(const Expr& e) const {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Number:
      case K::Imaginary: {
        const double v = e.value * (e.unit.empty() ? 1.0 : kScale.find(e.unit)->second);
        return scalar(e.kind == K::Number ? Complex(v, 0.0) : Complex(0.0, v));
      }
      case K::Constant:
        return scalar(M_PI);
      case K::Ladder: {
        const std::string m = label(e);
        if (e.name == "a") return oper(OperatorExpr::annihilation(reg_, m));
        if (e.name == "ad") return oper(OperatorExpr::creation(reg_, m));
        if (e.name == "x") return oper(OperatorExpr::position(reg_, m));
        if (e.name == "p") return oper(OperatorExpr::momentum(reg_, m));
        return oper(OperatorExpr::number(reg_, m));
      }
      case K::Monomial: {
        Monomial mono(reg_->size());
        mono[reg_->index(label(e))] = {static_cast<std::uint16_t>(e.creation),
                                       static_cast<std::uint16_t>(e.annihilation)};
        return oper(OperatorExpr::term(reg_, mono, 1.0));
      }
      case K::Pair:
        return scalar(Complex(eval(e.args[0]).s.real(), eval(e.args[1]).s.real()));
      case K::Sqrt:
        return scalar(std::sqrt(eval(e.args[0]).s));
      case K::Negate: {
        Value v = eval(e.args[0]);
        if (v.is_op) return oper(-*v.op);
        return scalar(-v.s);
      }
      case K::Add:
      case K::Sub: {
        const Value l = eval(e.args[0]), r = eval(e.args[1]);
        const double sign = e.kind == K::Add ? 1.0 : -1.0;
        if (!l.is_op && !r.is_op) return scalar(l.s + sign * r.s);
        return oper(l.as_op(reg_) + r.as_op(reg_) * Complex(sign, 0.0));
      }
      case K::Mul: {
        const Value l = eval(e.args[0]), r = eval(e.args[1]);
        if (!l.is_op && !r.is_op) return scalar(l.s * r.s);
        if (!l.is_op) return oper(*r.op * l.s);
        if (!r.is_op) return oper(*l.op * r.s);
        return oper(*l.op * *r.op);
      }
      case K::Div: {
        const Value l = eval(e.args[0]), r = eval(e.args[1]);
        if (r.s == Complex{}) invalid("division by zero", e.loc);
        if (l.is_op) return oper(*l.op * (1.0 / r.s));
        return scalar(l.s / r.s);
      }
      case K::Pow: {
        const Value b = eval(e.args[0]);
        if (b.is_op) return oper(pow(*b.op, e.exponent));
        return scalar(std::pow(b.s, e.exponent));
      }
    }
    return {};
  }

  OperatorExpr op(const Expr& e) const { return eval(e).as_op(reg_); }

  Complex complex(const Expr& e) const { return eval(e).s; }

  double real(const Expr& e, const std::string& key) const {
    const Complex c = eval(e).s;
    if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c.real())))
      invalid("'" + key + "' must be real", e.loc);
    return c.real();
  }

 private:
  static Value scalar(Complex s) { return {false, s, std::nullopt}; }
  static Value oper(OperatorExpr o) { return {true, {}, std::move(o)}; }

  std::string label(const Expr& e) const { return e.mode.empty() ? reg_->mode(0).label : e.mode; }

  RegistryPtr reg_;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (true) {
    std::size_t c = s.find(',', b);
    std::string t = s.substr(b, c == std::string::npos ? std::string::npos : c - b);
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    out.push_back(t);
    if (c == std::string::npos) return out;
    b = c + 1;
  }
}

InitialState parse_state(const std::string& s) {
  InitialState st;
  if (s == "vacuum") return st;
  const auto open = s.find('(');
  std::string head = s.substr(0, open);
  head.erase(head.find_last_not_of(" \t") + 1);
  std::vector<double> v;
  for (const auto& a : split(s.substr(open + 1, s.size() - open - 2))) v.push_back(std::stod(a));
  if (head == "fock") {
    st.kind = InitialState::Kind::Fock;
    st.n = static_cast<int>(v[0]);
  } else if (head == "coherent") {
    st.kind = InitialState::Kind::Coherent;
    st.alpha = Complex(v[0], v.size() > 1 ? v[1] : 0.0);
  } else {
    st.kind = InitialState::Kind::Thermal;
    st.nbar = v[0];
  }
  return st;
}

const std::string* word(const Section& s, std::string_view key) {
  const Entry* e = s.find(key);
  return e ? std::get_if<std::string>(&e->value) : nullptr;
}

}  // namespace

OperatorExpr QuarticSynthesis::hamiltonian(const RegistryPtr& reg) const {
  const auto x = OperatorExpr::position(reg, mode);
  const auto& c = coeffs;
  return x * c.chi1 + pow(x, 2) * c.chi2 + pow(x, 3) * c.chi3 + pow(x, 4) * c.chi4;
}

EffectiveModel Resolved::model() const {
  EffectiveModel m{plant_H, {}, std::nullopt};
  if (!loops.empty()) {
    std::vector<FeedbackLoopSpec> specs;
    for (const auto& l : loops) specs.push_back(l.spec);
    m = combine_loops(specs, run.high_gain);
  }
  for (const auto& c : channels) m.channels.push_back(c.channel);
  if (run.compensate_linear) m = compensate_linear(std::move(m));
  return m;
}

Resolved resolve(const Netlist& n) {
  const Section* modes = n.find("modes");
  if (!modes) invalid("no [modes] section", {1, 1});
  std::vector<ModeRegistry::Mode> ms;
  for (const auto& e : modes->entries) ms.push_back({e.key, static_cast<int>(std::get<Expr>(e.value).value)});
  Resolved out(at(modes->loc, [&] { return ModeRegistry::create(ms); }));
  const Evaluator ev(out.registry);

  if (const Section* p = n.find("plant"))
    if (const Entry* h = p->find("H")) out.plant_H = ev.op(std::get<Expr>(h->value));
  if (!out.plant_H.is_hermitian(1e-10)) invalid("plant H is not Hermitian", n.find("plant")->loc);

  auto real_or = [&](const Section& s, std::string_view key, double dflt) {
    const Entry* e = s.find(key);
    return e ? ev.real(std::get<Expr>(e->value), std::string(key)) : dflt;
  };
  auto required = [&](const Section& s, std::string_view key) {
    if (!s.find(key)) invalid("[" + s.kind + "] needs '" + std::string(key) + "'", s.loc);
    return real_or(s, key, 0.0);
  };

  if (const Section* q = n.find("quartic")) {
    QuarticSynthesis qs;
    qs.loc = q->loc;
    qs.mode = word(*q, "mode") ? *word(*q, "mode") : out.registry->mode(0).label;
    qs.G1 = required(*q, "G1");
    qs.G3 = required(*q, "G3");
    qs.gamma = required(*q, "gamma");
    qs.gamma1 = required(*q, "gamma1");
    qs.gamma2 = real_or(*q, "gamma2", 0.0);
    qs.gamma3 = required(*q, "gamma3");
    qs.A1 = required(*q, "A1");
    qs.A3 = required(*q, "A3");
    qs.A4 = required(*q, "A4");
    qs.coeffs = at(q->loc, [&] {
      return quartic_coefficients(qs.G1, qs.G3, qs.gamma, qs.gamma1, qs.gamma2, qs.gamma3, qs.A1, qs.A3, qs.A4);
    });
    out.plant_H += qs.hamiltonian(out.registry);
    out.quartic = std::move(qs);
  }

  for (const auto& s : n.sections) {
    if (s.kind == "loop") {
      if (!s.find("L") || !s.find("L_f")) invalid("[loop " + s.name + "] needs L and L_f", s.loc);
      const double phi = real_or(s, "phi", 0.0);
      if (std::abs(phi) > M_PI + 1e-12) invalid("phi must lie in [-pi, pi]", s.find("phi")->loc);
      const bool has_g = s.find("G0") != nullptr;
      const bool has_k = s.find("kappa") != nullptr, has_x = s.find("xi") != nullptr;
      if (has_g == (has_k || has_x))
        invalid("[loop " + s.name + "] needs exactly one of (kappa, xi) or G0", s.loc);
      if (!has_g && !(has_k && has_x)) invalid("[loop " + s.name + "] needs both kappa and xi", s.loc);
      // with G0 alone kappa only matters to the full two-mode model; 1 rad/us is a placeholder
      const AmplifierParams amp =
          has_g ? at(s.find("G0")->loc, [&] { return AmplifierParams::from_gain(required(s, "G0"), 1.0); })
                : at(s.find("kappa")->loc,
                     [&] { return AmplifierParams::from_kappa_xi(required(s, "kappa"), required(s, "xi")); });
      NamedLoop l{s.name,
                  FeedbackLoopSpec{out.plant_H, real_or(s, "theta", 0.0), ev.op(std::get<Expr>(s.find("L")->value)),
                                   ev.op(std::get<Expr>(s.find("L_f")->value)), amp, real_or(s, "A", 0.0), phi,
                                   word(s, "amp_mode") ? *word(s, "amp_mode") : std::string("c")},
                  has_g, s.loc};
      at(s.loc, [&] {
        l.spec.validate();
        return 0;
      });
      out.loops.push_back(std::move(l));
    } else if (s.kind == "channel") {
      if (!s.find("op")) invalid("[channel " + s.name + "] needs op", s.loc);
      Bath bath = VacuumBath{};
      const std::string kind = word(s, "bath") ? *word(s, "bath") : "vacuum";
      if (kind == "squeezed") {
        SqueezedBath b;
        b.N = required(s, "N");
        b.M = s.find("M") ? ev.complex(std::get<Expr>(s.find("M")->value)) : Complex{};
        bath = b;
      } else if (kind == "vacuum") {
        if (s.find("N") || s.find("M")) invalid("N and M apply only to bath = squeezed", s.loc);
      } else {
        invalid("bath must be vacuum or squeezed", s.find("bath")->loc);
      }
      NamedChannel c{s.name, DissipationChannel{ev.op(std::get<Expr>(s.find("op")->value)), bath,
                                                real_or(s, "rate", 1.0)},
                     s.loc};
      at(s.loc, [&] {
        c.channel.validate();
        return 0;
      });
      out.channels.push_back(std::move(c));
    }
  }

  RunConfig& rc = out.run;
  rc.observe = out.registry->mode(0).label;
  if (const Section* r = n.find("run")) {
    rc.loc = r->loc;
    if (const auto* t = word(*r, "task")) rc.tasks = split(*t);
    rc.t_max = real_or(*r, "t_max", 0.0);
    rc.n_points = static_cast<int>(real_or(*r, "n_points", 101));
    if (const auto* s = word(*r, "initial_state")) rc.initial = parse_state(*s);
    if (const auto* f = word(*r, "compensate_linear")) rc.compensate_linear = *f == "true";
    if (const auto* f = word(*r, "high_gain")) rc.high_gain = *f == "true";
    if (const auto* o = word(*r, "observe")) rc.observe = *o;
    rc.tau_max = real_or(*r, "tau_max", 0.0);
    rc.tau_points = static_cast<int>(real_or(*r, "tau_points", 101));
    if (const auto* k = word(*r, "kappa_ratios"))
      for (const auto& v : split(*k)) rc.kappa_ratios.push_back(std::stod(v));
    rc.gamma_ref = real_or(*r, "gamma_ref", 0.0);
    rc.t_probe = real_or(*r, "t_probe", 0.0);
    rc.plant_truncation = static_cast<int>(real_or(*r, "plant_truncation", 15));
    rc.amp_truncation = static_cast<int>(real_or(*r, "amp_truncation", 20));
    rc.leak_threshold = real_or(*r, "leak_threshold", 1e-6);
  }
  auto needs = [&](const std::string& task) {
    return std::find(rc.tasks.begin(), rc.tasks.end(), task) != rc.tasks.end();
  };
  if ((needs("evolve") || needs("fano") || needs("nongauss")) && !(rc.t_max > 0))
    invalid("time-series tasks need t_max > 0", rc.loc);
  if (rc.n_points < 2) invalid("n_points must be at least 2", rc.loc);
  if (needs("g2") && !(rc.tau_max > 0)) invalid("task g2 needs tau_max > 0", rc.loc);
  if (rc.tau_points < 2) invalid("tau_points must be at least 2", rc.loc);
  if (needs("oracle-sweep")) {
    if (rc.kappa_ratios.empty()) invalid("task oracle-sweep needs kappa_ratios", rc.loc);
    if (!(rc.gamma_ref > 0)) invalid("task oracle-sweep needs gamma_ref > 0", rc.loc);
    if (out.loops.size() != 1) invalid("task oracle-sweep needs exactly one loop", rc.loc);
    if (out.registry->size() != 1) invalid("task oracle-sweep needs a single plant mode", rc.loc);
    if (rc.t_probe == 0.0) rc.t_probe = 3.0 / rc.gamma_ref;
  }
  if (needs("kerr-coeffs") && out.loops.empty()) invalid("task kerr-coeffs needs a loop", rc.loc);
  if (needs("quartic-coeffs") && !out.quartic) invalid("task quartic-coeffs needs a [quartic] block", rc.loc);
  const auto obs = out.registry->index(rc.observe);
  if (rc.initial.kind == InitialState::Kind::Fock && rc.initial.n >= out.registry->mode(obs).truncation)
    invalid("initial Fock level exceeds the truncation", rc.loc);
  at(rc.loc, [&] {
    out.model().validate();
    return 0;
  });
  return out;
}

}  // namespace qcfb::netlist
