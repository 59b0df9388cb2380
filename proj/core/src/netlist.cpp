#include "qcfb/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "qcfb/errors.hpp"

namespace qcfb::netlist {

std::string to_string(const Location& loc) { return std::to_string(loc.line) + ":" + std::to_string(loc.column); }

bool operator==(const Expr& x, const Expr& y) {
  return x.kind == y.kind && x.value == y.value && x.unit == y.unit && x.name == y.name && x.mode == y.mode &&
         x.creation == y.creation && x.annihilation == y.annihilation && x.exponent == y.exponent &&
         x.args == y.args;
}

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const Section* Netlist::find(std::string_view kind, std::string_view name) const {
  for (const auto& s : sections)
    if (s.kind == kind && (name.empty() || s.name == name)) return &s;
  return nullptr;
}

Section* Netlist::find(std::string_view kind, std::string_view name) {
  return const_cast<Section*>(std::as_const(*this).find(kind, name));
}

namespace {

[[noreturn]] void fail(const std::string& msg, Location loc) { throw ParseError(msg, loc.line, loc.column); }

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier(std::string_view s) {
  return !s.empty() && ident_start(s[0]) && std::all_of(s.begin(), s.end(), ident_char);
}

// half-powers of a rate: MHz_over_2pi is +2, a time unit -2
struct UnitInfo {
  double scale;
  int dim;
};

const std::map<std::string, UnitInfo, std::less<>>& units() {
  static const std::map<std::string, UnitInfo, std::less<>> u{
      {"MHz_over_2pi", {2.0 * M_PI, 2}},
      {"rad_per_us", {1.0, 2}},
      {"us", {1.0, -2}},
      {"ns", {1e-3, -2}},
  };
  return u;
}

const std::set<std::string, std::less<>> kLadder{"a", "ad", "x", "p", "n"};

// ---------------------------------------------------------------- lexer

struct Token {
  enum class Type { Number, Imaginary, Ident, Symbol, End } type;
  std::string text;
  double value = 0.0;
  Location loc;
};

class Lexer {
 public:
  Lexer(std::string_view src, Location start) : src_(src), start_(start) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      Location loc{start_.line, start_.column + static_cast<int>(pos_)};
      if (pos_ >= src_.size()) {
        out.push_back({Token::Type::End, "end of line", 0.0, loc});
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number(loc));
      } else if (ident_start(c)) {
        std::size_t b = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        out.push_back({Token::Type::Ident, std::string(src_.substr(b, pos_ - b)), 0.0, loc});
      } else if (std::string_view("+-*/^(),@[]").find(c) != std::string_view::npos) {
        ++pos_;
        out.push_back({Token::Type::Symbol, std::string(1, c), 0.0, loc});
      } else {
        fail(std::string("unexpected character '") + c + "'", loc);
      }
    }
  }

 private:
  Token number(Location loc) {
    std::size_t b = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        digits();
      else
        pos_ = save;  // "2 e..." is not an exponent
    }
    const std::string text(src_.substr(b, pos_ - b));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
      fail("bad number '" + text + "'", loc);
    if (pos_ < src_.size() && src_[pos_] == 'i' && (pos_ + 1 >= src_.size() || !ident_char(src_[pos_ + 1]))) {
      ++pos_;
      return {Token::Type::Imaginary, text + "i", v, loc};
    }
    return {Token::Type::Number, text, v, loc};
  }

  std::string_view src_;
  Location start_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- parser

class ExprParser {
 public:
  explicit ExprParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expr parse_all() {
    Expr e = expr();
    if (peek().type != Token::Type::End) fail("unexpected token '" + peek().text + "'", peek().loc);
    return e;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool accept(std::string_view sym) {
    if (peek().type == Token::Type::Symbol && peek().text == sym) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "' but found '" + peek().text + "'", peek().loc);
  }

  static Expr node(Expr::Kind k, Location loc, std::vector<Expr> args = {}) {
    Expr e;
    e.kind = k;
    e.loc = loc;
    e.args = std::move(args);
    return e;
  }

  Expr expr() {
    struct Depth {
      int& d;
      explicit Depth(int& x, Location loc) : d(x) {
        if (++d > 200) fail("expression nested too deeply", loc);
      }
      ~Depth() { --d; }
    } guard(depth_, peek().loc);
    Expr lhs = term();
    while (true) {
      const Location loc = peek().loc;
      if (accept("+"))
        lhs = node(Expr::Kind::Add, loc, {std::move(lhs), term()});
      else if (accept("-"))
        lhs = node(Expr::Kind::Sub, loc, {std::move(lhs), term()});
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    while (true) {
      const Location loc = peek().loc;
      if (accept("*"))
        lhs = node(Expr::Kind::Mul, loc, {std::move(lhs), unary()});
      else if (accept("/"))
        lhs = node(Expr::Kind::Div, loc, {std::move(lhs), unary()});
      else
        return lhs;
    }
  }

  Expr unary() {
    const Location loc = peek().loc;
    if (accept("-")) {
      if (++negations_ > 200) fail("too many signs", loc);
      return node(Expr::Kind::Negate, loc, {unary()});
    }
    return power();
  }

  int small_int(const char* what) {
    const Token t = take();
    if (t.type != Token::Type::Number || t.value != std::floor(t.value) || t.value < 0 || t.value > 64)
      fail(std::string(what) + " must be an integer in [0, 64], found '" + t.text + "'", t.loc);
    return static_cast<int>(t.value);
  }

  Expr power() {
    Expr base = primary();
    const Location loc = peek().loc;
    if (!accept("^")) return base;
    Expr e = node(Expr::Kind::Pow, loc, {std::move(base)});
    e.exponent = small_int("exponent");
    return e;
  }

  std::string mode_suffix() {
    if (!accept("@")) return {};
    const Token t = take();
    if (t.type != Token::Type::Ident) fail("expected a mode label after '@', found '" + t.text + "'", t.loc);
    return t.text;
  }

  Expr primary() {
    const Token t = take();
    switch (t.type) {
      case Token::Type::Number:
      case Token::Type::Imaginary: {
        Expr e = node(t.type == Token::Type::Number ? Expr::Kind::Number : Expr::Kind::Imaginary, t.loc);
        e.value = t.value;
        if (peek().type == Token::Type::Ident && units().count(peek().text)) e.unit = take().text;
        return e;
      }
      case Token::Type::Ident: {
        if (t.text == "pi") {
          Expr e = node(Expr::Kind::Constant, t.loc);
          e.name = "pi";
          return e;
        }
        if (t.text == "i") {
          Expr e = node(Expr::Kind::Imaginary, t.loc);
          e.value = 1.0;
          return e;
        }
        if (t.text == "sqrt") {
          expect("(");
          Expr e = node(Expr::Kind::Sqrt, t.loc, {expr()});
          expect(")");
          return e;
        }
        if (kLadder.count(t.text)) {
          Expr e = node(Expr::Kind::Ladder, t.loc);
          e.name = t.text;
          e.mode = mode_suffix();
          return e;
        }
        if (units().count(t.text)) fail("unit '" + t.text + "' must follow a number", t.loc);
        fail("unknown identifier '" + t.text + "'", t.loc);
      }
      case Token::Type::Symbol: {
        if (t.text == "(") {
          Expr first = expr();
          if (accept(",")) {
            Expr e = node(Expr::Kind::Pair, t.loc, {std::move(first), expr()});
            expect(")");
            return e;
          }
          expect(")");
          return first;
        }
        if (t.text == "[") return monomial(t.loc);
        fail("unexpected token '" + t.text + "'", t.loc);
      }
      case Token::Type::End:
        break;
    }
    fail("unexpected end of expression", t.loc);
  }

  Expr monomial(Location loc) {
    Expr e = node(Expr::Kind::Monomial, loc);
    auto factor = [&](const char* sym) {
      const Token t = take();
      if (t.type != Token::Type::Ident || t.text != sym)
        fail(std::string("expected '") + sym + "' in monomial literal, found '" + t.text + "'", t.loc);
      expect("^");
      return small_int("monomial power");
    };
    e.creation = factor("ad");
    e.annihilation = factor("a");
    expect("]");
    e.mode = mode_suffix();
    return e;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int depth_ = 0;
  int negations_ = 0;
};

// ---------------------------------------------------------------- schema

enum class ValueKind { Operator, Scalar, Integer, Word, Flag, Tasks, Ratios, State };

struct KeySpec {
  ValueKind kind;
  int dim = 0;
};

const std::map<std::string, std::map<std::string, KeySpec, std::less<>>, std::less<>>& schema() {
  using K = ValueKind;
  static const std::map<std::string, std::map<std::string, KeySpec, std::less<>>, std::less<>> s{
      {"modes", {}},
      {"plant", {{"H", {K::Operator, 2}}}},
      {"loop",
       {{"theta", {K::Scalar, 0}},
        {"L", {K::Operator, 1}},
        {"L_f", {K::Operator, 1}},
        {"kappa", {K::Scalar, 2}},
        {"xi", {K::Scalar, 2}},
        {"G0", {K::Scalar, 0}},
        {"A", {K::Scalar, 1}},
        {"phi", {K::Scalar, 0}},
        {"amp_mode", {K::Word}}}},
      {"channel",
       {{"op", {K::Operator, 1}}, {"rate", {K::Scalar, 0}}, {"bath", {K::Word}}, {"N", {K::Scalar, 0}},
        {"M", {K::Scalar, 0}}}},
      {"quartic",
       {{"mode", {K::Word}},
        {"G1", {K::Scalar, 0}},
        {"G3", {K::Scalar, 0}},
        {"gamma", {K::Scalar, 2}},
        {"gamma1", {K::Scalar, 2}},
        {"gamma2", {K::Scalar, 2}},
        {"gamma3", {K::Scalar, 2}},
        {"A1", {K::Scalar, 1}},
        {"A3", {K::Scalar, 1}},
        {"A4", {K::Scalar, 1}}}},
      {"run",
       {{"task", {K::Tasks}},
        {"t_max", {K::Scalar, -2}},
        {"n_points", {K::Integer}},
        {"initial_state", {K::State}},
        {"compensate_linear", {K::Flag}},
        {"high_gain", {K::Flag}},
        {"observe", {K::Word}},
        {"tau_max", {K::Scalar, -2}},
        {"tau_points", {K::Integer}},
        {"kappa_ratios", {K::Ratios}},
        {"gamma_ref", {K::Scalar, 2}},
        {"t_probe", {K::Scalar, -2}},
        {"plant_truncation", {K::Integer}},
        {"amp_truncation", {K::Integer}},
        {"leak_threshold", {K::Scalar, 0}}}},
  };
  return s;
}

const std::set<std::string, std::less<>> kTasks{"evolve", "steady",      "g2",           "fano",
                                                "nongauss", "kerr-coeffs", "quartic-coeffs", "oracle-sweep"};

bool named_kind(std::string_view k) { return k == "loop" || k == "channel"; }

std::string dim_text(int d) {
  if (d == 0) return "dimensionless";
  if (d % 2 == 0) return "rate^" + std::to_string(d / 2);
  return "rate^(" + std::to_string(d) + "/2)";
}

struct Dim {
  int dim = 0;
  bool has_unit = false;
  bool has_op = false;
};

Dim analyse(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number:
    case K::Imaginary:
      if (e.unit.empty()) return {};
      return {units().find(e.unit)->second.dim, true, false};
    case K::Constant:
      return {};
    case K::Ladder:
    case K::Monomial:
      return {0, false, true};
    case K::Pair: {
      const Dim r = analyse(e.args[0]), i = analyse(e.args[1]);
      if (r.dim != 0 || i.dim != 0 || r.has_op || i.has_op)
        fail("complex pair entries must be dimensionless scalars", e.loc);
      return {};
    }
    case K::Sqrt: {
      const Dim d = analyse(e.args[0]);
      if (d.has_op) fail("sqrt() takes a scalar", e.loc);
      if (d.dim % 2 != 0) fail("sqrt() of " + dim_text(d.dim) + " is not a supported dimension", e.loc);
      return {d.dim / 2, d.has_unit, false};
    }
    case K::Negate:
      return analyse(e.args[0]);
    case K::Add:
    case K::Sub: {
      const Dim l = analyse(e.args[0]), r = analyse(e.args[1]);
      if (l.dim != r.dim)
        fail("dimension mismatch: " + dim_text(l.dim) + " " + (e.kind == K::Add ? "+" : "-") + " " +
                 dim_text(r.dim),
             e.loc);
      return {l.dim, l.has_unit || r.has_unit, l.has_op || r.has_op};
    }
    case K::Mul: {
      const Dim l = analyse(e.args[0]), r = analyse(e.args[1]);
      return {l.dim + r.dim, l.has_unit || r.has_unit, l.has_op || r.has_op};
    }
    case K::Div: {
      const Dim l = analyse(e.args[0]), r = analyse(e.args[1]);
      if (r.has_op) fail("cannot divide by an operator", e.loc);
      return {l.dim - r.dim, l.has_unit || r.has_unit, l.has_op};
    }
    case K::Pow: {
      const Dim b = analyse(e.args[0]);
      return {b.dim * e.exponent, b.has_unit, b.has_op};
    }
  }
  return {};
}

void collect_modes(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::Ladder || e.kind == Expr::Kind::Monomial) out.push_back(&e);
  for (const auto& a : e.args) collect_modes(a, out);
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (true) {
    std::size_t c = s.find(',', b);
    out.push_back(trim(s.substr(b, c == std::string_view::npos ? s.npos : c - b)));
    if (c == std::string_view::npos) return out;
    b = c + 1;
  }
}

bool parse_double(std::string_view s, double& v) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

void check_state(const std::string& s, Location loc) {
  if (s == "vacuum") return;
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') fail("bad initial_state '" + s + "'", loc);
  const std::string head = trim(std::string_view(s).substr(0, open));
  const auto args = split_list(std::string_view(s).substr(open + 1, s.size() - open - 2));
  std::vector<double> v;
  for (const auto& a : args) {
    double x = 0;
    if (!parse_double(a, x)) fail("bad number '" + a + "' in initial_state", loc);
    v.push_back(x);
  }
  if (head == "fock" && v.size() == 1 && v[0] >= 0 && v[0] == std::floor(v[0])) return;
  if (head == "coherent" && (v.size() == 1 || v.size() == 2)) return;
  if (head == "thermal" && v.size() == 1 && v[0] >= 0) return;
  fail("initial_state must be vacuum, fock(n), coherent(re[, im]) or thermal(nbar); found '" + s + "'", loc);
}

void check_raw(const Entry& en, ValueKind kind) {
  const auto& s = std::get<std::string>(en.value);
  switch (kind) {
    case ValueKind::Word:
      if (!is_identifier(s)) fail("expected a single word, found '" + s + "'", en.loc);
      break;
    case ValueKind::Flag:
      if (s != "true" && s != "false") fail("expected true or false, found '" + s + "'", en.loc);
      break;
    case ValueKind::Tasks:
      for (const auto& t : split_list(s))
        if (!kTasks.count(t)) fail("unknown task '" + t + "'", en.loc);
      break;
    case ValueKind::Ratios:
      for (const auto& t : split_list(s)) {
        double v = 0;
        if (!parse_double(t, v) || v <= 0) fail("kappa_ratios entries must be positive numbers, found '" + t + "'", en.loc);
      }
      break;
    case ValueKind::State:
      check_state(s, en.loc);
      break;
    default:
      break;
  }
}

bool raw_kind(ValueKind k) {
  return k == ValueKind::Word || k == ValueKind::Flag || k == ValueKind::Tasks || k == ValueKind::Ratios ||
         k == ValueKind::State;
}

void check_value(const Entry& en, const KeySpec& spec) {
  const Expr& e = std::get<Expr>(en.value);
  const Dim d = analyse(e);
  if (spec.kind == ValueKind::Integer) {
    if (e.kind != Expr::Kind::Number || !e.unit.empty() || e.value != std::floor(e.value) || e.value < 0)
      fail("'" + en.key + "' must be a non-negative integer", e.loc);
    return;
  }
  if (spec.kind == ValueKind::Scalar && d.has_op) fail("'" + en.key + "' must be a scalar, not an operator", e.loc);
  if (d.dim != spec.dim) {
    if (spec.dim != 0 && !d.has_unit)
      fail("unit suffix missing on '" + en.key + "' (expected " + dim_text(spec.dim) + ")", e.loc);
    fail("'" + en.key + "' has dimension " + dim_text(d.dim) + ", expected " + dim_text(spec.dim), e.loc);
  }
}

}  // namespace

// ---------------------------------------------------------------- parse

Netlist parse(std::string_view text) {
  Netlist out;
  std::set<std::string> seen;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    if (first == line.size()) {
      if (nl == text.size()) break;
      continue;
    }
    const Location loc{lineno, static_cast<int>(first) + 1};

    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string_view::npos) fail("unterminated section header", loc);
      if (!trim(line.substr(close + 1)).empty())
        fail("unexpected text after section header", {lineno, static_cast<int>(close) + 2});
      std::string inner = trim(line.substr(first + 1, close - first - 1));
      Section s;
      s.loc = loc;
      const auto sp = inner.find_first_of(" \t");
      s.kind = inner.substr(0, sp);
      if (sp != std::string::npos) s.name = trim(std::string_view(inner).substr(sp));
      if (!schema().count(s.kind)) fail("unknown section '" + s.kind + "'", loc);
      if (named_kind(s.kind)) {
        if (!is_identifier(s.name)) fail("[" + s.kind + "] needs an identifier, e.g. [" + s.kind + " k1]", loc);
        if (!seen.insert(s.kind + " " + s.name).second) fail("duplicate " + s.kind + " id '" + s.name + "'", loc);
      } else {
        if (!s.name.empty()) fail("[" + s.kind + "] takes no id", loc);
        if (!seen.insert(s.kind).second) fail("duplicate section [" + s.kind + "]", loc);
      }
      out.sections.push_back(std::move(s));
      if (nl == text.size()) break;
      continue;
    }

    if (out.sections.empty()) fail("entry outside any section", loc);
    Section& sec = out.sections.back();
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'", loc);
    const std::string key = trim(line.substr(first, eq - first));
    if (!is_identifier(key)) fail("bad key '" + key + "'", loc);
    if (sec.find(key)) fail("duplicate key '" + key + "'", loc);

    std::size_t vstart = eq + 1;
    while (vstart < line.size() && std::isspace(static_cast<unsigned char>(line[vstart]))) ++vstart;
    const Location vloc{lineno, static_cast<int>(vstart) + 1};
    const std::string raw = trim(line.substr(vstart));
    if (raw.empty()) fail("missing value for '" + key + "'", vloc);

    Entry en;
    en.key = key;
    en.loc = vloc;
    KeySpec spec{ValueKind::Integer};
    if (sec.kind != "modes") {
      const auto& keys = schema().find(sec.kind)->second;
      auto it = keys.find(key);
      if (it == keys.end()) fail("unknown key '" + key + "' in [" + sec.kind + "]", loc);
      spec = it->second;
    }
    if (raw_kind(spec.kind)) {
      en.value = raw;
      check_raw(en, spec.kind);
    } else {
      en.value = ExprParser(Lexer(line.substr(vstart), vloc).run()).parse_all();
      check_value(en, spec);
    }
    sec.entries.push_back(std::move(en));
    if (nl == text.size()) break;
  }

  // mode labels
  std::vector<std::string> labels;
  if (const Section* m = out.find("modes")) {
    for (const auto& e : m->entries) {
      if (std::get<Expr>(e.value).value < 2) fail("mode '" + e.key + "' needs at least 2 levels", e.loc);
      labels.push_back(e.key);
    }
  }
  if (labels.empty()) fail("no modes declared (add a [modes] section)", {1, 1});
  auto declared = [&](const std::string& l) { return std::find(labels.begin(), labels.end(), l) != labels.end(); };
  for (auto& sec : out.sections) {
    for (auto& en : sec.entries) {
      if (sec.kind == "modes") continue;
      if (const Expr* ex = en.expr()) {
        std::vector<const Expr*> refs;
        collect_modes(*ex, refs);
        for (const Expr* r : refs) {
          if (r->mode.empty() && labels.size() > 1)
            fail("operator '" + (r->name.empty() ? std::string("[...]") : r->name) +
                     "' needs a mode label (@label) when several modes are declared",
                 r->loc);
          if (!r->mode.empty() && !declared(r->mode))
            fail("unknown mode label '" + r->mode + "'", r->loc);
        }
      } else if ((en.key == "observe" || en.key == "mode") && !declared(std::get<std::string>(en.value))) {
        fail("unknown mode label '" + std::get<std::string>(en.value) + "'", en.loc);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- print

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Negate:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const Expr& e, int min_prec, std::string& s) {
  const bool paren = precedence(e) < min_prec;
  if (paren) s += '(';
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Number:
    case K::Imaginary:
      s += num(e.value);
      if (e.kind == K::Imaginary) s += 'i';
      if (!e.unit.empty()) s += " " + e.unit;
      break;
    case K::Constant:
      s += e.name;
      break;
    case K::Ladder:
      s += e.name;
      if (!e.mode.empty()) s += "@" + e.mode;
      break;
    case K::Monomial:
      s += "[ad^" + std::to_string(e.creation) + " a^" + std::to_string(e.annihilation) + "]";
      if (!e.mode.empty()) s += "@" + e.mode;
      break;
    case K::Pair:
      s += '(';
      emit(e.args[0], 0, s);
      s += ", ";
      emit(e.args[1], 0, s);
      s += ')';
      break;
    case K::Sqrt:
      s += "sqrt(";
      emit(e.args[0], 0, s);
      s += ')';
      break;
    case K::Negate:
      s += '-';
      emit(e.args[0], 3, s);
      break;
    case K::Add:
    case K::Sub:
      emit(e.args[0], 1, s);
      s += e.kind == K::Add ? " + " : " - ";
      emit(e.args[1], 2, s);
      break;
    case K::Mul:
    case K::Div:
      emit(e.args[0], 2, s);
      s += e.kind == K::Mul ? "*" : "/";
      emit(e.args[1], 3, s);
      break;
    case K::Pow:
      emit(e.args[0], 5, s);
      s += "^" + std::to_string(e.exponent);
      break;
  }
  if (paren) s += ')';
}

}  // namespace

std::string print(const Expr& e) {
  std::string s;
  emit(e, 0, s);
  return s;
}

std::string print(const Netlist& n) {
  std::string s;
  for (const auto& sec : n.sections) {
    if (!s.empty()) s += '\n';
    s += "[" + sec.kind + (sec.name.empty() ? "" : " " + sec.name) + "]\n";
    for (const auto& en : sec.entries) {
      s += en.key + " = ";
      if (const Expr* e = en.expr())
        s += print(*e);
      else
        s += std::get<std::string>(en.value);
      s += '\n';
    }
  }
  return s;
}

// ---------------------------------------------------------------- overrides

namespace {

Expr* first_number(Expr& e) {
  if (e.kind == Expr::Kind::Number) return &e;
  for (auto& a : e.args)
    if (Expr* f = first_number(a)) return f;
  return nullptr;
}

}  // namespace

void override_value(Netlist& n, std::string_view path, double value) {
  const auto d1 = path.find('.');
  const auto d2 = path.rfind('.');
  if (d1 == std::string_view::npos) fail("sweep parameter '" + std::string(path) + "' must be section[.id].key", {0, 0});
  const std::string kind(path.substr(0, d1));
  const std::string name = d1 == d2 ? "" : std::string(path.substr(d1 + 1, d2 - d1 - 1));
  const std::string key(path.substr(d2 + 1));
  Section* sec = n.find(kind, name);
  if (!sec) fail("no section matching '" + std::string(path) + "'", {0, 0});
  Entry* en = nullptr;
  for (auto& e : sec->entries)
    if (e.key == key) en = &e;
  if (!en || !en->expr()) fail("no numeric key matching '" + std::string(path) + "'", sec->loc);
  Expr* lit = first_number(std::get<Expr>(en->value));
  if (!lit) fail("'" + std::string(path) + "' holds no numeric literal to replace", en->loc);
  if (value < 0) {
    Expr inner = *lit;
    inner.value = -value;
    Expr neg;
    neg.kind = Expr::Kind::Negate;
    neg.loc = lit->loc;
    neg.args.push_back(std::move(inner));
    *lit = std::move(neg);
  } else {
    lit->value = value;
  }
}

void override_truncation(Netlist& n, std::string_view label, int levels) {
  Section* m = n.find("modes");
  if (m)
    for (auto& e : m->entries)
      if (e.key == label) {
        if (levels < 2) fail("truncation override for '" + e.key + "' needs at least 2 levels", e.loc);
        std::get<Expr>(e.value).value = levels;
        return;
      }
  fail("truncation override names undeclared mode '" + std::string(label) + "'", {0, 0});
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qcfb::netlist
