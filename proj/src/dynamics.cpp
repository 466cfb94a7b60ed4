#include "polyreach/dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace polyreach {

namespace {

Expr make(ExprNode n) { return Expr{std::make_shared<const ExprNode>(std::move(n))}; }

bool is_const(const Expr& e, double v) {
  return e.node->kind == ExprKind::constant && e.node->value == v;
}

// Exact double arithmetic tests: fold only when no rounding occurred.
bool exact_add(double a, double b, double& out) {
  double s = a + b;
  if (!std::isfinite(s)) return false;
  double bv = s - a;
  double err = (a - (s - bv)) + (b - bv);
  if (err != 0.0) return false;
  out = s;
  return true;
}

bool exact_mul(double a, double b, double& out) {
  double p = a * b;
  if (!std::isfinite(p)) return false;
  if (p != 0.0 && std::fabs(p) < 1e-300) return false;
  if (std::fma(a, b, -p) != 0.0) return false;
  out = p;
  return true;
}

bool exact_div(double a, double b, double& out) {
  double q = a / b;
  if (!std::isfinite(q)) return false;
  if (q != 0.0 && std::fabs(q) < 1e-300) return false;
  if (std::fma(q, b, -a) != 0.0) return false;
  out = q;
  return true;
}

}  // namespace

Expr e_const(double v) {
  ExprNode n;
  n.kind = ExprKind::constant;
  n.value = v;
  return make(std::move(n));
}

Expr e_state(int idx) {
  ExprNode n;
  n.kind = ExprKind::state;
  n.index = idx;
  return make(std::move(n));
}

Expr e_control(int idx) {
  ExprNode n;
  n.kind = ExprKind::control;
  n.index = idx;
  return make(std::move(n));
}

Expr e_neg(const Expr& a) {
  if (a.node->kind == ExprKind::constant) return e_const(-a.node->value);
  if (a.node->kind == ExprKind::neg) return a.node->a;
  ExprNode n;
  n.kind = ExprKind::neg;
  n.a = a;
  return make(std::move(n));
}

Expr e_add(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a.node->kind == ExprKind::constant && b.node->kind == ExprKind::constant) {
    double v;
    if (exact_add(a.node->value, b.node->value, v)) return e_const(v);
  }
  ExprNode n;
  n.kind = ExprKind::add;
  n.a = a;
  n.b = b;
  return make(std::move(n));
}

Expr e_sub(const Expr& a, const Expr& b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return e_neg(b);
  if (a.node->kind == ExprKind::constant && b.node->kind == ExprKind::constant) {
    double v;
    if (exact_add(a.node->value, -b.node->value, v)) return e_const(v);
  }
  ExprNode n;
  n.kind = ExprKind::sub;
  n.a = a;
  n.b = b;
  return make(std::move(n));
}

Expr e_mul(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return e_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a.node->kind == ExprKind::constant && b.node->kind == ExprKind::constant) {
    double v;
    if (exact_mul(a.node->value, b.node->value, v)) return e_const(v);
  }
  ExprNode n;
  n.kind = ExprKind::mul;
  n.a = a;
  n.b = b;
  return make(std::move(n));
}

Expr e_div_const(const Expr& a, double c) {
  if (c == 0.0) throw std::invalid_argument("e_div_const: zero divisor");
  if (c == 1.0) return a;
  if (is_const(a, 0.0)) return e_const(0.0);
  if (a.node->kind == ExprKind::constant) {
    double v;
    if (exact_div(a.node->value, c, v)) return e_const(v);
  }
  ExprNode n;
  n.kind = ExprKind::div_const;
  n.value = c;
  n.a = a;
  return make(std::move(n));
}

Expr e_pow(const Expr& a, unsigned n) {
  if (n == 0) return e_const(1.0);
  if (n == 1) return a;
  if (a.node->kind == ExprKind::constant) {
    double acc = 1.0, base = a.node->value;
    bool exact = true;
    for (unsigned i = 0; i < n && exact; ++i) exact = exact_mul(acc, base, acc);
    if (exact) return e_const(acc);
  }
  ExprNode nd;
  nd.kind = ExprKind::pow;
  nd.exponent = n;
  nd.a = a;
  return make(std::move(nd));
}

Expr e_sin(const Expr& a) {
  if (is_const(a, 0.0)) return e_const(0.0);
  ExprNode n;
  n.kind = ExprKind::sin;
  n.a = a;
  return make(std::move(n));
}

Expr e_cos(const Expr& a) {
  if (is_const(a, 0.0)) return e_const(1.0);
  ExprNode n;
  n.kind = ExprKind::cos;
  n.a = a;
  return make(std::move(n));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  std::span<const std::string> states;
  std::span<const std::pair<std::string, int>> controls;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(std::size_t off, const std::string& msg) { throw ExprParseError(off, msg); }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos != text.size()) fail(pos, "unexpected trailing input");
    return e;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = e_add(e, term());
      else if (eat('-'))
        e = e_sub(e, term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (eat('*')) {
        e = e_mul(e, factor());
      } else if (eat('/')) {
        skip_ws();
        std::size_t off = pos;
        Expr d = factor();
        if (d.node->kind != ExprKind::constant) fail(off, "division by non-literal divisor");
        if (d.node->value == 0.0) fail(off, "division by zero literal");
        e = e_div_const(e, d.node->value);
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (eat('-')) return e_neg(factor());
    Expr b = base();
    if (eat('^')) {
      skip_ws();
      std::size_t off = pos;
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        fail(off, "non-integer exponent");
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos < text.size() && (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
        fail(start, "non-integer exponent");
      unsigned n = 0;
      auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + pos, n);
      if (ec != std::errc()) fail(start, "malformed exponent");
      (void)ptr;
      return e_pow(b, n);
    }
    return b;
  }

  Expr base() {
    skip_ws();
    if (pos >= text.size()) fail(pos, "unexpected end of expression");
    char c = text[pos];

    if (c == '(') {
      ++pos;
      Expr e = expr();
      if (!eat(')')) fail(pos, "expected ')'");
      return e;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      std::string_view name = text.substr(start, pos - start);
      if (name == "sin" || name == "cos") {
        if (!eat('(')) fail(pos, "expected '(' after function name");
        Expr arg = expr();
        if (!eat(')')) fail(pos, "expected ')'");
        return name == "sin" ? e_sin(arg) : e_cos(arg);
      }
      for (std::size_t i = 0; i < states.size(); ++i)
        if (name == states[i]) return e_state(static_cast<int>(i));
      for (const auto& [cname, idx] : controls)
        if (name == cname) return e_control(idx);
      fail(start, "unknown identifier '" + std::string(name) + "'");
    }

    fail(pos, std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
      ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + pos, v);
    if (ec != std::errc() || ptr != text.data() + pos) fail(start, "malformed number");
    return e_const(v);
  }
};

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string> state_names,
                std::span<const std::pair<std::string, int>> control_lookup) {
  Parser p;
  p.text = text;
  p.states = state_names;
  p.controls = control_lookup;
  return p.parse();
}

Expr parse_expr(std::string_view text, std::span<const std::string> state_names,
                std::span<const std::string> control_names) {
  std::vector<std::pair<std::string, int>> lookup;
  lookup.reserve(control_names.size());
  for (std::size_t i = 0; i < control_names.size(); ++i)
    lookup.emplace_back(control_names[i], static_cast<int>(i));
  return parse_expr(text, state_names, lookup);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::add:
    case ExprKind::sub: return 1;
    case ExprKind::mul:
    case ExprKind::div_const: return 2;
    case ExprKind::neg: return 3;
    case ExprKind::pow: return 4;
    default: return 5;
  }
}

void print_rec(std::ostringstream& os, const Expr& e, std::span<const std::string> sn,
               std::span<const std::string> cn, int parent_prec) {
  const ExprNode& n = *e.node;
  int prec = precedence(n.kind);
  bool parens = prec < parent_prec;
  if (parens) os << "(";
  switch (n.kind) {
    case ExprKind::constant: {
      if (n.value < 0.0) {
        os << "(" << n.value << ")";
      } else {
        os << n.value;
      }
      break;
    }
    case ExprKind::state: os << sn[static_cast<std::size_t>(n.index)]; break;
    case ExprKind::control: os << cn[static_cast<std::size_t>(n.index)]; break;
    case ExprKind::neg:
      os << "-";
      print_rec(os, n.a, sn, cn, prec + 1);
      break;
    case ExprKind::add:
      print_rec(os, n.a, sn, cn, prec);
      os << " + ";
      print_rec(os, n.b, sn, cn, prec + 1);
      break;
    case ExprKind::sub:
      print_rec(os, n.a, sn, cn, prec);
      os << " - ";
      print_rec(os, n.b, sn, cn, prec + 1);
      break;
    case ExprKind::mul:
      print_rec(os, n.a, sn, cn, prec);
      os << "*";
      print_rec(os, n.b, sn, cn, prec + 1);
      break;
    case ExprKind::div_const:
      print_rec(os, n.a, sn, cn, prec);
      os << "/";
      if (n.value < 0.0)
        os << "(" << n.value << ")";
      else
        os << n.value;
      break;
    case ExprKind::pow:
      print_rec(os, n.a, sn, cn, prec + 1);
      os << "^" << n.exponent;
      break;
    case ExprKind::sin:
      os << "sin(";
      print_rec(os, n.a, sn, cn, 0);
      os << ")";
      break;
    case ExprKind::cos:
      os << "cos(";
      print_rec(os, n.a, sn, cn, 0);
      os << ")";
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string expr_to_string(const Expr& e, std::span<const std::string> state_names,
                           std::span<const std::string> control_names) {
  std::ostringstream os;
  os.precision(17);
  print_rec(os, e, state_names, control_names, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

double expr_eval(const Expr& e, std::span<const double> x, std::span<const double> u) {
  const ExprNode& n = *e.node;
  switch (n.kind) {
    case ExprKind::constant: return n.value;
    case ExprKind::state:
      if (static_cast<std::size_t>(n.index) >= x.size())
        throw std::out_of_range("expr_eval: unbound state variable");
      return x[static_cast<std::size_t>(n.index)];
    case ExprKind::control:
      if (static_cast<std::size_t>(n.index) >= u.size())
        throw std::out_of_range("expr_eval: unbound control variable");
      return u[static_cast<std::size_t>(n.index)];
    case ExprKind::neg: return -expr_eval(n.a, x, u);
    case ExprKind::add: return expr_eval(n.a, x, u) + expr_eval(n.b, x, u);
    case ExprKind::sub: return expr_eval(n.a, x, u) - expr_eval(n.b, x, u);
    case ExprKind::mul: return expr_eval(n.a, x, u) * expr_eval(n.b, x, u);
    case ExprKind::div_const: return expr_eval(n.a, x, u) / n.value;
    case ExprKind::pow: {
      double b = expr_eval(n.a, x, u), r = 1.0;
      for (unsigned i = 0; i < n.exponent; ++i) r *= b;
      return r;
    }
    case ExprKind::sin: return std::sin(expr_eval(n.a, x, u));
    case ExprKind::cos: return std::cos(expr_eval(n.a, x, u));
  }
  throw std::logic_error("expr_eval: bad node");
}

Interval expr_interval_eval(const Expr& e, const Box& X, const Box& U) {
  const ExprNode& n = *e.node;
  switch (n.kind) {
    case ExprKind::constant: return Interval(n.value);
    case ExprKind::state:
      if (static_cast<std::size_t>(n.index) >= X.size())
        throw std::out_of_range("expr_interval_eval: unbound state variable");
      return X[static_cast<std::size_t>(n.index)];
    case ExprKind::control:
      if (static_cast<std::size_t>(n.index) >= U.size())
        throw std::out_of_range("expr_interval_eval: unbound control variable");
      return U[static_cast<std::size_t>(n.index)];
    case ExprKind::neg: return -expr_interval_eval(n.a, X, U);
    case ExprKind::add: return expr_interval_eval(n.a, X, U) + expr_interval_eval(n.b, X, U);
    case ExprKind::sub: return expr_interval_eval(n.a, X, U) - expr_interval_eval(n.b, X, U);
    case ExprKind::mul: return expr_interval_eval(n.a, X, U) * expr_interval_eval(n.b, X, U);
    case ExprKind::div_const: return expr_interval_eval(n.a, X, U) / Interval(n.value);
    case ExprKind::pow: return ipow(expr_interval_eval(n.a, X, U), n.exponent);
    case ExprKind::sin: return sin(expr_interval_eval(n.a, X, U));
    case ExprKind::cos: return cos(expr_interval_eval(n.a, X, U));
  }
  throw std::logic_error("expr_interval_eval: bad node");
}

TaylorModel expr_tm_eval(const Expr& e, const std::vector<TaylorModel>& x_tms,
                         const std::vector<TaylorModel>& u_tms, int order, TmEvalCache* cache) {
  if (cache) {
    auto it = cache->memo.find(e.node.get());
    if (it != cache->memo.end()) return it->second;
  }
  const ExprNode& n = *e.node;
  const TaylorModel& ref = !x_tms.empty() ? x_tms.front() : u_tms.front();
  TaylorModel r;
  switch (n.kind) {
    case ExprKind::constant: r = tm_const(n.value, ref.poly.vars, ref.domain, order); break;
    case ExprKind::state:
      if (static_cast<std::size_t>(n.index) >= x_tms.size())
        throw std::out_of_range("expr_tm_eval: unbound state variable");
      r = x_tms[static_cast<std::size_t>(n.index)];
      break;
    case ExprKind::control:
      if (static_cast<std::size_t>(n.index) >= u_tms.size())
        throw std::out_of_range("expr_tm_eval: unbound control variable");
      r = u_tms[static_cast<std::size_t>(n.index)];
      break;
    case ExprKind::neg: r = tm_scale(expr_tm_eval(n.a, x_tms, u_tms, order, cache), -1.0); break;
    case ExprKind::add:
      r = tm_add(expr_tm_eval(n.a, x_tms, u_tms, order, cache),
                 expr_tm_eval(n.b, x_tms, u_tms, order, cache));
      break;
    case ExprKind::sub:
      r = tm_sub(expr_tm_eval(n.a, x_tms, u_tms, order, cache),
                 expr_tm_eval(n.b, x_tms, u_tms, order, cache));
      break;
    case ExprKind::mul:
      r = tm_mul(expr_tm_eval(n.a, x_tms, u_tms, order, cache),
                 expr_tm_eval(n.b, x_tms, u_tms, order, cache), order);
      break;
    case ExprKind::div_const:
      r = tm_scale_iv(expr_tm_eval(n.a, x_tms, u_tms, order, cache),
                      Interval(1.0) / Interval(n.value));
      break;
    case ExprKind::pow:
      r = tm_ipow(expr_tm_eval(n.a, x_tms, u_tms, order, cache), n.exponent, order);
      break;
    case ExprKind::sin:
      r = tm_elem_sin(expr_tm_eval(n.a, x_tms, u_tms, order, cache), order);
      break;
    case ExprKind::cos:
      r = tm_elem_cos(expr_tm_eval(n.a, x_tms, u_tms, order, cache), order);
      break;
    default: throw std::logic_error("expr_tm_eval: bad node");
  }
  if (cache) cache->memo.emplace(e.node.get(), r);
  return r;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

std::string node_key(const Expr& e) {
  const ExprNode& n = *e.node;
  std::ostringstream os;
  os.precision(17);
  switch (n.kind) {
    case ExprKind::constant: os << "c" << n.value; break;
    case ExprKind::state: os << "x" << n.index; break;
    case ExprKind::control: os << "u" << n.index; break;
    case ExprKind::neg: os << "n(" << node_key(n.a) << ")"; break;
    case ExprKind::add: os << "a(" << node_key(n.a) << "," << node_key(n.b) << ")"; break;
    case ExprKind::sub: os << "s(" << node_key(n.a) << "," << node_key(n.b) << ")"; break;
    case ExprKind::mul: os << "m(" << node_key(n.a) << "," << node_key(n.b) << ")"; break;
    case ExprKind::div_const: os << "d(" << node_key(n.a) << "," << n.value << ")"; break;
    case ExprKind::pow: os << "p(" << node_key(n.a) << "," << n.exponent << ")"; break;
    case ExprKind::sin: os << "S(" << node_key(n.a) << ")"; break;
    case ExprKind::cos: os << "C(" << node_key(n.a) << ")"; break;
  }
  return os.str();
}

struct Term {
  double coeff = 1.0;
  // (key, expr, exponent) factors sorted by key
  std::vector<std::tuple<std::string, Expr, unsigned>> factors;
};

void flatten_product(const Expr& e, Term& t, ExprInterner* interner);

void add_factor(Term& t, const Expr& f, unsigned exp, ExprInterner* interner) {
  Expr fi = interner ? interner->intern(f) : f;
  std::string key = node_key(fi);
  for (auto& [k, ex, n] : t.factors) {
    if (k == key) {
      n += exp;
      return;
    }
  }
  t.factors.emplace_back(std::move(key), fi, exp);
}

void flatten_product(const Expr& e, Term& t, ExprInterner* interner) {
  const ExprNode& n = *e.node;
  switch (n.kind) {
    case ExprKind::constant: {
      double v;
      if (exact_mul(t.coeff, n.value, v)) {
        t.coeff = v;
      } else {
        add_factor(t, e, 1, interner);
      }
      return;
    }
    case ExprKind::neg:
      t.coeff = -t.coeff;
      flatten_product(n.a, t, interner);
      return;
    case ExprKind::mul:
      flatten_product(n.a, t, interner);
      flatten_product(n.b, t, interner);
      return;
    case ExprKind::pow: {
      Expr base = simplify(n.a, interner);
      if (base.node->kind == ExprKind::constant) {
        flatten_product(e_pow(base, n.exponent), t, interner);
      } else {
        add_factor(t, base, n.exponent, interner);
      }
      return;
    }
    default: {
      Expr s = (n.kind == ExprKind::add || n.kind == ExprKind::sub || n.kind == ExprKind::sin ||
                n.kind == ExprKind::cos || n.kind == ExprKind::div_const)
                   ? simplify(e, interner)
                   : e;
      if (s.node->kind == ExprKind::constant) {
        flatten_product(s, t, interner);
      } else if (s.node->kind == ExprKind::mul || s.node->kind == ExprKind::neg) {
        flatten_product(s, t, interner);
      } else {
        add_factor(t, s, 1, interner);
      }
      return;
    }
  }
}

void flatten_sum(const Expr& e, bool negate, std::vector<Term>& out, ExprInterner* interner) {
  const ExprNode& n = *e.node;
  switch (n.kind) {
    case ExprKind::add:
      flatten_sum(n.a, negate, out, interner);
      flatten_sum(n.b, negate, out, interner);
      return;
    case ExprKind::sub:
      flatten_sum(n.a, negate, out, interner);
      flatten_sum(n.b, !negate, out, interner);
      return;
    case ExprKind::neg:
      flatten_sum(n.a, !negate, out, interner);
      return;
    default: {
      Term t;
      if (negate) t.coeff = -1.0;
      flatten_product(e, t, interner);
      std::sort(t.factors.begin(), t.factors.end(),
                [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
      out.push_back(std::move(t));
      return;
    }
  }
}

std::string term_key(const Term& t) {
  std::string k;
  for (const auto& [key, ex, n] : t.factors) {
    k += key;
    k += "^";
    k += std::to_string(n);
    k += ";";
  }
  return k;
}

Expr rebuild_term(const Term& t) {
  Expr prod;
  for (const auto& [key, f, n] : t.factors) {
    Expr p = e_pow(f, n);
    prod = prod.valid() ? e_mul(prod, p) : p;
  }
  if (!prod.valid()) return e_const(t.coeff);
  if (t.coeff == 1.0) return prod;
  if (t.coeff == -1.0) return e_neg(prod);
  return e_mul(e_const(t.coeff), prod);
}

}  // namespace

Expr ExprInterner::intern(const Expr& e) {
  std::string key = node_key(e);
  auto [it, inserted] = pool_.emplace(std::move(key), e);
  return it->second;
}

Expr simplify(const Expr& e, ExprInterner* interner) {
  const ExprNode& n = *e.node;
  // Non-sum roots: simplify children, rebuild through the smart constructors.
  switch (n.kind) {
    case ExprKind::constant:
    case ExprKind::state:
    case ExprKind::control: return e;
    case ExprKind::sin: return e_sin(simplify(n.a, interner));
    case ExprKind::cos: return e_cos(simplify(n.a, interner));
    case ExprKind::div_const: return e_div_const(simplify(n.a, interner), n.value);
    case ExprKind::pow: return e_pow(simplify(n.a, interner), n.exponent);
    default: break;
  }

  std::vector<Term> terms;
  flatten_sum(e, false, terms, interner);

  // Merge like terms when the coefficient sum is exact.
  std::vector<Term> merged;
  std::vector<std::string> keys;
  for (auto& t : terms) {
    if (t.coeff == 0.0) continue;
    std::string k = term_key(t);
    bool done = false;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (keys[i] == k) {
        double v;
        if (exact_add(merged[i].coeff, t.coeff, v)) {
          merged[i].coeff = v;
          done = true;
        }
        break;
      }
    }
    if (!done) {
      keys.push_back(std::move(k));
      merged.push_back(std::move(t));
    }
  }

  Expr result;
  for (const auto& t : merged) {
    if (t.coeff == 0.0) continue;
    Expr te = rebuild_term(t);
    result = result.valid() ? e_add(result, te) : te;
  }
  if (!result.valid()) return e_const(0.0);
  return result;
}

Expr diff_state(const Expr& e, int j) {
  const ExprNode& n = *e.node;
  switch (n.kind) {
    case ExprKind::constant:
    case ExprKind::control: return e_const(0.0);
    case ExprKind::state: return e_const(n.index == j ? 1.0 : 0.0);
    case ExprKind::neg: return e_neg(diff_state(n.a, j));
    case ExprKind::add: return e_add(diff_state(n.a, j), diff_state(n.b, j));
    case ExprKind::sub: return e_sub(diff_state(n.a, j), diff_state(n.b, j));
    case ExprKind::mul:
      return e_add(e_mul(diff_state(n.a, j), n.b), e_mul(n.a, diff_state(n.b, j)));
    case ExprKind::div_const: return e_div_const(diff_state(n.a, j), n.value);
    case ExprKind::pow:
      return e_mul(e_mul(e_const(static_cast<double>(n.exponent)), e_pow(n.a, n.exponent - 1)),
                   diff_state(n.a, j));
    case ExprKind::sin: return e_mul(e_cos(n.a), diff_state(n.a, j));
    case ExprKind::cos: return e_neg(e_mul(e_sin(n.a), diff_state(n.a, j)));
  }
  throw std::logic_error("diff_state: bad node");
}

Expr lie_derivative(const Expr& e, std::span<const Expr> field, ExprInterner* interner) {
  Expr acc = e_const(0.0);
  for (std::size_t j = 0; j < field.size(); ++j)
    acc = e_add(acc, e_mul(diff_state(e, static_cast<int>(j)), field[j]));
  return simplify(acc, interner);
}

}  // namespace polyreach
