#pragma once

// Plant ODE right-hand sides: a small expression language over state and
// control variables with exact, interval, and Taylor-model evaluation plus
// symbolic differentiation for time-Taylor (Lie derivative) expansion.
//
// Grammar:  expr   := term (('+'|'-') term)*
//           term   := factor (('*'|'/') factor)*
//           factor := '-' factor | base ('^' uint)?
//           base   := number | ident | '(' expr ')' | ('sin'|'cos') '(' expr ')'
// Precedence ^ > unary - > * / > + -, left-associative binaries, divisors
// must be nonzero literals.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polyreach/interval.hpp"
#include "polyreach/taylor.hpp"

namespace polyreach {

enum class ExprKind { constant, state, control, neg, add, sub, mul, div_const, pow, sin, cos };

struct ExprNode;

struct Expr {
  std::shared_ptr<const ExprNode> node;
  bool valid() const { return node != nullptr; }
};

struct ExprNode {
  ExprKind kind;
  double value = 0.0;     // constant, or the literal divisor of div_const
  int index = 0;          // state/control variable index
  unsigned exponent = 0;  // pow
  Expr a, b;
};

// Smart constructors; they fold constants only when the double result is
// exact, so folding never perturbs what the sound evaluators see.
Expr e_const(double v);
Expr e_state(int idx);
Expr e_control(int idx);
Expr e_neg(const Expr& a);
Expr e_add(const Expr& a, const Expr& b);
Expr e_sub(const Expr& a, const Expr& b);
Expr e_mul(const Expr& a, const Expr& b);
Expr e_div_const(const Expr& a, double c);
Expr e_pow(const Expr& a, unsigned n);
Expr e_sin(const Expr& a);
Expr e_cos(const Expr& a);

struct ExprParseError : std::runtime_error {
  std::size_t offset;
  ExprParseError(std::size_t off, const std::string& msg)
      : std::runtime_error("offset " + std::to_string(off) + ": " + msg), offset(off) {}
};

Expr parse_expr(std::string_view text, std::span<const std::string> state_names,
                std::span<const std::string> control_names);

// Variant with explicit name -> control index bindings (used for aliases,
// e.g. both "u" and "u1" naming control 0 of a single-input system).
Expr parse_expr(std::string_view text, std::span<const std::string> state_names,
                std::span<const std::pair<std::string, int>> control_lookup);

std::string expr_to_string(const Expr& e, std::span<const std::string> state_names,
                           std::span<const std::string> control_names);

double expr_eval(const Expr& e, std::span<const double> x, std::span<const double> u);
Interval expr_interval_eval(const Expr& e, const Box& X, const Box& U);

struct TmEvalCache {
  std::unordered_map<const ExprNode*, TaylorModel> memo;
};

TaylorModel expr_tm_eval(const Expr& e, const std::vector<TaylorModel>& x_tms,
                         const std::vector<TaylorModel>& u_tms, int order,
                         TmEvalCache* cache = nullptr);

// Shares structurally identical subtrees so downstream memoization is
// effective across a family of expressions.
class ExprInterner {
 public:
  Expr intern(const Expr& e);

 private:
  std::unordered_map<std::string, Expr> pool_;
};

// Conservative normal form: exact constant folding, identity elimination,
// flattened sums/products with like-term merging (no expansion).
Expr simplify(const Expr& e, ExprInterner* interner = nullptr);

// d/dx_j with controls treated as constants.
Expr diff_state(const Expr& e, int j);

// sum_j (de/dx_j) * field_j, simplified.
Expr lie_derivative(const Expr& e, std::span<const Expr> field, ExprInterner* interner = nullptr);

struct SystemSpec {
  std::vector<std::string> state_vars;
  std::size_t control_dim = 1;
  std::vector<Expr> rhs;       // one per state variable
  double control_step = 0.0;   // delta_c
  int steps = 0;               // N
  Box init;
  Box goal;
};

}  // namespace polyreach
