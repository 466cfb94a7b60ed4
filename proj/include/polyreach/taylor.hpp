#pragma once

// Taylor model arithmetic: (polynomial, remainder interval) pairs over a
// domain box. Every coefficient operation is computed in interval
// arithmetic; the midpoint becomes the stored coefficient and the leftover
// slack, scaled by the monomial's range over the domain, is folded into the
// remainder. Pointwise containment f(x) in p(x) + rem therefore survives
// floating-point rounding, not just exact real arithmetic.

#include <string>
#include <vector>

#include "polyreach/interval.hpp"
#include "polyreach/poly.hpp"

namespace polyreach {

struct TaylorModel {
  MultiPoly poly;
  Interval rem;
  Box domain;
  int order = 1;
};

TaylorModel tm_const(double c, std::vector<std::string> vars, Box domain, int order);
TaylorModel tm_const_iv(const Interval& c, std::vector<std::string> vars, Box domain, int order);
TaylorModel tm_identity(std::size_t j, std::vector<std::string> vars, Box domain, int order);

TaylorModel tm_add(const TaylorModel& a, const TaylorModel& b);
TaylorModel tm_sub(const TaylorModel& a, const TaylorModel& b);
TaylorModel tm_scale(const TaylorModel& a, double c);
TaylorModel tm_scale_iv(const TaylorModel& a, const Interval& c);
TaylorModel tm_add_const(const TaylorModel& a, const Interval& c);
TaylorModel tm_mul(const TaylorModel& a, const TaylorModel& b, int order);

Interval tm_enclosure(const TaylorModel& a);

// Encloses outer(f_1(x),...,f_q(x)) for any selections f_i within the args.
TaylorModel tm_compose_poly(const MultiPoly& outer, const std::vector<TaylorModel>& args,
                            int order);

TaylorModel tm_ipow(const TaylorModel& a, unsigned n, int order);

// Taylor expansion of sin/cos about the midpoint of the argument's
// enclosure, Lagrange remainder w^(k+1)/(k+1)! (all derivative magnitudes
// are <= 1).
TaylorModel tm_elem_sin(const TaylorModel& a, int order);
TaylorModel tm_elem_cos(const TaylorModel& a, int order);

// Append a fresh variable (used for local time) with the given range.
TaylorModel tm_append_var(const TaylorModel& a, const std::string& name, const Interval& range);

// Substitute the last variable by the point value and drop it.
TaylorModel tm_subst_last(const TaylorModel& a, double value);

}  // namespace polyreach
