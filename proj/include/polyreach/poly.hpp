#pragma once

// Sparse multivariate polynomials in the power basis. Exact ring operations
// over double coefficients; canonical form keeps no zero terms.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polyreach/interval.hpp"

namespace polyreach {

using ExpVec = std::vector<std::uint32_t>;

struct MultiPoly {
  std::vector<std::string> vars;        // ordered variable names
  std::map<ExpVec, double> terms;       // exponent vector -> coefficient, no zeros

  static MultiPoly zero(std::vector<std::string> vars);
  static MultiPoly constant(std::vector<std::string> vars, double c);
  static MultiPoly var(std::vector<std::string> vars, std::size_t j);

  std::size_t nvars() const { return vars.size(); }
  bool is_zero() const { return terms.empty(); }
  unsigned total_degree() const;

  // Drops exact-zero coefficients (canonical form).
  void prune();
};

double poly_eval(const MultiPoly& p, std::span<const double> x);
MultiPoly poly_add(const MultiPoly& p, const MultiPoly& q);
MultiPoly poly_sub(const MultiPoly& p, const MultiPoly& q);
MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q);
MultiPoly poly_scale(const MultiPoly& p, double c);

// q with q(x) = p(scale .* x + shift), expanded to the power basis.
MultiPoly poly_affine_compose(const MultiPoly& p, std::span<const double> scale,
                              std::span<const double> shift);

// Sound interval enclosure of p's range over the box (monomial-wise interval
// evaluation; even powers handled tightly through ipow).
Interval poly_bound(const MultiPoly& p, const Box& b);

// Range of a single monomial over the box.
Interval monomial_bound(const ExpVec& e, const Box& b);

std::string poly_to_string(const MultiPoly& p);

}  // namespace polyreach
