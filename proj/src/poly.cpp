#include "polyreach/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polyreach {

namespace {

void check_same_vars(const MultiPoly& p, const MultiPoly& q) {
  if (p.vars != q.vars) throw std::invalid_argument("poly: variable-list mismatch");
}

}  // namespace

MultiPoly MultiPoly::zero(std::vector<std::string> vars) {
  MultiPoly p;
  p.vars = std::move(vars);
  return p;
}

MultiPoly MultiPoly::constant(std::vector<std::string> vars, double c) {
  MultiPoly p = zero(std::move(vars));
  if (c != 0.0) p.terms[ExpVec(p.vars.size(), 0)] = c;
  return p;
}

MultiPoly MultiPoly::var(std::vector<std::string> vars, std::size_t j) {
  MultiPoly p = zero(std::move(vars));
  if (j >= p.vars.size()) throw std::invalid_argument("MultiPoly::var: index out of range");
  ExpVec e(p.vars.size(), 0);
  e[j] = 1;
  p.terms[e] = 1.0;
  return p;
}

unsigned MultiPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms) {
    unsigned t = 0;
    for (auto x : e) t += x;
    d = std::max(d, t);
  }
  return d;
}

void MultiPoly::prune() {
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->second == 0.0)
      it = terms.erase(it);
    else
      ++it;
  }
}

double poly_eval(const MultiPoly& p, std::span<const double> x) {
  if (x.size() != p.nvars()) throw std::invalid_argument("poly_eval: dimension mismatch");
  // Precompute per-variable power tables up to the max exponent used.
  std::vector<std::uint32_t> maxe(p.nvars(), 0);
  for (const auto& [e, c] : p.terms)
    for (std::size_t j = 0; j < e.size(); ++j) maxe[j] = std::max(maxe[j], e[j]);
  std::vector<std::vector<double>> pw(p.nvars());
  for (std::size_t j = 0; j < p.nvars(); ++j) {
    pw[j].resize(maxe[j] + 1);
    pw[j][0] = 1.0;
    for (std::uint32_t k = 1; k <= maxe[j]; ++k) pw[j][k] = pw[j][k - 1] * x[j];
  }
  double acc = 0.0;
  for (const auto& [e, c] : p.terms) {
    double t = c;
    for (std::size_t j = 0; j < e.size(); ++j) t *= pw[j][e[j]];
    acc += t;
  }
  return acc;
}

MultiPoly poly_add(const MultiPoly& p, const MultiPoly& q) {
  check_same_vars(p, q);
  MultiPoly r = p;
  for (const auto& [e, c] : q.terms) {
    auto [it, inserted] = r.terms.emplace(e, c);
    if (!inserted) it->second += c;
  }
  r.prune();
  return r;
}

MultiPoly poly_sub(const MultiPoly& p, const MultiPoly& q) {
  return poly_add(p, poly_scale(q, -1.0));
}

MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q) {
  check_same_vars(p, q);
  MultiPoly r = MultiPoly::zero(p.vars);
  for (const auto& [ea, ca] : p.terms) {
    for (const auto& [eb, cb] : q.terms) {
      ExpVec e(ea.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
      r.terms[e] += ca * cb;
    }
  }
  r.prune();
  return r;
}

MultiPoly poly_scale(const MultiPoly& p, double c) {
  MultiPoly r = MultiPoly::zero(p.vars);
  if (c == 0.0) return r;
  for (const auto& [e, coef] : p.terms) r.terms[e] = coef * c;
  r.prune();
  return r;
}

MultiPoly poly_affine_compose(const MultiPoly& p, std::span<const double> scale,
                              std::span<const double> shift) {
  const std::size_t m = p.nvars();
  if (scale.size() != m || shift.size() != m)
    throw std::invalid_argument("poly_affine_compose: dimension mismatch");
  for (double s : scale)
    if (s == 0.0) throw std::invalid_argument("poly_affine_compose: zero scale component");

  std::vector<std::uint32_t> maxe(m, 0);
  for (const auto& [e, c] : p.terms)
    for (std::size_t j = 0; j < m; ++j) maxe[j] = std::max(maxe[j], e[j]);

  // Power tables of the linear replacements l_j = scale_j x_j + shift_j.
  std::vector<std::vector<MultiPoly>> pw(m);
  for (std::size_t j = 0; j < m; ++j) {
    MultiPoly lin = poly_add(poly_scale(MultiPoly::var(p.vars, j), scale[j]),
                             MultiPoly::constant(p.vars, shift[j]));
    pw[j].push_back(MultiPoly::constant(p.vars, 1.0));
    for (std::uint32_t k = 1; k <= maxe[j]; ++k) pw[j].push_back(poly_mul(pw[j].back(), lin));
  }

  MultiPoly r = MultiPoly::zero(p.vars);
  for (const auto& [e, c] : p.terms) {
    MultiPoly t = MultiPoly::constant(p.vars, c);
    for (std::size_t j = 0; j < m; ++j)
      if (e[j] > 0) t = poly_mul(t, pw[j][e[j]]);
    r = poly_add(r, t);
  }
  return r;
}

Interval monomial_bound(const ExpVec& e, const Box& b) {
  Interval r(1.0);
  for (std::size_t j = 0; j < e.size(); ++j)
    if (e[j] > 0) r = r * ipow(b[j], e[j]);
  return r;
}

Interval poly_bound(const MultiPoly& p, const Box& b) {
  if (b.size() != p.nvars()) throw std::invalid_argument("poly_bound: dimension mismatch");
  Interval acc(0.0);
  for (const auto& [e, c] : p.terms) acc += Interval(c) * monomial_bound(e, b);
  return acc;
}

std::string poly_to_string(const MultiPoly& p) {
  if (p.terms.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : p.terms) {
    double coef = c;
    if (first) {
      if (coef < 0) {
        os << "-";
        coef = -coef;
      }
    } else {
      os << (coef < 0 ? " - " : " + ");
      coef = std::fabs(coef);
    }
    first = false;
    bool has_var = false;
    for (auto x : e)
      if (x > 0) has_var = true;
    if (!has_var || coef != 1.0) os << coef;
    bool star = !has_var || coef != 1.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      if (star) os << "*";
      os << p.vars[j];
      if (e[j] > 1) os << "^" << e[j];
      star = true;
    }
  }
  return os.str();
}

}  // namespace polyreach
