#include "polyreach/taylor.hpp"

#include <map>
#include <stdexcept>

namespace polyreach {

namespace {

void check_compatible(const TaylorModel& a, const TaylorModel& b) {
  if (a.poly.vars != b.poly.vars) throw std::invalid_argument("taylor: variable-list mismatch");
  if (a.domain.size() != b.domain.size()) throw std::invalid_argument("taylor: domain mismatch");
  for (std::size_t j = 0; j < a.domain.size(); ++j)
    if (a.domain[j].lo != b.domain[j].lo || a.domain[j].hi != b.domain[j].hi)
      throw std::invalid_argument("taylor: domain mismatch");
}

unsigned total_deg(const ExpVec& e) {
  unsigned t = 0;
  for (auto x : e) t += x;
  return t;
}

// Interval-coefficient accumulator. finalize() extracts midpoints as the
// polynomial coefficients; slack and over-order terms go to the remainder.
struct PolyAccum {
  std::map<ExpVec, Interval> terms;

  void add(const ExpVec& e, const Interval& c) {
    auto [it, inserted] = terms.emplace(e, c);
    if (!inserted) it->second += c;
  }

  MultiPoly finalize(std::vector<std::string> vars, const Box& domain, int order, Interval& rem) {
    MultiPoly p = MultiPoly::zero(std::move(vars));
    for (const auto& [e, c] : terms) {
      if (order >= 0 && total_deg(e) > static_cast<unsigned>(order)) {
        rem += c * monomial_bound(e, domain);
        continue;
      }
      double mid = c.mid();
      Interval slack = c - Interval(mid);
      if (slack.lo != 0.0 || slack.hi != 0.0) rem += slack * monomial_bound(e, domain);
      if (mid != 0.0) p.terms[e] = mid;
    }
    return p;
  }
};

}  // namespace

TaylorModel tm_const(double c, std::vector<std::string> vars, Box domain, int order) {
  TaylorModel t;
  t.poly = MultiPoly::constant(std::move(vars), c);
  t.rem = Interval(0.0);
  t.domain = std::move(domain);
  t.order = order;
  return t;
}

TaylorModel tm_const_iv(const Interval& c, std::vector<std::string> vars, Box domain, int order) {
  double mid = c.mid();
  TaylorModel t = tm_const(mid, std::move(vars), std::move(domain), order);
  t.rem = c - Interval(mid);
  return t;
}

TaylorModel tm_identity(std::size_t j, std::vector<std::string> vars, Box domain, int order) {
  TaylorModel t;
  t.poly = MultiPoly::var(std::move(vars), j);
  t.rem = Interval(0.0);
  t.domain = std::move(domain);
  t.order = order;
  return t;
}

TaylorModel tm_add(const TaylorModel& a, const TaylorModel& b) {
  check_compatible(a, b);
  TaylorModel r;
  r.domain = a.domain;
  r.order = std::max(a.order, b.order);
  r.rem = a.rem + b.rem;
  PolyAccum acc;
  for (const auto& [e, c] : a.poly.terms) acc.add(e, Interval(c));
  for (const auto& [e, c] : b.poly.terms) acc.add(e, Interval(c));
  r.poly = acc.finalize(a.poly.vars, r.domain, -1, r.rem);
  return r;
}

TaylorModel tm_sub(const TaylorModel& a, const TaylorModel& b) {
  return tm_add(a, tm_scale(b, -1.0));
}

TaylorModel tm_scale(const TaylorModel& a, double c) { return tm_scale_iv(a, Interval(c)); }

TaylorModel tm_scale_iv(const TaylorModel& a, const Interval& c) {
  TaylorModel r;
  r.domain = a.domain;
  r.order = a.order;
  r.rem = a.rem * c;
  PolyAccum acc;
  for (const auto& [e, coef] : a.poly.terms) acc.add(e, Interval(coef) * c);
  r.poly = acc.finalize(a.poly.vars, r.domain, -1, r.rem);
  return r;
}

TaylorModel tm_add_const(const TaylorModel& a, const Interval& c) {
  TaylorModel r = a;
  double mid = c.mid();
  if (mid != 0.0) {
    PolyAccum acc;
    for (const auto& [e, coef] : r.poly.terms) acc.add(e, Interval(coef));
    acc.add(ExpVec(r.poly.nvars(), 0), Interval(mid));
    r.poly = acc.finalize(r.poly.vars, r.domain, -1, r.rem);
  }
  r.rem += c - Interval(mid);
  return r;
}

TaylorModel tm_mul(const TaylorModel& a, const TaylorModel& b, int order) {
  check_compatible(a, b);
  TaylorModel r;
  r.domain = a.domain;
  r.order = order;
  r.rem = Interval(0.0);

  PolyAccum acc;
  for (const auto& [ea, ca] : a.poly.terms) {
    for (const auto& [eb, cb] : b.poly.terms) {
      ExpVec e(ea.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
      acc.add(e, Interval(ca) * Interval(cb));
    }
  }
  r.poly = acc.finalize(a.poly.vars, r.domain, order, r.rem);

  // Cross terms p_a*rem_b + p_b*rem_a + rem_a*rem_b.
  Interval pa = poly_bound(a.poly, a.domain);
  Interval pb = poly_bound(b.poly, b.domain);
  r.rem += pa * b.rem + pb * a.rem + a.rem * b.rem;
  return r;
}

Interval tm_enclosure(const TaylorModel& a) { return poly_bound(a.poly, a.domain) + a.rem; }

TaylorModel tm_ipow(const TaylorModel& a, unsigned n, int order) {
  if (n == 0) return tm_const(1.0, a.poly.vars, a.domain, order);
  TaylorModel result = a;
  for (unsigned i = 1; i < n; ++i) result = tm_mul(result, a, order);
  return result;
}

TaylorModel tm_compose_poly(const MultiPoly& outer, const std::vector<TaylorModel>& args,
                            int order) {
  if (args.size() != outer.nvars()) throw std::invalid_argument("tm_compose_poly: arity mismatch");
  if (args.empty()) throw std::invalid_argument("tm_compose_poly: no arguments");
  for (std::size_t i = 1; i < args.size(); ++i) check_compatible(args[0], args[i]);

  const auto& vars = args[0].poly.vars;
  const Box& domain = args[0].domain;

  // Per-argument power cache.
  std::vector<std::vector<TaylorModel>> pw(args.size());
  auto power = [&](std::size_t i, std::uint32_t e) -> const TaylorModel& {
    auto& cache = pw[i];
    if (cache.empty()) cache.push_back(args[i]);  // cache[0] = arg^1
    while (cache.size() < e) cache.push_back(tm_mul(cache.back(), args[i], order));
    return cache[e - 1];
  };

  TaylorModel result = tm_const(0.0, vars, domain, order);
  for (const auto& [e, c] : outer.terms) {
    TaylorModel term = tm_const(c, vars, domain, order);
    bool first = true;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (e[i] == 0) continue;
      if (first && c == 1.0) {
        term = power(i, e[i]);
        first = false;
        continue;
      }
      term = tm_mul(term, power(i, e[i]), order);
      first = false;
    }
    result = tm_add(result, term);
  }
  return result;
}

namespace {

TaylorModel tm_elem_trig(const TaylorModel& a, int order, bool is_sin) {
  Interval J = tm_enclosure(a);
  if (!std::isfinite(J.lo) || !std::isfinite(J.hi))
    throw std::runtime_error("tm_elem_trig: unbounded argument");
  const double c = J.mid();

  // Derivative cycle values at c, as enclosures of the libm results.
  Interval sin_c = libm_point(std::sin(c));
  Interval cos_c = libm_point(std::cos(c));
  auto deriv = [&](int i) -> Interval {
    int phase = ((is_sin ? i : i + 1) % 4 + 4) % 4;
    switch (phase) {
      case 0: return sin_c;
      case 1: return cos_c;
      case 2: return -sin_c;
      default: return -cos_c;
    }
  };

  TaylorModel delta = tm_add_const(a, Interval(-c));
  std::vector<TaylorModel> dpow;  // delta^i

  TaylorModel result = tm_const_iv(deriv(0), a.poly.vars, a.domain, order);
  Interval fact(1.0);
  for (int i = 1; i <= order; ++i) {
    fact = fact * Interval(static_cast<double>(i));
    if (dpow.empty())
      dpow.push_back(delta);
    else
      dpow.push_back(tm_mul(dpow.back(), delta, order));
    Interval coef = deriv(i) / fact;
    result = tm_add(result, tm_scale_iv(dpow.back(), coef));
  }

  // |R| <= w^(k+1)/(k+1)! with w = sup |delta| over the domain.
  fact = fact * Interval(static_cast<double>(order + 1));
  double w = (J - Interval(c)).mag();
  Interval wpow = ipow(Interval(w), static_cast<unsigned>(order) + 1);
  double rbound = rnd::div_up(wpow.hi, fact.lo);
  result.rem += Interval(-rbound, rbound);

  // sin/cos never leave [-1,1]; intersect the remainder accordingly.
  Interval pb = poly_bound(result.poly, result.domain);
  Interval clip = Interval(-1.0, 1.0) - pb;
  if (clip.lo > result.rem.lo || clip.hi < result.rem.hi) {
    Interval r;
    r.lo = std::max(result.rem.lo, clip.lo);
    r.hi = std::min(result.rem.hi, clip.hi);
    if (r.lo <= r.hi) result.rem = r;
  }
  return result;
}

}  // namespace

TaylorModel tm_elem_sin(const TaylorModel& a, int order) { return tm_elem_trig(a, order, true); }
TaylorModel tm_elem_cos(const TaylorModel& a, int order) { return tm_elem_trig(a, order, false); }

TaylorModel tm_append_var(const TaylorModel& a, const std::string& name, const Interval& range) {
  TaylorModel r;
  r.order = a.order;
  r.rem = a.rem;
  r.domain = a.domain;
  r.domain.dims.push_back(range);
  std::vector<std::string> vars = a.poly.vars;
  vars.push_back(name);
  r.poly = MultiPoly::zero(vars);
  for (const auto& [e, c] : a.poly.terms) {
    ExpVec e2 = e;
    e2.push_back(0);
    r.poly.terms[e2] = c;
  }
  return r;
}

TaylorModel tm_subst_last(const TaylorModel& a, double value) {
  if (a.poly.nvars() == 0) throw std::invalid_argument("tm_subst_last: no variables");
  const std::size_t last = a.poly.nvars() - 1;
  if (!a.domain[last].contains(value))
    throw std::invalid_argument("tm_subst_last: value outside the variable's range");

  TaylorModel r;
  r.order = a.order;
  r.rem = a.rem;
  r.domain = a.domain;
  r.domain.dims.pop_back();
  std::vector<std::string> vars = a.poly.vars;
  vars.pop_back();

  PolyAccum acc;
  for (const auto& [e, c] : a.poly.terms) {
    ExpVec e2(e.begin(), e.end() - 1);
    Interval coef = Interval(c) * ipow(Interval(value), e[last]);
    acc.add(e2, coef);
  }
  r.poly = acc.finalize(vars, r.domain, -1, r.rem);
  return r;
}

}  // namespace polyreach
