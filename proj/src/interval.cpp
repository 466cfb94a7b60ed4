#include "polyreach/interval.hpp"

#include <algorithm>
#include <cfloat>

namespace polyreach {

namespace rnd {

namespace {

// Knuth twosum: exact residual of a+b, valid for finite s.
inline double sum_residual(double a, double b, double s) noexcept {
  double bv = s - a;
  return (a - (s - bv)) + (b - bv);
}

}  // namespace

double add_down(double a, double b) noexcept {
  double s = a + b;
  if (!std::isfinite(s)) return s > 0 ? next_down(s) : s;
  return sum_residual(a, b, s) < 0 ? next_down(s) : s;
}

double add_up(double a, double b) noexcept {
  double s = a + b;
  if (!std::isfinite(s)) return s < 0 ? next_up(s) : s;
  return sum_residual(a, b, s) > 0 ? next_up(s) : s;
}

double mul_down(double a, double b) noexcept {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (!std::isfinite(p)) return p > 0 ? next_down(p) : p;
  if (std::fabs(p) < DBL_MIN) return next_down(p);  // residual unreliable under underflow
  return std::fma(a, b, -p) < 0 ? next_down(p) : p;
}

double mul_up(double a, double b) noexcept {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (!std::isfinite(p)) return p < 0 ? next_up(p) : p;
  if (std::fabs(p) < DBL_MIN) return next_up(p);
  return std::fma(a, b, -p) > 0 ? next_up(p) : p;
}

double div_down(double a, double b) noexcept {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (!std::isfinite(q)) return q > 0 ? next_down(q) : q;
  if (std::fabs(q) < DBL_MIN) return next_down(q);
  // exact - q = (a - q*b)/b
  double r = -std::fma(q, b, -a);
  bool exact_below = (r != 0.0) && ((r > 0) != (b > 0));
  return exact_below ? next_down(q) : q;
}

double div_up(double a, double b) noexcept {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (!std::isfinite(q)) return q < 0 ? next_up(q) : q;
  if (std::fabs(q) < DBL_MIN) return next_up(q);
  double r = -std::fma(q, b, -a);
  bool exact_above = (r != 0.0) && ((r > 0) == (b > 0));
  return exact_above ? next_up(q) : q;
}

double sqrt_down(double x) noexcept {
  if (x <= 0.0) return 0.0;
  double q = std::sqrt(x);
  if (!std::isfinite(q)) return q;
  return std::fma(q, q, -x) > 0 ? next_down(q) : q;
}

double sqrt_up(double x) noexcept {
  if (x <= 0.0) return 0.0;
  double q = std::sqrt(x);
  if (!std::isfinite(q)) return q;
  return std::fma(q, q, -x) < 0 ? next_up(q) : q;
}

}  // namespace rnd

Interval operator+(const Interval& a, const Interval& b) {
  Interval r;
  r.lo = rnd::add_down(a.lo, b.lo);
  r.hi = rnd::add_up(a.hi, b.hi);
  return r;
}

Interval operator-(const Interval& a) {
  Interval r;
  r.lo = -a.hi;
  r.hi = -a.lo;
  return r;
}

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval& operator+=(Interval& a, const Interval& b) {
  a = a + b;
  return a;
}

Interval operator*(const Interval& a, const Interval& b) {
  double lo = std::min(std::min(rnd::mul_down(a.lo, b.lo), rnd::mul_down(a.lo, b.hi)),
                       std::min(rnd::mul_down(a.hi, b.lo), rnd::mul_down(a.hi, b.hi)));
  double hi = std::max(std::max(rnd::mul_up(a.lo, b.lo), rnd::mul_up(a.lo, b.hi)),
                       std::max(rnd::mul_up(a.hi, b.lo), rnd::mul_up(a.hi, b.hi)));
  Interval r;
  r.lo = lo;
  r.hi = hi;
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains(0.0)) throw std::domain_error("Interval division by interval containing 0");
  double lo = std::min(std::min(rnd::div_down(a.lo, b.lo), rnd::div_down(a.lo, b.hi)),
                       std::min(rnd::div_down(a.hi, b.lo), rnd::div_down(a.hi, b.hi)));
  double hi = std::max(std::max(rnd::div_up(a.lo, b.lo), rnd::div_up(a.lo, b.hi)),
                       std::max(rnd::div_up(a.hi, b.lo), rnd::div_up(a.hi, b.hi)));
  Interval r;
  r.lo = lo;
  r.hi = hi;
  return r;
}

Interval hull(const Interval& a, const Interval& b) {
  Interval r;
  r.lo = std::min(a.lo, b.lo);
  r.hi = std::max(a.hi, b.hi);
  return r;
}

Interval sqr(const Interval& a) {
  Interval r;
  if (a.lo >= 0.0) {
    r.lo = rnd::mul_down(a.lo, a.lo);
    r.hi = rnd::mul_up(a.hi, a.hi);
  } else if (a.hi <= 0.0) {
    r.lo = rnd::mul_down(a.hi, a.hi);
    r.hi = rnd::mul_up(a.lo, a.lo);
  } else {
    r.lo = 0.0;
    r.hi = std::max(rnd::mul_up(a.lo, a.lo), rnd::mul_up(a.hi, a.hi));
  }
  return r;
}

Interval ipow(const Interval& a, unsigned n) {
  if (n == 0) return Interval(1.0);
  // binary exponentiation; squarings go through sqr() to keep even powers tight
  Interval result(1.0);
  Interval base = a;
  bool result_set = false;
  while (n > 0) {
    if (n & 1u) {
      result = result_set ? result * base : base;
      result_set = true;
    }
    n >>= 1u;
    if (n > 0) base = sqr(base);
  }
  return result;
}

Interval libm_point(double value, int ulps) {
  double lo = value, hi = value;
  for (int i = 0; i < ulps; ++i) {
    lo = next_down(lo);
    hi = next_up(hi);
  }
  Interval r;
  r.lo = lo;
  r.hi = hi;
  return r;
}

namespace {

// pi is irrational, so the rounded double brackets it with its successor.
const Interval kPi = [] {
  Interval r;
  r.lo = 3.14159265358979311599796346854;  // = nearest double below pi
  r.hi = next_up(r.lo);
  return r;
}();

const Interval kTwoPi = kPi * Interval(2.0);
const Interval kHalfPi = kPi * Interval(0.5);

// Clamp a sampled sin/cos value enclosure into [-1,1].
Interval clamp_unit(Interval v) {
  v.lo = std::max(v.lo, -1.0);
  v.hi = std::min(v.hi, 1.0);
  if (v.lo > v.hi) v.lo = v.hi;
  return v;
}

// True iff the reduced interval possibly contains angle c + 2*pi*n for some
// integer n in a small range around the reduction window.
bool possibly_contains_angle(const Interval& reduced, const Interval& c) {
  for (int n = -2; n <= 2; ++n) {
    Interval shifted = c + kTwoPi * Interval(static_cast<double>(n));
    if (reduced.intersects(shifted)) return true;
  }
  return false;
}

}  // namespace

Interval sin(const Interval& a) {
  Interval full;
  full.lo = -1.0;
  full.hi = 1.0;
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) return full;
  if (a.width() >= kTwoPi.hi) return full;

  // Shift by an exact integer multiple of the 2*pi enclosure; sin is
  // invariant under the true shift and the enclosure absorbs the rest.
  double k = std::floor(a.mid() / 6.283185307179586);
  Interval reduced = a - kTwoPi * Interval(k);

  Interval r = hull(clamp_unit(libm_point(std::sin(a.lo))),
                    clamp_unit(libm_point(std::sin(a.hi))));
  if (possibly_contains_angle(reduced, kHalfPi)) r.hi = 1.0;
  if (possibly_contains_angle(reduced, -kHalfPi)) r.lo = -1.0;
  return r;
}

Interval cos(const Interval& a) {
  Interval full;
  full.lo = -1.0;
  full.hi = 1.0;
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) return full;
  if (a.width() >= kTwoPi.hi) return full;

  double k = std::floor(a.mid() / 6.283185307179586);
  Interval reduced = a - kTwoPi * Interval(k);

  Interval r = hull(clamp_unit(libm_point(std::cos(a.lo))),
                    clamp_unit(libm_point(std::cos(a.hi))));
  if (possibly_contains_angle(reduced, Interval(0.0))) r.hi = 1.0;
  if (possibly_contains_angle(reduced, kPi)) r.lo = -1.0;
  return r;
}

Interval sqrt(const Interval& a) {
  if (a.hi < 0.0) throw std::domain_error("Interval sqrt of negative interval");
  Interval r;
  r.lo = rnd::sqrt_down(std::max(a.lo, 0.0));
  r.hi = rnd::sqrt_up(a.hi);
  return r;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dims.size()) return false;
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (!dims[j].contains(x[j])) return false;
  return true;
}

bool Box::contains(const Box& o) const {
  if (o.dims.size() != dims.size()) return false;
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (!dims[j].contains(o.dims[j])) return false;
  return true;
}

double Box::max_width() const {
  double w = 0.0;
  for (const auto& d : dims) w = std::max(w, d.width());
  return w;
}

Box hull(const Box& a, const Box& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Box hull: dimension mismatch");
  Box r;
  r.dims.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r.dims.push_back(hull(a[j], b[j]));
  return r;
}

std::vector<double> box_center(const Box& b) {
  std::vector<double> c(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) c[j] = b[j].mid();
  return c;
}

std::vector<Box> box_partition(const Box& x, const std::vector<int>& p) {
  const std::size_t m = x.size();
  if (p.size() != m) throw std::invalid_argument("box_partition: |p| != box dimension");
  for (int pj : p)
    if (pj < 1) throw std::invalid_argument("box_partition: p_j must be >= 1");

  // Per-dimension edge grids with shared endpoints.
  std::vector<std::vector<double>> edges(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = x[j].lo, w = x[j].hi - x[j].lo;
    edges[j].resize(static_cast<std::size_t>(p[j]) + 1);
    edges[j][0] = lo;
    edges[j][static_cast<std::size_t>(p[j])] = x[j].hi;
    for (int k = 1; k < p[j]; ++k) {
      double e = lo + w * (static_cast<double>(k) / p[j]);
      edges[j][static_cast<std::size_t>(k)] = std::min(std::max(e, lo), x[j].hi);
    }
  }

  std::size_t total = 1;
  for (int pj : p) total *= static_cast<std::size_t>(pj);

  std::vector<Box> cells;
  cells.reserve(total);
  std::vector<int> idx(m, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Box cell;
    cell.dims.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      cell.dims.emplace_back(edges[j][static_cast<std::size_t>(idx[j])],
                             edges[j][static_cast<std::size_t>(idx[j]) + 1]);
    cells.push_back(std::move(cell));
    for (std::size_t j = m; j-- > 0;) {
      if (++idx[j] < p[j]) break;
      idx[j] = 0;
    }
  }
  return cells;
}

}  // namespace polyreach
