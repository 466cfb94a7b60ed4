#pragma once

// Sound interval and box arithmetic with directed endpoint rounding.
//
// Endpoints are rounded outward without touching the FPU rounding mode:
// each operation computes the round-to-nearest result plus its exact
// residual (twosum for +/-, fma for *,/,sqrt) and steps the endpoint one
// ulp outward only when the residual says the rounded value crossed the
// true one. Exact results stay exact.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyreach {

inline double next_down(double x) noexcept {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

inline double next_up(double x) noexcept {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

namespace rnd {

double add_down(double a, double b) noexcept;
double add_up(double a, double b) noexcept;
double mul_down(double a, double b) noexcept;
double mul_up(double a, double b) noexcept;
double div_down(double a, double b) noexcept;
double div_up(double a, double b) noexcept;
double sqrt_down(double x) noexcept;
double sqrt_up(double x) noexcept;

}  // namespace rnd

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double point) : lo(point), hi(point) {}
  Interval(double l, double h) : lo(l), hi(h) {
    if (!(l <= h)) throw std::invalid_argument("Interval: lo > hi");
  }

  static Interval hull(double a, double b) {
    return a <= b ? Interval(a, b) : Interval(b, a);
  }

  double width() const { return hi - lo; }
  double mid() const {
    double m = 0.5 * (lo + hi);
    if (!std::isfinite(m)) m = 0.5 * lo + 0.5 * hi;
    if (m < lo) m = lo;
    if (m > hi) m = hi;
    return m;
  }
  // Upper bound on max |x - mid()| over the interval.
  double rad() const {
    double m = mid();
    return std::max(rnd::add_up(hi, -m), rnd::add_up(m, -lo));
  }
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  bool is_point() const { return lo == hi; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);  // throws if 0 in b

Interval& operator+=(Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);
Interval sqr(const Interval& a);
Interval ipow(const Interval& a, unsigned n);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval sqrt(const Interval& a);  // throws if a.hi < 0; clips negative lo to 0

// Enclosure of a libm point evaluation: f(x) widened by `ulps` on each side.
Interval libm_point(double value, int ulps = 4);

struct Box {
  std::vector<Interval> dims;

  Box() = default;
  explicit Box(std::vector<Interval> d) : dims(std::move(d)) {}
  Box(std::initializer_list<Interval> d) : dims(d) {}

  std::size_t size() const { return dims.size(); }
  Interval& operator[](std::size_t j) { return dims[j]; }
  const Interval& operator[](std::size_t j) const { return dims[j]; }

  bool contains(std::span<const double> x) const;
  bool contains(const Box& o) const;
  double max_width() const;
};

Box hull(const Box& a, const Box& b);

// Midpoint per dimension.
std::vector<double> box_center(const Box& b);

// Grid partition into prod(p_j) cells; cells share endpoints exactly, so
// their union is the parent box and interiors are disjoint.
std::vector<Box> box_partition(const Box& x, const std::vector<int>& p);

}  // namespace polyreach
