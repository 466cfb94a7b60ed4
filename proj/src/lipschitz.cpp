#include "polyreach/lipschitz.hpp"

#include <algorithm>
#include <cmath>

namespace polyreach {

Interval activation_image(Activation act, const Interval& y) {
  switch (act) {
    case Activation::linear:
      return y;
    case Activation::relu: {
      Interval r;
      r.lo = y.lo > 0.0 ? y.lo : 0.0;
      r.hi = y.hi > 0.0 ? y.hi : 0.0;
      return r;
    }
    case Activation::sigmoid: {
      Interval lo = libm_point(activation_apply(act, y.lo));
      Interval hi = libm_point(activation_apply(act, y.hi));
      Interval r;
      r.lo = std::clamp(lo.lo, 0.0, 1.0);
      r.hi = std::clamp(hi.hi, 0.0, 1.0);
      return r;
    }
    case Activation::tanh: {
      Interval lo = libm_point(activation_apply(act, y.lo));
      Interval hi = libm_point(activation_apply(act, y.hi));
      Interval r;
      r.lo = std::clamp(lo.lo, -1.0, 1.0);
      r.hi = std::clamp(hi.hi, -1.0, 1.0);
      return r;
    }
  }
  return y;
}

std::vector<LayerIntervals> propagate_intervals(const Network& net, const Box& x) {
  if (x.size() != net.input_dim) throw std::invalid_argument("propagate_intervals: dimension mismatch");
  std::vector<LayerIntervals> out;
  out.reserve(net.layers.size());
  Box prev = x;
  for (const Layer& l : net.layers) {
    LayerIntervals li;
    li.pre_activation.dims.resize(l.W.rows);
    for (std::size_t i = 0; i < l.W.rows; ++i) {
      Interval acc(l.b[i]);
      for (std::size_t j = 0; j < l.W.cols; ++j) acc += Interval(l.W(i, j)) * prev[j];
      li.pre_activation[i] = acc;
    }
    li.post_activation.dims.resize(l.W.rows);
    for (std::size_t i = 0; i < l.W.rows; ++i)
      li.post_activation[i] = activation_image(l.act, li.pre_activation[i]);
    prev = li.post_activation;
    out.push_back(std::move(li));
  }
  return out;
}

namespace {

double norm1_ub(const Matrix& W) {
  double best = 0.0;
  for (std::size_t j = 0; j < W.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < W.rows; ++i) s = rnd::add_up(s, std::fabs(W(i, j)));
    best = std::max(best, s);
  }
  return best;
}

double norminf_ub(const Matrix& W) {
  double best = 0.0;
  for (std::size_t i = 0; i < W.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < W.cols; ++j) s = rnd::add_up(s, std::fabs(W(i, j)));
    best = std::max(best, s);
  }
  return best;
}

double frobenius_ub(const Matrix& W) {
  double s = 0.0;
  for (double v : W.a) s = rnd::add_up(s, rnd::mul_up(v, v));
  return rnd::sqrt_up(s);
}

// Collatz-Wielandt: for the nonnegative matrix B = |W|^T |W| and any v > 0,
// rho(B) <= max_i (Bv)_i / v_i, and sigma(W) <= sigma(|W|) = sqrt(rho(B)).
// Power iteration only picks a good v; the final ratio is evaluated with
// interval arithmetic so the bound is certified for the v actually used.
double collatz_wielandt_ub(const Matrix& W) {
  const std::size_t n = W.cols;
  if (n == 0 || W.rows == 0) return 0.0;

  std::vector<double> absW(W.a.size());
  for (std::size_t k = 0; k < W.a.size(); ++k) absW[k] = std::fabs(W.a[k]);

  auto apply_B = [&](const std::vector<double>& v, std::vector<double>& out) {
    std::vector<double> t(W.rows, 0.0);
    for (std::size_t i = 0; i < W.rows; ++i) {
      const double* row = absW.data() + i * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
      t[i] = acc;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < W.rows; ++i) acc += absW[i * n + j] * t[i];
      out[j] = acc;
    }
  };

  std::vector<double> v(n, 1.0), bv(n, 0.0);
  double prev_spread = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    apply_B(v, bv);
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] <= 0.0) return std::numeric_limits<double>::infinity();
      double r = bv[j] / v[j];
      rmax = std::max(rmax, r);
      rmin = std::min(rmin, r);
    }
    double spread = rmax - rmin;
    if (spread <= 1e-12 * rmax || spread >= prev_spread * (1.0 - 1e-9)) break;
    prev_spread = spread;
    double norm = 0.0;
    for (double x : bv) norm = std::max(norm, x);
    if (norm == 0.0) return 0.0;
    for (std::size_t j = 0; j < n; ++j) v[j] = bv[j] / norm + 1e-300;
  }

  // Certified ratio for the final v: interval-evaluate B v.
  double rho_ub = 0.0;
  std::vector<Interval> t(W.rows, Interval(0.0));
  for (std::size_t i = 0; i < W.rows; ++i) {
    Interval acc(0.0);
    const double* row = absW.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += Interval(row[j]) * Interval(v[j]);
    t[i] = acc;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Interval acc(0.0);
    for (std::size_t i = 0; i < W.rows; ++i) acc += Interval(absW[i * n + j]) * t[i];
    double ratio = rnd::div_up(acc.hi, v[j]);
    rho_ub = std::max(rho_ub, ratio);
  }
  return rnd::sqrt_up(rho_ub);
}

}  // namespace

double matrix_opnorm_ub(const Matrix& W) {
  if (W.rows == 0 || W.cols == 0) return 0.0;
  bool all_zero = true;
  for (double v : W.a)
    if (v != 0.0) all_zero = false;
  if (all_zero) return 0.0;
  double holder = rnd::sqrt_up(rnd::mul_up(norm1_ub(W), norminf_ub(W)));
  double frob = frobenius_ub(W);
  double cw = collatz_wielandt_ub(W);
  return std::min(std::min(holder, frob), cw);
}

namespace {

// Largest slope of the activation over the pre-activation interval, rounded
// upward. sigmoid: sup S(y)(1-S(y)) = 1/4 - min((1/2-S(a))^2, (1/2-S(b))^2)
// unless 0 is inside; tanh: 1 - min(T(a)^2, T(b)^2) likewise.
double slope_sup(Activation act, const Interval& pre) {
  switch (act) {
    case Activation::linear:
      return 1.0;
    case Activation::relu:
      return pre.hi <= 0.0 ? 0.0 : 1.0;  // sgn(0) = -1: touching-zero stays masked
    case Activation::sigmoid: {
      if (pre.contains(0.0)) return 0.25;
      Interval da = Interval(0.5) - libm_point(activation_apply(act, pre.lo));
      Interval db = Interval(0.5) - libm_point(activation_apply(act, pre.hi));
      double m = std::min(sqr(da).lo, sqr(db).lo);
      return std::min(0.25, rnd::add_up(0.25, -m));
    }
    case Activation::tanh: {
      if (pre.contains(0.0)) return 1.0;
      double m = std::min(sqr(libm_point(activation_apply(act, pre.lo))).lo,
                          sqr(libm_point(activation_apply(act, pre.hi))).lo);
      return std::min(1.0, rnd::add_up(1.0, -m));
    }
  }
  return 1.0;
}

}  // namespace

double layer_lipschitz(Activation act, const Matrix& W, const Box& pre) {
  if (pre.size() != W.rows) throw std::invalid_argument("layer_lipschitz: box/row mismatch");
  if (act == Activation::relu) {
    // Zero out rows whose neuron can never fire, then bound the norm.
    Matrix masked = W;
    bool any_live = false;
    for (std::size_t i = 0; i < W.rows; ++i) {
      if (pre[i].hi <= 0.0) {
        for (std::size_t j = 0; j < W.cols; ++j) masked(i, j) = 0.0;
      } else {
        any_live = true;
      }
    }
    if (!any_live) return 0.0;
    return matrix_opnorm_ub(masked);
  }
  double slope = 0.0;
  for (std::size_t i = 0; i < W.rows; ++i) slope = std::max(slope, slope_sup(act, pre[i]));
  return rnd::mul_up(slope, matrix_opnorm_ub(W));
}

LipschitzReport network_lipschitz_report(const Network& net, const Box& x) {
  auto layers = propagate_intervals(net, x);
  LipschitzReport rep;
  rep.L = 1.0;
  rep.per_layer.reserve(net.layers.size());
  for (std::size_t s = 0; s < net.layers.size(); ++s) {
    double ls = layer_lipschitz(net.layers[s].act, net.layers[s].W, layers[s].pre_activation);
    rep.per_layer.push_back(ls);
    rep.L = rnd::mul_up(rep.L, ls);
  }
  if (!std::isfinite(rep.L) || rep.L < 0.0)
    throw std::runtime_error("network_lipschitz: non-finite bound");
  return rep;
}

double network_lipschitz(const Network& net, const Box& x) {
  return network_lipschitz_report(net, x).L;
}

}  // namespace polyreach
