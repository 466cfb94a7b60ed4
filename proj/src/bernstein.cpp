#include "polyreach/bernstein.hpp"

#include <cmath>
#include <stdexcept>

#include "polyreach/kernels.hpp"

namespace polyreach {

DegreeVector::DegreeVector(std::vector<int> deg) : d(std::move(deg)) {
  if (d.empty()) throw std::invalid_argument("DegreeVector: empty");
  for (int dj : d) {
    if (dj < 1) throw std::invalid_argument("DegreeVector: d_j must be >= 1");
    if (dj > 60) throw std::invalid_argument("DegreeVector: d_j too large for exact binomials");
  }
}

std::size_t BernsteinTensor::grid_size() const {
  std::size_t n = 1;
  for (int dj : d) n *= static_cast<std::size_t>(dj) + 1;
  return n;
}

VectorFn vector_fn(const Network& net) {
  VectorFn f;
  f.in_dim = net.input_dim;
  f.out_dim = net.output_dim();
  f.eval = [&net](const double* in, std::size_t n, double* out) {
    kernels::batch_forward(net, in, n, out);
  };
  return f;
}

VectorFn vector_fn(std::size_t in_dim, std::function<double(std::span<const double>)> scalar) {
  VectorFn f;
  f.in_dim = in_dim;
  f.out_dim = 1;
  f.eval = [in_dim, scalar = std::move(scalar)](const double* in, std::size_t n, double* out) {
    std::vector<double> pt(in_dim);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t j = 0; j < in_dim; ++j) pt[j] = in[j * n + p];
      out[p] = scalar(pt);
    }
  };
  return f;
}

namespace {

// Exact binomial table up to n (fits in double exactly for n <= 60).
std::vector<double> binomial_row(int n) {
  std::vector<unsigned long long> row(static_cast<std::size_t>(n) + 1, 1ull);
  for (int i = 1; i <= n; ++i)
    for (int k = i - 1; k >= 1; --k) row[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k) - 1];
  std::vector<double> out(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) out[k] = static_cast<double>(row[k]);
  return out;
}

// Column k of M holds the power-basis coefficients of
// C(d,k) x^k (1-x)^(d-k): M[i][k] = (-1)^(i-k) C(d,k) C(d-k, i-k).
std::vector<std::vector<double>> basis_matrix(int d) {
  auto cd = binomial_row(d);
  std::vector<std::vector<double>> M(static_cast<std::size_t>(d) + 1,
                                     std::vector<double>(static_cast<std::size_t>(d) + 1, 0.0));
  for (int k = 0; k <= d; ++k) {
    auto cdk = binomial_row(d - k);
    for (int i = k; i <= d; ++i) {
      double v = cd[static_cast<std::size_t>(k)] * cdk[static_cast<std::size_t>(i - k)];
      if ((i - k) % 2 != 0) v = -v;
      M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v;
    }
  }
  return M;
}

// Sample f on the uniform grid k/d (lexicographic, last dimension fastest).
// Returns out_dim tensors of grid values.
std::vector<std::vector<double>> sample_grid(const VectorFn& f, const DegreeVector& d) {
  const std::size_t m = d.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < m; ++j) total *= static_cast<std::size_t>(d[j]) + 1;

  std::vector<double> pts(m * total);
  std::vector<int> idx(m, 0);
  for (std::size_t g = 0; g < total; ++g) {
    for (std::size_t j = 0; j < m; ++j)
      pts[j * total + g] = static_cast<double>(idx[j]) / d[j];
    for (std::size_t j = m; j-- > 0;) {
      if (++idx[j] <= d[j]) break;
      idx[j] = 0;
    }
  }

  std::vector<double> out(f.out_dim * total);
  f.eval(pts.data(), total, out.data());
  for (double v : out)
    if (!std::isfinite(v)) throw std::runtime_error("bernstein: non-finite sample");

  std::vector<std::vector<double>> per_out(f.out_dim);
  for (std::size_t o = 0; o < f.out_dim; ++o)
    per_out[o].assign(out.begin() + static_cast<std::ptrdiff_t>(o * total),
                      out.begin() + static_cast<std::ptrdiff_t>((o + 1) * total));
  return per_out;
}

// Convert a grid-value tensor to power-basis coefficients by contracting the
// 1-D basis matrices along each axis.
std::vector<double> to_power_coeffs(std::vector<double> t, const DegreeVector& d) {
  const std::size_t m = d.size();
  std::vector<std::size_t> len(m);
  std::size_t total = 1;
  for (std::size_t j = 0; j < m; ++j) {
    len[j] = static_cast<std::size_t>(d[j]) + 1;
    total *= len[j];
  }
  std::vector<double> next(total);
  // Strides for lexicographic layout with last dimension fastest.
  std::vector<std::size_t> stride(m, 1);
  for (std::size_t j = m; j-- > 1;) stride[j - 1] = stride[j] * len[j];

  for (std::size_t axis = 0; axis < m; ++axis) {
    auto M = basis_matrix(d[axis]);
    const std::size_t naxis = len[axis];
    const std::size_t st = stride[axis];
    const std::size_t nblocks = total / (naxis * st);
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      for (std::size_t inner = 0; inner < st; ++inner) {
        const std::size_t base = blk * naxis * st + inner;
        for (std::size_t i = 0; i < naxis; ++i) {
          double acc = 0.0;
          for (std::size_t k = 0; k < naxis; ++k) acc += M[i][k] * t[base + k * st];
          next[base + i * st] = acc;
        }
      }
    }
    t.swap(next);
  }
  return t;
}

MultiPoly coeffs_to_poly(const std::vector<double>& coeffs, const DegreeVector& d,
                         std::vector<std::string> vars) {
  const std::size_t m = d.size();
  MultiPoly p = MultiPoly::zero(std::move(vars));
  std::vector<std::uint32_t> e(m, 0);
  for (std::size_t g = 0; g < coeffs.size(); ++g) {
    if (coeffs[g] != 0.0) p.terms[ExpVec(e)] = coeffs[g];
    for (std::size_t j = m; j-- > 0;) {
      if (++e[j] <= static_cast<std::uint32_t>(d[j])) break;
      e[j] = 0;
    }
  }
  return p;
}

}  // namespace

double de_casteljau(const BernsteinTensor& t, std::span<const double> x_unit) {
  const std::size_t m = t.d.size();
  if (x_unit.size() != m) throw std::invalid_argument("de_casteljau: dimension mismatch");
  std::vector<double> x(x_unit.begin(), x_unit.end());
  for (double& xu : x) {
    if (xu < -1e-9 || xu > 1.0 + 1e-9)
      throw std::domain_error("de_casteljau: point outside unit box");
    xu = std::clamp(xu, 0.0, 1.0);
  }

  std::vector<double> buf = t.coeff;
  std::size_t total = buf.size();
  // Collapse axes from the last (fastest-varying) to the first.
  for (std::size_t axis = m; axis-- > 0;) {
    const std::size_t naxis = static_cast<std::size_t>(t.d[axis]) + 1;
    const std::size_t nblocks = total / naxis;
    const double xa = x[axis];
    std::vector<double> tmp(naxis);
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      const double* src = buf.data() + blk * naxis;
      for (std::size_t k = 0; k < naxis; ++k) tmp[k] = src[k];
      for (std::size_t lvl = naxis; lvl-- > 1;)
        for (std::size_t k = 0; k < lvl; ++k) tmp[k] += xa * (tmp[k + 1] - tmp[k]);
      buf[blk] = tmp[0];
    }
    total = nblocks;
  }
  return buf[0];
}

MultiPoly bernstein_unit(const std::function<double(std::span<const double>)>& f,
                         const DegreeVector& d, std::vector<std::string> vars) {
  if (vars.size() != d.size()) throw std::invalid_argument("bernstein_unit: vars/degree mismatch");
  VectorFn vf = vector_fn(d.size(), f);
  auto samples = sample_grid(vf, d);
  auto coeffs = to_power_coeffs(std::move(samples[0]), d);
  return coeffs_to_poly(coeffs, d, std::move(vars));
}

ControllerApprox approx_controller(const VectorFn& f, const Box& x, const DegreeVector& d,
                                   std::vector<std::string> vars) {
  const std::size_t m = f.in_dim;
  if (x.size() != m || d.size() != m || vars.size() != m)
    throw std::invalid_argument("approx_controller: dimension mismatch");
  for (std::size_t j = 0; j < m; ++j)
    if (!(x[j].hi > x[j].lo))
      throw std::invalid_argument("approx_controller: degenerate box dimension " + std::to_string(j));

  // kappa'(x') = kappa(diag(u-l) x' + l) on the unit box.
  std::vector<double> widths(m), lows(m);
  for (std::size_t j = 0; j < m; ++j) {
    widths[j] = x[j].hi - x[j].lo;
    lows[j] = x[j].lo;
  }
  VectorFn rescaled;
  rescaled.in_dim = m;
  rescaled.out_dim = f.out_dim;
  rescaled.eval = [&f, widths, lows, m](const double* in, std::size_t n, double* out) {
    std::vector<double> mapped(m * n);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t p = 0; p < n; ++p)
        mapped[j * n + p] = widths[j] * in[j * n + p] + lows[j];
    f.eval(mapped.data(), n, out);
  };

  auto samples = sample_grid(rescaled, d);

  // Substitution back: x' = (x - l)/(u - l).
  std::vector<double> scale(m), shift(m);
  for (std::size_t j = 0; j < m; ++j) {
    scale[j] = 1.0 / widths[j];
    shift[j] = -lows[j] / widths[j];
  }

  ControllerApprox out;
  out.domain = x;
  out.degree = d;
  out.vars = vars;
  out.outputs.resize(f.out_dim);
  for (std::size_t o = 0; o < f.out_dim; ++o) {
    BernsteinTensor tensor;
    tensor.d = d.d;
    tensor.coeff = samples[o];
    auto coeffs = to_power_coeffs(std::move(samples[o]), d);
    MultiPoly unit = coeffs_to_poly(coeffs, d, vars);
    out.outputs[o].poly = poly_affine_compose(unit, scale, shift);
    out.outputs[o].tensor = std::move(tensor);
  }
  return out;
}

ControllerApprox approx_controller(const Network& net, const Box& x, const DegreeVector& d) {
  std::vector<std::string> vars;
  for (std::size_t j = 0; j < net.input_dim; ++j) vars.push_back("x" + std::to_string(j + 1));
  return approx_controller(vector_fn(net), x, d, std::move(vars));
}

}  // namespace polyreach
